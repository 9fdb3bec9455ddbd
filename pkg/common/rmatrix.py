# INTERTWINERS AND R-MATRICES

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.rings import PolyElement

from common.config import Settings
from common.convolution import (
    ConvBasisLabel,
    apply_tau_word,
    associator,
    associator_inverse,
    convolve,
    convolve_maps,
)
from common.errors import (
    ConsistencyError,
    DimensionMismatchError,
    RootMismatchError,
    SymmetryError,
    ZeroMapError,
)
from common.klr import (
    Permutation,
    Word,
    block_transposition,
    is_symmetric,
)
from common.linalg import (
    INFINITE,
    SPECTRAL,
    Matrix,
    evaluate_polynomial,
    image_subspace,
    z,
    z1,
    z2,
    z_valuation,
)
from common.module import KLRModule, ModuleMap, Report

logger = logging.getLogger(__name__)


# # Intertwiners


def _equal_letters(module: KLRModule, a: int) -> Matrix:
    """The projection onto words with nu_a = nu_{a+1}."""
    return Matrix.build(
        module.dim,
        module.dim,
        (
            ((j, j), 1)
            for j, word in enumerate(module.words)
            if word[a - 1] == word[a]
        ),
        module.domain,
    )


def phi_matrix(module: KLRModule, a: int) -> Matrix:
    """phi_a: tau_a (x_a - x_{a+1}) + 1 on equal letters, tau_a elsewhere."""
    if not 1 <= a < module.height:
        raise DimensionMismatchError(
            f"phi_{a} needs 1 <= a < {module.height}"
        )
    equal = _equal_letters(module, a)
    identity = Matrix.identity(module.dim, module.domain)
    tau = module.tau(a)
    return (
        tau @ (module.x(a) - module.x(a + 1)) @ equal
        + equal
        + tau @ (identity - equal)
    )


def phi_word_matrix(module: KLRModule, word: Sequence[int]) -> Matrix:
    """phi_{a1} ... phi_{al} for the letters of `word`."""
    result = Matrix.identity(module.dim, module.domain)
    for letter in word:
        result = result @ phi_matrix(module, letter)
    return result


def phi_action(module: KLRModule, a: int, vector) -> Dict:
    return phi_matrix(module, a).apply(vector)


def _largest_word(perm: Permutation) -> Word:
    """The reduced word taking the largest left descent first."""
    letters = []
    while not perm.is_identity:
        a = perm.left_descents()[-1]
        letters.append(a)
        perm = perm.left_multiply(a)
    return tuple(letters)


def check_intertwiner_laws(module: KLRModule) -> Report:
    """Squares, braid relations, word independence and the exchange of
    x and tau with phi, as exact matrix identities."""
    size, dim = module.height, module.dim
    problems: List[str] = []
    if size < 2 or dim == 0:
        return Report()
    phis = {a: phi_matrix(module, a) for a in range(1, size)}
    zero = Matrix.zeros(dim, dim, module.domain)

    for a, phi in phis.items():
        expected = _equal_letters(module, a)
        for word, indices in module.word_blocks.items():
            poly = module.qfamily.q(word[a - 1], word[a])
            value = evaluate_polynomial(
                poly, [module.x(a), module.x(a + 1), zero], dim, module.domain
            )
            wanted = set(indices)
            expected = expected + Matrix.build(
                dim,
                dim,
                (((i, j), c) for (i, j), c in value.items() if j in wanted),
                module.domain,
            )
        if not (phi @ phi - expected).is_zero:
            problems.append(f"phi-square:{a}")

    for a in range(1, size - 1):
        p, q = phis[a], phis[a + 1]
        if not (p @ q @ p - q @ p @ q).is_zero:
            problems.append(f"phi-braid:{a}")
    for a in range(1, size):
        for b in range(a + 2, size):
            if not (phis[a] @ phis[b] - phis[b] @ phis[a]).is_zero:
                problems.append(f"phi-commute:{a},{b}")

    longest = Permutation(tuple(range(size, 0, -1)))
    if not (
        phi_word_matrix(module, longest.canonical_word)
        - phi_word_matrix(module, _largest_word(longest))
    ).is_zero:
        problems.append("phi-word-independence")

    for a in range(1, size):
        s_a = Permutation.simple(a, size)
        for k in range(1, size + 1):
            if not (
                phis[a] @ module.x(k) - module.x(s_a(k)) @ phis[a]
            ).is_zero:
                problems.append(f"phi-x:{a},{k}")

    for cut in range(1, size):
        w = block_transposition(cut, size - cut)
        phi_w = phi_word_matrix(module, w.canonical_word)
        for k in range(1, size):
            if w(k + 1) != w(k) + 1:
                continue
            if not (
                phi_w @ module.tau(k) - module.tau(w(k)) @ phi_w
            ).is_zero:
                problems.append(f"phi-tau:{cut},{k}")
    return Report(tuple(problems))


# # R-matrices


def big_R(
    m: KLRModule,
    n: KLRModule,
    source: Optional[KLRModule] = None,
    target: Optional[KLRModule] = None,
) -> ModuleMap:
    """R_{M,N}: M o N -> N o M, u (x) v -> phi_{w[n,m]}(v (x) u)."""
    if m.qfamily != n.qfamily:
        raise RootMismatchError("R-matrix needs a common Q family")
    source = source or convolve(m, n)
    target = target or convolve(n, m)
    swap = phi_word_matrix(
        target, block_transposition(n.height, m.height).canonical_word
    )
    swap_cols = swap.columns()
    identity = Permutation.identity(target.height)
    index = target.origin.index
    columns = []
    for label in source.origin.labels:
        swapped = index[ConvBasisLabel(identity, label.right, label.left)]
        start = swap_cols[swapped]
        columns.append(
            apply_tau_word(target, label.coset.canonical_word, start)
        )
    matrix = Matrix.from_columns(columns, target.dim, target.domain)
    return ModuleMap(source, target, matrix)


def deform(m: KLRModule, var: PolyElement = z) -> KLRModule:
    """M_var: every x_k acts by x_k + var."""
    shift = Matrix.identity(m.dim, SPECTRAL).scale(var)
    return replace(
        m.lift(SPECTRAL),
        x_mats=tuple(a.lift(SPECTRAL) + shift for a in m.x_mats),
        name=f"{m.name}_{var}",
    )


def _require_symmetric(m: KLRModule):
    if not is_symmetric(m.qfamily, m.beta):
        raise SymmetryError(
            f"{m.name} is over {m.beta}, where some Q_ij is not a "
            "polynomial in u - v"
        )


def big_R_deformed(m: KLRModule, n: KLRModule) -> ModuleMap:
    """R_{M_z,N}: M_z o N -> N o M_z."""
    _require_symmetric(m)
    return big_R(deform(m), n)


def vanishing_order(r: ModuleMap, var: PolyElement = z) -> int:
    order = z_valuation(r.matrix, var)
    if order == INFINITE:
        raise ZeroMapError(
            f"R-matrix {r.source.name} -> {r.target.name} vanishes"
        )
    return order


def _rational(matrix: Matrix) -> Matrix:
    return matrix.specialize({z: QQ.zero}).lift(QQ)


@dataclass(frozen=True)
class RenormalizedRMatrix:
    """r_{M,N} with the vanishing orders it was read off from.

    `s` comes from deforming M and `t` from deforming N; either is None
    when that root is not symmetric.
    """

    map: ModuleMap
    s: Optional[int]
    t: Optional[int]

    @property
    def matrix(self) -> Matrix:
        return self.map.matrix

    @property
    def rank(self) -> int:
        return self.map.rank

    def image_words(self) -> List[Word]:
        words = {
            self.map.target.words[i]
            for vector in image_subspace(self.matrix).vectors()
            for i in vector
        }
        return sorted(words)


def _leading(
    deformed: ModuleMap, sign: int
) -> Tuple[Matrix, int]:
    order = vanishing_order(deformed)
    coefficient = _rational(deformed.matrix.z_coefficient(order))
    return coefficient.scale(QQ(sign) ** order), order


def renormalized_r(
    m: KLRModule, n: KLRModule, settings: Optional[Settings] = None
) -> RenormalizedRMatrix:
    """r_{M,N} = (z^-s R_{M_z,N})|_{z=0}, or ((-z)^-t R_{M,N_z})|_{z=0}.

    Deforming M is preferred. When both roots are symmetric both
    leading coefficients are computed and must agree, with s == t.
    """
    settings = settings or Settings.from_env()
    m_symmetric = is_symmetric(m.qfamily, m.beta)
    n_symmetric = is_symmetric(n.qfamily, n.beta)
    if not (m_symmetric or n_symmetric):
        raise SymmetryError(
            f"neither {m.name} nor {n.name} lies over a symmetric root"
        )
    source = convolve(m, n, settings)
    target = convolve(n, m, settings)
    matrix, s, t = None, None, None
    if m_symmetric:
        matrix, s = _leading(big_R(deform(m), n), 1)
    if n_symmetric:
        other, t = _leading(big_R(m, deform(n)), -1)
        if matrix is None:
            matrix = other
        elif matrix != other or s != t:
            raise ConsistencyError(
                f"r_{{{m.name},{n.name}}} depends on the deformed side"
            )
    logger.debug("r_{%s,%s}: s=%s t=%s", m.name, n.name, s, t)
    return RenormalizedRMatrix(ModuleMap(source, target, matrix), s, t)


def spectral_orders(
    m: KLRModule, n: KLRModule
) -> Tuple[Optional[int], Optional[int]]:
    s = t = None
    if is_symmetric(m.qfamily, m.beta):
        s = vanishing_order(big_R(deform(m), n))
    if is_symmetric(n.qfamily, n.beta):
        t = vanishing_order(big_R(m, deform(n)))
    return s, t


def check_z1z2_dependence(m: KLRModule, n: KLRModule) -> bool:
    """True iff every entry of R_{M_z1,N_z2} is a polynomial in z1 - z2."""
    _require_symmetric(m)
    _require_symmetric(n)
    deformed = big_R(deform(m, z1), deform(n, z2))
    for _, entry in deformed.matrix.items():
        if entry.diff(z) or entry.diff(z1) + entry.diff(z2):
            logger.debug("entry %s is not a function of z1 - z2", entry)
            return False
    return True


def check_r_matrix(m: KLRModule, n: KLRModule) -> Report:
    """R_{M,N} and r_{M,N} intertwine, and r never vanishes."""
    problems: List[str] = []
    if not big_R(m, n).is_module_map():
        problems.append("R-module-map")
    if is_symmetric(m.qfamily, m.beta) and not big_R_deformed(
        m, n
    ).is_module_map():
        problems.append("R-deformed-module-map")
    r = renormalized_r(m, n)
    if r.map.is_zero:
        problems.append("r-nonzero")
    if not r.map.is_module_map():
        problems.append("r-module-map")
    return Report(tuple(problems))


# # Hexagons


def _identity(module: KLRModule) -> ModuleMap:
    return ModuleMap(
        module, module, Matrix.identity(module.dim, module.domain)
    )


def check_hexagons(l: KLRModule, m: KLRModule, n: KLRModule) -> Report:
    """R_{L,M o N} and R_{L o M,N} through the associativity maps."""
    problems: List[str] = []
    lm, mn, ln, ml, nl = (
        convolve(l, m), convolve(m, n), convolve(l, n), convolve(m, l),
        convolve(n, l),
    )
    lm_n = convolve(lm, n)
    l_mn = convolve(l, mn)
    ml_n = convolve(ml, n)
    m_ln = convolve(m, ln)
    m_nl = convolve(m, nl)
    mn_l = convolve(mn, l)

    # L o M o N -> M o N o L
    left = (
        convolve_maps(_identity(m), big_R(l, n, ln, nl), m_ln, m_nl)
        @ associator(m, l, n, ml_n, m_ln)
        @ convolve_maps(big_R(l, m, lm, ml), _identity(n), lm_n, ml_n)
    )
    right = (
        associator(m, n, l, mn_l, m_nl)
        @ big_R(l, mn, l_mn, mn_l)
        @ associator(l, m, n, lm_n, l_mn)
    )
    if left.matrix != right.matrix:
        problems.append("hexagon:R_{L,MN}")

    # L o M o N -> N o L o M
    nm = convolve(n, m)
    l_nm = convolve(l, nm)
    ln_m = convolve(ln, m)
    nl_m = convolve(nl, m)
    n_lm = convolve(n, lm)
    left = (
        associator(n, l, m, nl_m, n_lm)
        @ convolve_maps(big_R(l, n, ln, nl), _identity(m), ln_m, nl_m)
        @ associator_inverse(l, n, m, l_nm, ln_m)
        @ convolve_maps(_identity(l), big_R(m, n, mn, nm), l_mn, l_nm)
        @ associator(l, m, n, lm_n, l_mn)
    )
    right = big_R(lm, n, lm_n, n_lm)
    if left.matrix != right.matrix:
        problems.append("hexagon:R_{LM,N}")
    return Report(tuple(problems))
