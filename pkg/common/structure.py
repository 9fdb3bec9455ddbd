# RADICALS, SOCLES, HEADS AND THE MAIN STRUCTURE CHECKS

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from sympy import QQ

from common.config import Settings
from common.convolution import associator, convolve, embed_pure_tensor
from common.errors import (
    ConsistencyError,
    DimensionMismatchError,
    HeightMismatchError,
    NotInvariantError,
    NotSimpleError,
    PreconditionError,
    SandwichPreconditionError,
    SymmetryError,
)
from common.klr import Word, is_symmetric
from common.linalg import (
    Matrix,
    Subspace,
    annihilator,
    flatten,
    full_algebra_certificate,
    kernel_basis,
    matrix_algebra,
    minimal_polynomial,
    sparse,
    trace_product,
    unflatten,
)
from common.module import (
    KLRModule,
    ModuleMap,
    dual,
    hom_space,
    invariant_closure,
    is_invariant,
    is_isomorphic,
    letter_module,
    module_from_subspace,
    quotient,
    restrict,
)
from common.rmatrix import renormalized_r
from views.typing import Claim, StructureReport

logger = logging.getLogger(__name__)


class SimplicityStatus(Enum):
    SIMPLE = "simple"
    NOT_SIMPLE = "not simple"
    # rad M = 0 but End(M) is a division algebra larger than QQ
    SEMISIMPLE_UNSPLIT = "semisimple unsplit"


# # Action algebra and radical


@dataclass(frozen=True)
class ActionAlgebra:
    """The image of R(beta) in End(M), as a canonical matrix basis."""

    module: KLRModule
    basis: Tuple[Matrix, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def _generators(m: KLRModule) -> List[Matrix]:
    return [m.idempotent(word) for word in m.word_blocks] + [
        mat for _, mat in m.generators()
    ]


def action_algebra(m: KLRModule) -> ActionAlgebra:
    if m.dim == 0:
        return ActionAlgebra(m, ())
    return ActionAlgebra(m, tuple(matrix_algebra(_generators(m), m.dim)))


def _acts_as_everything(m: KLRModule, settings: Settings) -> bool:
    return m.dim > 0 and full_algebra_certificate(
        _generators(m), m.dim, settings.modulus
    )


def radical_elements(
    m: KLRModule, settings: Optional[Settings] = None
) -> List[Matrix]:
    """A basis of rad(A): the kernel of the trace form tr(ab) on A."""
    settings = settings or Settings()
    if m.dim == 0 or _acts_as_everything(m, settings):
        return []
    basis = action_algebra(m).basis
    gram = Matrix.build(
        len(basis),
        len(basis),
        (
            ((i, j), trace_product(a, b))
            for i, a in enumerate(basis)
            for j, b in enumerate(basis)
        ),
    )
    elements = []
    for coeffs in kernel_basis(gram).vectors():
        total = Matrix.zeros(m.dim, m.dim)
        for i, c in coeffs.items():
            total = total + basis[i].scale(c)
        elements.append(total)
    logger.debug(
        "%s: action algebra of dim %d, radical of dim %d",
        m.name, len(basis), len(elements),
    )
    return elements


def radical_subspace(
    m: KLRModule, settings: Optional[Settings] = None
) -> Subspace:
    """rad(A) M."""
    return Subspace.from_vectors(
        (
            column
            for r in radical_elements(m, settings)
            for column in r.columns()
        ),
        m.dim,
    )


def socle_subspace(
    m: KLRModule, settings: Optional[Settings] = None
) -> Subspace:
    """{v in M : rad(A) v = 0}."""
    elements = radical_elements(m, settings)
    if not elements:
        return Subspace.full(m.dim)
    stacked = Matrix.build(
        m.dim * len(elements),
        m.dim,
        (
            ((block * m.dim + i, j), value)
            for block, r in enumerate(elements)
            for (i, j), value in r.items()
        ),
    )
    return kernel_basis(stacked)


def socle(
    m: KLRModule, settings: Optional[Settings] = None
) -> Tuple[KLRModule, ModuleMap]:
    return module_from_subspace(
        m, socle_subspace(m, settings), name=f"soc({m.name})"
    )


def head(
    m: KLRModule, settings: Optional[Settings] = None
) -> Tuple[KLRModule, ModuleMap]:
    return quotient(m, radical_subspace(m, settings), name=f"hd({m.name})")


# # Simplicity


def end_dimension(m: KLRModule, settings: Optional[Settings] = None) -> int:
    if _acts_as_everything(m, settings or Settings()):
        return 1
    return len(hom_space(m, m))


def is_simple(
    m: KLRModule, settings: Optional[Settings] = None
) -> SimplicityStatus:
    settings = settings or Settings()
    if m.dim == 0:
        return SimplicityStatus.NOT_SIMPLE
    for i in range(m.dim):
        if invariant_closure(m, [{i: QQ.one}]).rank < m.dim:
            return SimplicityStatus.NOT_SIMPLE
    if _acts_as_everything(m, settings):
        return SimplicityStatus.SIMPLE
    if radical_subspace(m, settings).rank:
        return SimplicityStatus.NOT_SIMPLE
    endomorphisms = [f.matrix for f in hom_space(m, m)]
    if len(endomorphisms) == 1:
        return SimplicityStatus.SIMPLE
    total = endomorphisms[0]
    for k, f in enumerate(endomorphisms[1:], 2):
        total = total + f.scale(k)
    for candidate in endomorphisms + [total]:
        _, factors = minimal_polynomial(candidate).factor_list()
        if len(factors) > 1:
            # a nontrivial idempotent splits M
            return SimplicityStatus.NOT_SIMPLE
    return SimplicityStatus.SEMISIMPLE_UNSPLIT


def is_real(m: KLRModule, settings: Optional[Settings] = None) -> bool:
    """M simple and M o M simple.

    Over a symmetric root this is cross-checked against r_{M,M} being
    scalar and End(M o M) being one-dimensional.
    """
    settings = settings or Settings.from_env()
    if is_simple(m, settings) != SimplicityStatus.SIMPLE:
        return False
    square = convolve(m, m, settings)
    real = is_simple(square, settings) == SimplicityStatus.SIMPLE
    if is_symmetric(m.qfamily, m.beta):
        scalar = renormalized_r(m, m, settings).matrix.is_scalar()
        one_end = end_dimension(square, settings) == 1
        if not real == scalar == one_end:
            raise ConsistencyError(
                f"realness of {m.name}: simple square {real}, "
                f"scalar r {scalar}, one-dimensional End {one_end}"
            )
    return real


# # Head convolution and crystal operators


def hconv(
    m: KLRModule, n: KLRModule, settings: Optional[Settings] = None
) -> KLRModule:
    """The head of M o N."""
    settings = settings or Settings.from_env()
    for factor in (m, n):
        if is_simple(factor, settings) != SimplicityStatus.SIMPLE:
            raise NotSimpleError(f"{factor.name} is not simple")
    top, _ = head(convolve(m, n, settings), settings)
    return top.renamed(f"hd({m.name}∘{n.name})")


def crystal_f(
    i: int, m: KLRModule, settings: Optional[Settings] = None
) -> KLRModule:
    return hconv(m, letter_module(m.qfamily, i), settings)


def crystal_f_dual(
    i: int, m: KLRModule, settings: Optional[Settings] = None
) -> KLRModule:
    return hconv(letter_module(m.qfamily, i), m, settings)


# # Sandwich and adjunction modules


def _tensor_closure(
    conv: KLRModule, left: KLRModule, right: KLRModule, lefts, rights
) -> Subspace:
    return invariant_closure(
        conv,
        (
            embed_pure_tensor(left, right, a, b)
            for a in lefts
            for b in rights
        ),
    )


def _unit_vectors(dim: int):
    return [{k: QQ.one} for k in range(dim)]


def sandwich(
    x: Subspace,
    y: Subspace,
    m1: KLRModule,
    m2: KLRModule,
    m3: KLRModule,
    settings: Optional[Settings] = None,
) -> Subspace:
    """The largest N in M2 with N o M3 in Y; then X lies in M1 o N.

    X is a submodule of M1 o M2, Y of M2 o M3, and X o M3 must lie in
    M1 o Y inside the triple product.
    """
    settings = settings or Settings.from_env()
    m12 = convolve(m1, m2, settings)
    m23 = convolve(m2, m3, settings)
    if x.dim != m12.dim or y.dim != m23.dim:
        raise DimensionMismatchError("X or Y lives in the wrong convolution")
    for module, space in ((m12, x), (m23, y)):
        if not is_invariant(module, space):
            raise NotInvariantError(f"not a submodule of {module.name}")

    left = convolve(m12, m3, settings)
    right = convolve(m1, m23, settings)
    to_right = associator(m1, m2, m3, left, right).matrix
    x_m3 = _tensor_closure(left, m12, m3, x.vectors(), _unit_vectors(m3.dim))
    moved = Subspace.from_vectors(
        (to_right.apply(vector) for vector in x_m3.vectors()), right.dim
    )
    m1_y = _tensor_closure(right, m1, m23, _unit_vectors(m1.dim), y.vectors())
    if not m1_y.contains(moved):
        raise SandwichPreconditionError("X o M3 is not contained in M1 o Y")

    # u (x) s_k must be killed by every linear form vanishing on Y
    rows = []
    for form in annihilator(y).vectors():
        for k in range(m3.dim):
            rows.append(
                {
                    i: form[i * m3.dim + k]
                    for i in range(m2.dim)
                    if i * m3.dim + k in form
                }
            )
    n_space = kernel_basis(
        Matrix.build(
            len(rows),
            m2.dim,
            (
                ((r, i), v)
                for r, row in enumerate(rows)
                for i, v in row.items()
            ),
        )
    )

    n_m3 = _tensor_closure(
        m23, m2, m3, n_space.vectors(), _unit_vectors(m3.dim)
    )
    m1_n = _tensor_closure(
        m12, m1, m2, _unit_vectors(m1.dim), n_space.vectors()
    )
    if not y.contains(n_m3) or not m1_n.contains(x):
        raise ConsistencyError("sandwich module misses a containment")
    return n_space


def adjunction_X(
    m: KLRModule, big: KLRModule, settings: Optional[Settings] = None
) -> KLRModule:
    """Hom_{R(beta)}(M, e(beta, gamma) L) with R(gamma) acting on L.

    A basis vector is a flattened map M -> L supported on one suffix
    word, which is its word in the result.
    """
    try:
        gamma = big.beta - m.beta
    except ValueError as err:
        raise HeightMismatchError(
            f"{m.beta} is not contained in {big.beta}"
        ) from err
    pair = restrict(big, m.beta, gamma)
    first = pair.first
    blocks: Dict[Word, List[int]] = {}
    for r, suffix in enumerate(pair.second.words):
        blocks.setdefault(suffix, []).append(r)

    maps = []
    for suffix, local in sorted(blocks.items()):
        block = KLRModule(
            m.qfamily,
            m.beta,
            tuple(first.words[r] for r in local),
            tuple(a.submatrix(local, local) for a in first.x_mats),
            tuple(a.submatrix(local, local) for a in first.tau_mats),
            name=f"{first.name}|{suffix}",
        )
        for f in hom_space(m, block):
            maps.append(
                {
                    pair.indices[local[r]] * m.dim + c: value
                    for (r, c), value in f.matrix.items()
                }
            )
    space = Subspace.from_vectors(maps, big.dim * m.dim)
    basis = space.vectors()
    cut = m.height
    words = tuple(big.words[min(vec) // m.dim][cut:] for vec in basis)

    def act(action: Matrix) -> Matrix:
        columns = []
        for vector in basis:
            image = flatten(action @ unflatten(vector, big.dim, m.dim))
            coords = space.coordinates(image)
            if coords is None:
                raise ConsistencyError("adjunction module is not closed")
            columns.append(sparse(coords))
        return Matrix.from_columns(columns, len(basis))

    return KLRModule(
        m.qfamily,
        gamma,
        words,
        tuple(act(big.x(cut + k)) for k in range(1, gamma.height + 1)),
        tuple(act(big.tau(cut + k)) for k in range(1, gamma.height)),
        name=f"X({m.name},{big.name})",
    )


def adjunction_Y(
    m: KLRModule, big: KLRModule, settings: Optional[Settings] = None
) -> KLRModule:
    return dual(adjunction_X(dual(m), dual(big), settings)).renamed(
        f"Y({m.name},{big.name})"
    )


# # Brute-force submodule lattice


@dataclass(frozen=True)
class SubmoduleLattice:
    members: Tuple[Subspace, ...]
    radical: Subspace
    socle: Subspace


def enumerate_submodules(
    m: KLRModule, settings: Optional[Settings] = None
) -> SubmoduleLattice:
    """Submodules spun from {-1, 0, 1} vectors, closed under sums."""
    settings = settings or Settings()
    if m.dim > settings.oracle_max_dim:
        raise ValueError(
            f"{m.name} has dimension {m.dim} > {settings.oracle_max_dim}"
        )
    dim = m.dim
    members = {Subspace.zero(dim), Subspace.full(dim)}
    for coeffs in itertools.product((-1, 0, 1), repeat=dim):
        if any(coeffs):
            members.add(invariant_closure(m, [sparse(coeffs)]))
    grown = True
    while grown:
        grown = False
        for a, b in itertools.combinations(list(members), 2):
            total = a + b
            if total not in members:
                members.add(total)
                grown = True

    proper = [s for s in members if s.rank < dim]
    maximal = [
        s
        for s in proper
        if not any(o.rank > s.rank and o.contains(s) for o in proper)
    ]
    radical = Subspace.full(dim) if maximal else Subspace.zero(dim)
    for s in maximal:
        radical = radical.intersection(s)
    nonzero = [s for s in members if s.rank]
    minimal = [
        s
        for s in nonzero
        if not any(o.rank < s.rank and s.contains(o) for o in nonzero)
    ]
    socle_space = Subspace.zero(dim)
    for s in minimal:
        socle_space = socle_space + s
    ordered = tuple(sorted(members, key=lambda s: (s.rank, s.basis)))
    return SubmoduleLattice(ordered, radical, socle_space)


# # The head and socle of M o N


def verify_main_theorem(
    m: KLRModule, n: KLRModule, settings: Optional[Settings] = None
) -> StructureReport:
    """Check, for M with r_{M,M} scalar and N simple, that M o N has a
    simple head and socle, located by the renormalized R-matrices."""
    settings = settings or Settings.from_env()
    simple = SimplicityStatus.SIMPLE
    if not is_symmetric(m.qfamily, m.beta):
        raise SymmetryError(f"{m.name} is not over a symmetric root")
    if m.dim == 0:
        raise PreconditionError(PreconditionError.M_IS_ZERO)
    if not renormalized_r(m, m, settings).matrix.is_scalar():
        if is_simple(m, settings) != simple:
            raise PreconditionError(PreconditionError.M_NOT_SIMPLE)
        raise PreconditionError(PreconditionError.R_NOT_SCALAR)
    if is_simple(n, settings) != simple:
        raise PreconditionError(PreconditionError.N_NOT_SIMPLE)

    mn = convolve(m, n, settings)
    nm = convolve(n, m, settings)
    r_mn = renormalized_r(m, n, settings).map
    r_nm = renormalized_r(n, m, settings).map
    soc_mn = socle_subspace(mn, settings)
    rad_mn = radical_subspace(mn, settings)
    soc_nm = socle_subspace(nm, settings)
    rad_nm = radical_subspace(nm, settings)
    socle_mn, _ = module_from_subspace(mn, soc_mn, f"soc({mn.name})")
    socle_nm, _ = module_from_subspace(nm, soc_nm, f"soc({nm.name})")
    head_mn, _ = quotient(mn, rad_mn, f"hd({mn.name})")
    head_nm, _ = quotient(nm, rad_nm, f"hd({nm.name})")
    image_mn = r_mn.image()
    image_nm = r_nm.image()

    claims = [
        Claim("head of M∘N is simple",
              is_simple(head_mn, settings) == simple),
        Claim("socle of M∘N is simple",
              is_simple(socle_mn, settings) == simple),
        Claim("head of N∘M is simple",
              is_simple(head_nm, settings) == simple),
        Claim("socle of N∘M is simple",
              is_simple(socle_nm, settings) == simple),
        Claim("image of r_{N,M} equals the socle of M∘N",
              image_nm == soc_mn,
              f"dim {image_nm.rank} against {soc_mn.rank}"),
        Claim("image of r_{M,N} equals the socle of N∘M",
              image_mn == soc_nm,
              f"dim {image_mn.rank} against {soc_nm.rank}"),
        Claim(
            "image of r_{M,N} is isomorphic to the head of M∘N",
            is_isomorphic(
                module_from_subspace(nm, image_mn)[0], head_mn, settings
            )[0],
        ),
        Claim(
            "image of r_{N,M} is isomorphic to the head of N∘M",
            is_isomorphic(
                module_from_subspace(mn, image_nm)[0], head_nm, settings
            )[0],
        ),
    ]
    end_dim = end_dimension(mn, settings)
    claims.append(
        Claim("End(M∘N) is one-dimensional", end_dim == 1, f"dim {end_dim}")
    )
    product_simple = is_simple(mn, settings) == simple
    head_is_socle = is_isomorphic(head_mn, socle_mn, settings)[0]
    commute = is_isomorphic(mn, nm, settings)[0]
    claims.extend(
        [
            Claim("head isomorphic to socle forces M∘N simple",
                  product_simple or not head_is_socle),
            Claim("M∘N isomorphic to N∘M exactly when M∘N is simple",
                  commute == product_simple),
            Claim("M is simple", is_simple(m, settings) == simple),
        ]
    )
    if (
        commute
        and 2 * mn.height <= settings.max_real_height
        and is_real(n, settings)
    ):
        claims.append(
            Claim("M∘N is real for real commuting factors",
                  is_real(mn, settings))
        )
    report = StructureReport(
        pair=(m.name, n.name),
        claims=tuple(claims),
        socle_dim=soc_mn.rank,
        head_dim=mn.dim - rad_mn.rank,
        end_dim=end_dim,
        simple=product_simple,
        commute=commute,
    )
    logger.info(
        "verified (%s, %s): %s", m.name, n.name,
        "pass" if report.passed else "fail",
    )
    return report
