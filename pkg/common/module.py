# KLR MODULES

import itertools
import logging
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import (
    Any,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from sympy import QQ
from sympy.polys.rings import PolyElement

from common.config import ISO_COEFFICIENTS, Settings
from common.errors import (
    HeightMismatchError,
    NotInvariantError,
    RootMismatchError,
)
from common.klr import Permutation, QFamily, RootVector, Word, qbar
from common.linalg import (
    Echelon,
    Matrix,
    Subspace,
    Vector,
    add_into,
    evaluate_polynomial,
    image_subspace,
    kernel_basis,
    rank,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Report:
    """Violated relation identifiers; empty means every check passed."""

    violations: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def __add__(self, other: "Report") -> "Report":
        return Report(self.violations + other.violations)


@dataclass(frozen=True)
class KLRModule:
    """A finite-dimensional R(beta)-module in a word-adapted basis.

    Basis vector i lies in the e(words[i]) component; x_mats[k - 1] and
    tau_mats[k - 1] are the actions of x_k and tau_k.
    """

    qfamily: QFamily
    beta: RootVector
    words: Tuple[Word, ...]
    x_mats: Tuple[Matrix, ...]
    tau_mats: Tuple[Matrix, ...]
    name: str = field(default="", compare=False)
    domain: Any = QQ
    # Set by convolve: the factors and basis labels of a convolution.
    origin: Any = field(default=None, compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.words)

    @property
    def height(self) -> int:
        return self.beta.height

    def x(self, k: int) -> Matrix:
        return self.x_mats[k - 1]

    def tau(self, k: int) -> Matrix:
        return self.tau_mats[k - 1]

    @cached_property
    def word_blocks(self) -> Dict[Word, Tuple[int, ...]]:
        blocks: Dict[Word, List[int]] = {}
        for index, word in enumerate(self.words):
            blocks.setdefault(word, []).append(index)
        return {word: tuple(indices) for word, indices in blocks.items()}

    def generators(self) -> List[Tuple[str, Matrix]]:
        return [(f"x{k}", m) for k, m in enumerate(self.x_mats, 1)] + [
            (f"tau{k}", m) for k, m in enumerate(self.tau_mats, 1)
        ]

    def idempotent(self, word: Word) -> Matrix:
        indices = self.word_blocks.get(tuple(word), ())
        return Matrix.build(
            self.dim, self.dim, (((i, i), 1) for i in indices), self.domain
        )

    def split_by_words(self, vector: Mapping[int, Any]) -> List[Vector]:
        parts: Dict[Word, Vector] = {}
        for index, value in vector.items():
            if value:
                parts.setdefault(self.words[index], {})[index] = value
        return list(parts.values())

    def renamed(self, name: str) -> "KLRModule":
        return replace(self, name=name)

    def lift(self, domain) -> "KLRModule":
        return replace(
            self,
            x_mats=tuple(m.lift(domain) for m in self.x_mats),
            tau_mats=tuple(m.lift(domain) for m in self.tau_mats),
            domain=domain,
            origin=None,
        )

    def specialize(self, values: Mapping[PolyElement, Any]) -> "KLRModule":
        x_mats = tuple(m.specialize(values) for m in self.x_mats)
        tau_mats = tuple(m.specialize(values) for m in self.tau_mats)
        domains = {m.domain for m in x_mats + tau_mats}
        domain = domains.pop() if len(domains) == 1 else self.domain
        return replace(
            self,
            x_mats=tuple(m.lift(domain) for m in x_mats),
            tau_mats=tuple(m.lift(domain) for m in tau_mats),
            domain=domain,
            origin=None,
        )


@dataclass(frozen=True)
class ModuleMap:
    source: KLRModule
    target: KLRModule
    matrix: Matrix

    @property
    def is_zero(self) -> bool:
        return self.matrix.is_zero

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix)

    __matmul__ = compose

    def image(self) -> Subspace:
        return image_subspace(self.matrix)

    def kernel(self) -> Subspace:
        return kernel_basis(self.matrix)

    @property
    def rank(self) -> int:
        return rank(self.matrix)

    def is_module_map(self) -> bool:
        for (i, j), _ in self.matrix.items():
            if self.target.words[i] != self.source.words[j]:
                return False
        pairs = zip(
            self.source.x_mats + self.source.tau_mats,
            self.target.x_mats + self.target.tau_mats,
        )
        return all(
            (self.matrix @ a - b @ self.matrix).is_zero for a, b in pairs
        )

    def specialize(self, values: Mapping[PolyElement, Any]) -> "ModuleMap":
        return ModuleMap(
            self.source.specialize(values),
            self.target.specialize(values),
            self.matrix.specialize(values),
        )


@dataclass(frozen=True)
class PairModule:
    """e(beta, gamma)L with its commuting R(beta) and R(gamma) actions."""

    first: KLRModule
    second: KLRModule
    indices: Tuple[int, ...]


# # Building blocks


def trivial_module(q: QFamily) -> KLRModule:
    """The one-dimensional R(0)-module."""
    return KLRModule(q, RootVector(), ((),), (), (), name="1")


def letter_module(q: QFamily, i: int) -> KLRModule:
    return KLRModule(
        q,
        RootVector.simple(i),
        ((i,),),
        (Matrix.zeros(1, 1),),
        (),
        name=f"L{i}",
    )


def direct_sum(m: KLRModule, n: KLRModule) -> KLRModule:
    if m.beta != n.beta or m.qfamily != n.qfamily:
        raise RootMismatchError(
            f"cannot add modules over {m.beta} and {n.beta}"
        )
    d = m.dim

    def block(a: Matrix, b: Matrix) -> Matrix:
        items = list(a.items()) + [
            ((i + d, j + d), v) for (i, j), v in b.items()
        ]
        return Matrix.build(d + n.dim, d + n.dim, items, m.domain)

    return KLRModule(
        m.qfamily,
        m.beta,
        m.words + n.words,
        tuple(block(a, b) for a, b in zip(m.x_mats, n.x_mats)),
        tuple(block(a, b) for a, b in zip(m.tau_mats, n.tau_mats)),
        name=f"{m.name}+{n.name}",
        domain=m.domain,
    )


# # Relations


def _per_column(
    m: KLRModule, key, value_for_key
) -> Matrix:
    """Column j is column j of value_for_key(key(word j))."""
    groups: Dict[Any, List[int]] = {}
    for j, word in enumerate(m.words):
        groups.setdefault(key(word), []).append(j)
    items = []
    for group_key, columns in groups.items():
        if group_key is None:
            continue
        full = value_for_key(group_key)
        wanted = set(columns)
        items.extend(((i, j), v) for (i, j), v in full.items() if j in wanted)
    return Matrix.build(m.dim, m.dim, items, m.domain)


def check_relations(m: KLRModule, nilpotent: bool = True) -> Report:
    """Check every defining relation of R(beta) as a matrix identity.

    `nilpotent=False` skips the nilpotency of x_k, which fails on purpose
    for deformed modules specialized away from zero.
    """
    n, d = m.height, m.dim
    problems: List[str] = []

    if len(m.x_mats) != n or len(m.tau_mats) != max(n - 1, 0):
        return Report(("shape:generator-count",))
    for name, mat in m.generators():
        if mat.shape != (d, d):
            problems.append(f"shape:{name}")
    if problems:
        return Report(tuple(problems))

    for index, word in enumerate(m.words):
        if len(word) != n or RootVector.from_word(word) != m.beta:
            problems.append(f"word:{index}")
    if problems:
        return Report(tuple(problems))

    zero = Matrix.zeros(d, d, m.domain)
    operators = list(m.x_mats) + [zero] * 3

    for k in range(1, n + 1):
        if any(m.words[i] != m.words[j] for (i, j), _ in m.x(k).items()):
            problems.append(f"x-word:{k}")
    for k in range(1, n):
        s_k = Permutation.simple(k, n)
        if any(
            m.words[i] != s_k.act_on_word(m.words[j])
            for (i, j), _ in m.tau(k).items()
        ):
            problems.append(f"tau-word:{k}")

    for k, l in itertools.combinations(range(1, n + 1), 2):
        if not (m.x(k) @ m.x(l) - m.x(l) @ m.x(k)).is_zero:
            problems.append(f"x-commute:{k},{l}")

    if nilpotent:
        for k in range(1, n + 1):
            if not (m.x(k) ** d).is_zero:
                problems.append(f"nilpotent:{k}")

    for k, l in itertools.combinations(range(1, n), 2):
        if l - k > 1 and not (
            m.tau(k) @ m.tau(l) - m.tau(l) @ m.tau(k)
        ).is_zero:
            problems.append(f"tau-commute:{k},{l}")

    q = m.qfamily
    for k in range(1, n):
        pair_ops = [operators[k - 1], operators[k], zero]
        rhs = _per_column(
            m,
            lambda word: (word[k - 1], word[k]),
            lambda pair: evaluate_polynomial(
                q.q(*pair), pair_ops, d, m.domain
            ),
        )
        if not (m.tau(k) @ m.tau(k) - rhs).is_zero:
            problems.append(f"tau-square:{k}")

    for k in range(1, n):
        s_k = Permutation.simple(k, n)
        for pos in range(1, n + 1):
            lhs = m.tau(k) @ m.x(pos) - m.x(s_k(pos)) @ m.tau(k)
            rhs = _per_column(
                m,
                lambda word: tau_x_correction(pos, k, word) or None,
                lambda c: Matrix.identity(d, m.domain).scale(c),
            )
            if not (lhs - rhs).is_zero:
                problems.append(f"tau-x:{k},{pos}")

    for k in range(1, n - 1):
        lhs = (
            m.tau(k + 1) @ m.tau(k) @ m.tau(k + 1)
            - m.tau(k) @ m.tau(k + 1) @ m.tau(k)
        )
        triple_ops = [operators[k - 1], operators[k], operators[k + 1]]
        rhs = _per_column(
            m,
            lambda word: (word[k - 1], word[k])
            if word[k - 1] == word[k + 1]
            else None,
            lambda pair: evaluate_polynomial(
                qbar(q, *pair), triple_ops, d, m.domain
            ),
        )
        if not (lhs - rhs).is_zero:
            problems.append(f"braid:{k}")

    if problems:
        logger.debug("%s violates %s", m.name or "module", problems)
    return Report(tuple(problems))


def tau_x_correction(pos: int, k: int, word: Word) -> int:
    """c with (tau_k x_pos - x_{s_k(pos)} tau_k) e(word) = c e(word)."""
    if word[k - 1] != word[k]:
        return 0
    if pos == k:
        return -1
    if pos == k + 1:
        return 1
    return 0


# # Duality and restriction


def dual(m: KLRModule) -> KLRModule:
    # The anti-involution fixes every generator, so each acts by its
    # transpose on the dual basis.
    return replace(
        m,
        x_mats=tuple(a.T for a in m.x_mats),
        tau_mats=tuple(a.T for a in m.tau_mats),
        name=f"{m.name}*",
        origin=None,
    )


def restrict(
    module: KLRModule, beta: RootVector, gamma: RootVector
) -> PairModule:
    if beta.height + gamma.height != module.height:
        raise HeightMismatchError(
            f"ht({beta}) + ht({gamma}) != ht({module.beta})"
        )
    cut = beta.height
    indices = tuple(
        i
        for i, word in enumerate(module.words)
        if RootVector.from_word(word[:cut]) == beta
        and RootVector.from_word(word[cut:]) == gamma
    )

    def part(root, words, x_range, tau_range, suffix) -> KLRModule:
        return KLRModule(
            module.qfamily,
            root,
            tuple(words),
            tuple(module.x(k).submatrix(indices, indices) for k in x_range),
            tuple(
                module.tau(k).submatrix(indices, indices) for k in tau_range
            ),
            name=f"{module.name}|{suffix}",
            domain=module.domain,
        )

    height = module.height
    first = part(
        beta,
        (module.words[i][:cut] for i in indices),
        range(1, cut + 1),
        range(1, cut),
        str(beta),
    )
    second = part(
        gamma,
        (module.words[i][cut:] for i in indices),
        range(cut + 1, height + 1),
        range(cut + 1, height),
        str(gamma),
    )
    return PairModule(first, second, indices)


# # Homomorphisms


def hom_space(m: KLRModule, n: KLRModule) -> List[ModuleMap]:
    """Canonical basis of Hom(m, n), from the intertwining equations."""
    if m.beta != n.beta or m.qfamily != n.qfamily:
        raise RootMismatchError(
            f"no homomorphisms between modules over {m.beta} and {n.beta}"
        )
    unknowns: Dict[Tuple[int, int], int] = {}
    for word, targets in n.word_blocks.items():
        for i in targets:
            for j in m.word_blocks.get(word, ()):
                unknowns[(i, j)] = len(unknowns)
    if not unknowns:
        return []

    by_row: Dict[int, List[int]] = {}
    for i, j in unknowns:
        by_row.setdefault(i, []).append(j)

    equations: Dict[Tuple[int, int, int], Vector] = {}
    generator_pairs = list(
        zip(m.x_mats + m.tau_mats, n.x_mats + n.tau_mats)
    )
    for g, (a, b) in enumerate(generator_pairs):
        # (F a - b F)[i, j] = 0
        for (i, k), var in unknowns.items():
            for j, value in a.entries.get(k, {}).items():
                add_into(equations.setdefault((g, i, j), {}), {var: value})
        for (i, k), value in b.items():
            for j in by_row.get(k, ()):
                var = unknowns[(k, j)]
                add_into(
                    equations.setdefault((g, i, j), {}), {var: -value}
                )
    rows = [eq for eq in equations.values() if eq]
    system = Matrix.build(
        len(rows),
        len(unknowns),
        (((r, var), value) for r, eq in enumerate(rows)
         for var, value in eq.items()),
    )
    solutions = kernel_basis(system)
    positions = list(unknowns)
    maps = []
    for vector in solutions.vectors():
        matrix = Matrix.build(
            n.dim,
            m.dim,
            ((positions[var], value) for var, value in vector.items()),
        )
        maps.append(ModuleMap(m, n, matrix))
    logger.debug(
        "hom(%s, %s): %d unknowns, dimension %d",
        m.name, n.name, len(unknowns), len(maps),
    )
    return maps


def _candidate_maps(
    basis: Sequence[ModuleMap], max_terms: int
) -> Iterator[Matrix]:
    for f in basis:
        yield f.matrix
    if len(basis) > 1:
        total = basis[0].matrix.scale(1)
        for k, f in enumerate(basis[1:], 2):
            total = total + f.matrix.scale(k)
        yield total
    for size in range(2, min(max_terms, len(basis)) + 1):
        for chosen in itertools.combinations(basis, size):
            for coeffs in itertools.product(ISO_COEFFICIENTS, repeat=size):
                total = chosen[0].matrix.scale(coeffs[0])
                for c, f in zip(coeffs[1:], chosen[1:]):
                    total = total + f.matrix.scale(c)
                yield total


def is_isomorphic(
    m: KLRModule, n: KLRModule, settings: Optional[Settings] = None
) -> Tuple[bool, Optional[ModuleMap]]:
    settings = settings or Settings()
    if m.qfamily != n.qfamily or m.beta != n.beta or m.dim != n.dim:
        return False, None
    if Counter(m.words) != Counter(n.words):
        return False, None
    if m.dim == 0:
        return True, ModuleMap(m, n, Matrix.zeros(0, 0))
    forward = hom_space(m, n)
    if not forward or len(hom_space(n, m)) != len(forward):
        return False, None
    for candidate in _candidate_maps(forward, settings.max_iso_search):
        if rank(candidate) == m.dim:
            return True, ModuleMap(m, n, candidate)
    return False, None


# # Submodules and quotients


def invariant_closure(m: KLRModule, vectors: Iterable[Mapping]) -> Subspace:
    """Smallest submodule containing `vectors` (spinning)."""
    echelon = Echelon(m.dim)
    queue: deque = deque()

    def push(vector: Mapping):
        for part in m.split_by_words(vector):
            if echelon.add(part):
                queue.append(part)

    for vector in vectors:
        push(vector)
    actions = [mat for _, mat in m.generators()]
    while queue:
        vector = queue.popleft()
        for mat in actions:
            push(mat.apply(vector))
    return echelon.to_subspace()


def module_from_subspace(
    m: KLRModule, s: Subspace, name: str = ""
) -> Tuple[KLRModule, ModuleMap]:
    """Repackage an invariant subspace as a module with its inclusion."""
    blocks: Dict[Word, Subspace] = {}
    for word, indices in m.word_blocks.items():
        wanted = set(indices)
        blocks[word] = Subspace.from_vectors(
            ({i: v for i, v in vec.items() if i in wanted}
             for vec in s.vectors()),
            m.dim,
        )
    if sum(b.rank for b in blocks.values()) != s.rank:
        raise NotInvariantError("subspace is not a sum of word components")

    basis: List[Vector] = []
    words: List[Word] = []
    offsets: Dict[Word, int] = {}
    for word, block in blocks.items():
        offsets[word] = len(basis)
        basis.extend(block.vectors())
        words.extend([word] * block.rank)

    def restricted(action: Matrix) -> Matrix:
        items = []
        for col, vector in enumerate(basis):
            image = action.apply(vector)
            if not image:
                continue
            word = m.words[next(iter(image))]
            coords = blocks[word].coordinates(image)
            if coords is None:
                raise NotInvariantError("subspace is not invariant")
            items.extend(
                ((offsets[word] + r, col), c)
                for r, c in enumerate(coords)
                if c
            )
        return Matrix.build(len(basis), len(basis), items, m.domain)

    sub = KLRModule(
        m.qfamily,
        m.beta,
        tuple(words),
        tuple(restricted(a) for a in m.x_mats),
        tuple(restricted(a) for a in m.tau_mats),
        name=name or f"sub({m.name})",
        domain=m.domain,
    )
    inclusion = Matrix.from_columns(basis, m.dim)
    return sub, ModuleMap(sub, m, inclusion)


def submodule_spanned(
    m: KLRModule, vectors: Iterable[Mapping]
) -> Tuple[KLRModule, ModuleMap]:
    return module_from_subspace(m, invariant_closure(m, vectors))


def is_invariant(m: KLRModule, s: Subspace) -> bool:
    for vector in s.vectors():
        for part in m.split_by_words(vector):
            if not s.contains_vector(part):
                return False
        for _, mat in m.generators():
            if not s.contains_vector(mat.apply(vector)):
                return False
    return True


def quotient(
    m: KLRModule, s: Subspace, name: str = ""
) -> Tuple[KLRModule, ModuleMap]:
    if not is_invariant(m, s):
        raise NotInvariantError("cannot take the quotient by a non-submodule")
    pivots = set(s.pivots)
    kept = [i for i in range(m.dim) if i not in pivots]
    position = {i: r for r, i in enumerate(kept)}

    def coords(vector: Mapping) -> Vector:
        residual = s.reduce(vector)
        return {position[i]: v for i, v in residual.items()}

    def induced(action: Matrix) -> Matrix:
        items = []
        for col, i in enumerate(kept):
            items.extend(
                ((r, col), v) for r, v in coords(action.column(i)).items()
            )
        return Matrix.build(len(kept), len(kept), items, m.domain)

    quot = KLRModule(
        m.qfamily,
        m.beta,
        tuple(m.words[i] for i in kept),
        tuple(induced(a) for a in m.x_mats),
        tuple(induced(a) for a in m.tau_mats),
        name=name or f"{m.name}/sub",
        domain=m.domain,
    )
    projection = Matrix.from_columns(
        [coords({i: QQ.one}) for i in range(m.dim)], len(kept)
    )
    return quot, ModuleMap(m, quot, projection)
