# EXACT LINEAR ALGEBRA

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import (
    Any,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

# Modular rank certificate
import numpy as np

# Exact rationals, sparse polynomials and echelon forms
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement, ring

from common.config import DEFAULT_MODULUS
from common.errors import DimensionMismatchError

logger = logging.getLogger(__name__)

# Spectral parameters of deformed modules share one polynomial ring, so
# deformed matrices never need a change of ring.
SPECTRAL, z, z1, z2 = ring("z,z1,z2", QQ)

# Minimal polynomials of endomorphisms.
T_RING, t = ring("t", QQ)

INFINITE = math.inf

Scalar = Any
Vector = Dict[int, Scalar]


# # Scalars


def parse_scalar(text: Union[str, int]) -> Scalar:
    """Read a rational written as "p/q" or "p".

    >>> parse_scalar("-3/6")
    -1/2
    """
    text = str(text).strip()
    try:
        if "/" in text:
            numerator, denominator = text.split("/")
            return QQ(int(numerator), int(denominator))
        return QQ(int(text))
    except (ValueError, ZeroDivisionError) as err:
        raise ValueError(f"not a rational number: {text!r}") from err


def format_scalar(value: Scalar) -> str:
    value = QQ.convert(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def coerce(value: Scalar, domain) -> Scalar:
    """Bring an int, rational or polynomial into `domain` (QQ or SPECTRAL)."""
    if domain is QQ or domain == QQ:
        return QQ.convert(value)
    return domain(value)


def format_poly(poly: PolyElement, nvars: Optional[int] = None) -> list:
    nvars = poly.ring.ngens if nvars is None else nvars
    return [
        [format_scalar(coeff), list(monom[:nvars])]
        for monom, coeff in sorted(poly.items())
    ]


def parse_poly(data: Iterable, poly_ring) -> PolyElement:
    terms: Dict[Tuple[int, ...], Scalar] = {}
    for coeff, exponents in data:
        exponents = tuple(int(e) for e in exponents)
        if len(exponents) > poly_ring.ngens:
            raise ValueError(f"too many exponents in {exponents}")
        exponents += (0,) * (poly_ring.ngens - len(exponents))
        terms[exponents] = terms.get(exponents, QQ.zero) + parse_scalar(
            coeff
        )
    return poly_ring.from_dict({m: c for m, c in terms.items() if c})


# # Sparse vectors


def add_into(target: Vector, source: Mapping[int, Scalar], scale=None):
    for index, value in source.items():
        if scale is not None:
            value = scale * value
        total = target.get(index)
        total = value if total is None else total + value
        if total:
            target[index] = total
        else:
            target.pop(index, None)


def scale_vector(vector: Mapping[int, Scalar], scale: Scalar) -> Vector:
    if not scale:
        return {}
    return {i: scale * v for i, v in vector.items() if scale * v}


def dense(vector: Mapping[int, Scalar], dim: int) -> Tuple[Scalar, ...]:
    return tuple(vector.get(i, QQ.zero) for i in range(dim))


def sparse(values: Sequence[Scalar]) -> Vector:
    return {i: v for i, v in enumerate(values) if v}


# # Matrices


@dataclass(frozen=True)
class Matrix:
    """Sparse row-major matrix over QQ or over SPECTRAL."""

    rows: int
    cols: int
    entries: Mapping[int, Mapping[int, Scalar]] = field(
        default_factory=dict
    )
    domain: Any = QQ

    @classmethod
    def build(
        cls,
        rows: int,
        cols: int,
        items: Iterable[Tuple[Tuple[int, int], Scalar]],
        domain=QQ,
    ) -> "Matrix":
        entries: Dict[int, Vector] = {}
        for (i, j), value in items:
            if not 0 <= i < rows or not 0 <= j < cols:
                raise DimensionMismatchError(
                    f"entry ({i}, {j}) outside a {rows}x{cols} matrix"
                )
            add_into(entries.setdefault(i, {}), {j: coerce(value, domain)})
        return cls(
            rows, cols, {i: r for i, r in entries.items() if r}, domain
        )

    @classmethod
    def zeros(cls, rows: int, cols: int, domain=QQ) -> "Matrix":
        return cls(rows, cols, {}, domain)

    @classmethod
    def identity(cls, n: int, domain=QQ) -> "Matrix":
        return cls(n, n, {i: {i: domain.one} for i in range(n)}, domain)

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[Scalar]], cols: Optional[int] = None,
        domain=QQ,
    ) -> "Matrix":
        cols = len(rows[0]) if cols is None and rows else (cols or 0)
        return cls.build(
            len(rows),
            cols,
            (
                ((i, j), v)
                for i, row in enumerate(rows)
                for j, v in enumerate(row)
                if v
            ),
            domain,
        )

    @classmethod
    def from_columns(
        cls, columns: Sequence[Mapping[int, Scalar]], rows: int, domain=QQ
    ) -> "Matrix":
        return cls.build(
            rows,
            len(columns),
            (((i, j), v) for j, col in enumerate(columns)
             for i, v in col.items()),
            domain,
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def __getitem__(self, key: Tuple[int, int]) -> Scalar:
        i, j = key
        return self.entries.get(i, {}).get(j, self.domain.zero)

    def row(self, i: int) -> Vector:
        return dict(self.entries.get(i, {}))

    def column(self, j: int) -> Vector:
        return {
            i: row[j] for i, row in self.entries.items() if j in row
        }

    def columns(self) -> List[Vector]:
        cols: List[Vector] = [{} for _ in range(self.cols)]
        for i, row in self.entries.items():
            for j, v in row.items():
                cols[j][i] = v
        return cols

    def to_rows(self) -> List[List[Scalar]]:
        return [
            [self[i, j] for j in range(self.cols)] for i in range(self.rows)
        ]

    def lift(self, domain) -> "Matrix":
        if domain == self.domain:
            return self
        return Matrix.build(
            self.rows, self.cols, self.items(), domain
        )

    def items(self):
        for i, row in self.entries.items():
            for j, v in row.items():
                yield (i, j), v

    def _common(self, other: "Matrix") -> Tuple["Matrix", "Matrix"]:
        if self.domain == other.domain:
            return self, other
        if self.domain == QQ:
            return self.lift(other.domain), other
        return self, other.lift(self.domain)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        a, b = self._common(other)
        entries: Dict[int, Vector] = {}
        for i, row in a.entries.items():
            acc: Vector = {}
            for k, x in row.items():
                other_row = b.entries.get(k)
                if other_row:
                    add_into(acc, other_row, x)
            if acc:
                entries[i] = acc
        return Matrix(a.rows, b.cols, entries, a.domain)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(
                f"cannot add {self.shape} and {other.shape}"
            )
        a, b = self._common(other)
        entries = {i: dict(row) for i, row in a.entries.items()}
        for i, row in b.entries.items():
            add_into(entries.setdefault(i, {}), row)
        return Matrix(
            a.rows, a.cols, {i: r for i, r in entries.items() if r}, a.domain
        )

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c: Scalar) -> "Matrix":
        c = coerce(c, self.domain)
        if not c:
            return Matrix.zeros(self.rows, self.cols, self.domain)
        return Matrix(
            self.rows,
            self.cols,
            {i: {j: c * v for j, v in row.items()}
             for i, row in self.entries.items()},
            self.domain,
        )

    def transpose(self) -> "Matrix":
        entries: Dict[int, Vector] = {}
        for (i, j), v in self.items():
            entries.setdefault(j, {})[i] = v
        return Matrix(self.cols, self.rows, entries, self.domain)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __pow__(self, k: int) -> "Matrix":
        result = Matrix.identity(self.rows, self.domain)
        for _ in range(k):
            result = self @ result
        return result

    def apply(self, vector: Mapping[int, Scalar]) -> Vector:
        out: Vector = {}
        for i, row in self.entries.items():
            total = self.domain.zero
            for k, v in row.items():
                if k in vector:
                    total += v * vector[k]
            if total:
                out[i] = total
        return out

    def submatrix(
        self, row_indices: Sequence[int], col_indices: Sequence[int]
    ) -> "Matrix":
        col_pos = {c: n for n, c in enumerate(col_indices)}
        entries: Dict[int, Vector] = {}
        for n, i in enumerate(row_indices):
            row = {
                col_pos[j]: v
                for j, v in self.entries.get(i, {}).items()
                if j in col_pos
            }
            if row:
                entries[n] = row
        return Matrix(len(row_indices), len(col_indices), entries,
                      self.domain)

    def is_scalar(self) -> bool:
        """True iff the matrix is c * identity for some scalar c."""
        if self.rows != self.cols:
            return False
        if self.rows == 0:
            return True
        c = self[0, 0]
        return self == Matrix.identity(self.rows, self.domain).scale(c)

    # Polynomial entries

    def specialize(self, values: Mapping[PolyElement, Scalar]) -> "Matrix":
        """Substitute spectral variables; constant results drop to QQ."""
        if self.domain == QQ:
            return self
        substituted = {
            key: value.subs(list(values.items()))
            for key, value in self.items()
        }
        if all(v.is_ground for v in substituted.values()):
            return Matrix.build(
                self.rows,
                self.cols,
                (
                    (key, dict(v).get(SPECTRAL.zero_monom, QQ.zero))
                    for key, v in substituted.items()
                ),
                QQ,
            )
        return Matrix.build(
            self.rows, self.cols, substituted.items(), self.domain
        )

    def z_coefficient(self, power: int, var: PolyElement = z) -> "Matrix":
        """Coefficient matrix of var**power, as a matrix over SPECTRAL."""
        index = SPECTRAL.gens.index(var)
        items = []
        for key, value in self.lift(SPECTRAL).items():
            terms = {}
            for monom, coeff in value.items():
                if monom[index] == power:
                    reduced = list(monom)
                    reduced[index] = 0
                    terms[tuple(reduced)] = coeff
            if terms:
                items.append((key, SPECTRAL.from_dict(terms)))
        return Matrix.build(self.rows, self.cols, items, SPECTRAL)

    def to_domain_matrix(self) -> DomainMatrix:
        if self.domain != QQ:
            raise TypeError("echelon forms are computed over QQ only")
        return DomainMatrix(
            {i: dict(row) for i, row in self.entries.items()},
            self.shape,
            QQ,
        )


def flatten(m: Matrix) -> Vector:
    return {i * m.cols + j: v for (i, j), v in m.items()}


def unflatten(vector: Mapping[int, Scalar], rows: int, cols: int,
              domain=QQ) -> Matrix:
    return Matrix.build(
        rows, cols, (((k // cols, k % cols), v) for k, v in vector.items()),
        domain,
    )


def trace_product(a: Matrix, b: Matrix) -> Scalar:
    total = a.domain.zero
    for (i, k), v in a.items():
        w = b.entries.get(k, {}).get(i)
        if w:
            total += v * w
    return total


def evaluate_polynomial(
    poly: PolyElement, operators: Sequence[Matrix], dim: int, domain=QQ
) -> Matrix:
    """poly(operators[0], operators[1], ...) for commuting operators."""
    result = Matrix.zeros(dim, dim, domain)
    cache: Dict[Tuple[int, int], Matrix] = {}

    def power(var: int, exponent: int) -> Matrix:
        if (var, exponent) not in cache:
            cache[(var, exponent)] = operators[var] ** exponent
        return cache[(var, exponent)]

    for monom, coeff in poly.items():
        term = Matrix.identity(dim, domain).scale(coeff)
        for var, exponent in enumerate(monom):
            if exponent:
                term = power(var, exponent) @ term
        result = result + term
    return result


def _rref_rows(m: Matrix) -> Tuple[List[List[Scalar]], Tuple[int, ...]]:
    if m.rows == 0 or m.cols == 0:
        return [], ()
    reduced, pivots = m.to_domain_matrix().rref()
    rows = reduced.to_list()
    return [rows[r] for r in range(len(pivots))], tuple(pivots)


def rank(m: Matrix) -> int:
    return len(_rref_rows(m)[1])


# # Subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of QQ^dim stored in canonical echelon form.

    Every basis vector has its last nonzero coordinate (the pivot) equal
    to 1 and all other basis vectors vanish there; vectors are sorted by
    pivot. Equal subspaces therefore have identical stored bases.
    """

    dim: int
    basis: Tuple[Tuple[Scalar, ...], ...] = ()

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(dim, ())

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls(
            dim,
            tuple(
                tuple(QQ.one if i == j else QQ.zero for i in range(dim))
                for j in range(dim)
            ),
        )

    @classmethod
    def from_vectors(
        cls, vectors: Iterable[Union[Mapping[int, Scalar], Sequence]],
        dim: int,
    ) -> "Subspace":
        rows: Dict[int, Vector] = {}
        for vector in vectors:
            if not isinstance(vector, Mapping):
                vector = sparse(vector)
            reversed_row = {
                dim - 1 - i: QQ.convert(v) for i, v in vector.items() if v
            }
            if reversed_row:
                rows[len(rows)] = reversed_row
        if not rows:
            return cls.zero(dim)
        reduced, pivots = (
            DomainMatrix(rows, (len(rows), dim), QQ).rref()
        )
        table = reduced.to_list()
        basis = [tuple(reversed(table[r])) for r in range(len(pivots))]
        return cls(dim, tuple(sorted(basis, key=_last_nonzero)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(_last_nonzero(b) for b in self.basis)

    def vectors(self) -> List[Vector]:
        return [sparse(b) for b in self.basis]

    def reduce(self, vector: Mapping[int, Scalar]) -> Vector:
        """Residual of `vector` modulo the subspace; zero at every pivot."""
        residual = dict(vector)
        for b, p in zip(self.basis, self.pivots):
            c = residual.get(p)
            if c:
                add_into(residual, sparse(b), -c)
        return residual

    def coordinates(
        self, vector: Mapping[int, Scalar]
    ) -> Optional[List[Scalar]]:
        coords = [vector.get(p, QQ.zero) for p in self.pivots]
        if self.reduce(vector):
            return None
        return coords

    def contains_vector(self, vector: Mapping[int, Scalar]) -> bool:
        return not self.reduce(vector)

    def contains(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(self.contains_vector(v) for v in other.vectors())

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        return Subspace.from_vectors(
            self.vectors() + other.vectors(), self.dim
        )

    def intersection(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        return annihilator(annihilator(self) + annihilator(other))


def _last_nonzero(vector: Sequence[Scalar]) -> int:
    for i in range(len(vector) - 1, -1, -1):
        if vector[i]:
            return i
    return -1


def _check_ambient(a: Subspace, b: Subspace):
    if a.dim != b.dim:
        raise DimensionMismatchError(
            f"subspaces of dimension {a.dim} and {b.dim}"
        )


def kernel_basis(m: Matrix) -> Subspace:
    """Null space {v : m v = 0} in canonical echelon form.

    >>> kernel_basis(Matrix.from_rows([[1, 2], [2, 4]])).basis
    ((-2, 1),)
    """
    rows, pivots = _rref_rows(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vector = [QQ.zero] * m.cols
        vector[free] = QQ.one
        for row, p in zip(rows, pivots):
            if row[free]:
                vector[p] = -row[free]
        basis.append(tuple(vector))
    return Subspace(m.cols, tuple(basis))


def annihilator(s: Subspace) -> Subspace:
    if s.rank == 0:
        return Subspace.full(s.dim)
    return kernel_basis(Matrix.from_rows(s.basis, s.dim))


def image_subspace(m: Matrix) -> Subspace:
    return Subspace.from_vectors(m.columns(), m.rows)


def subspace_ops(a: Subspace, b: Subspace) -> Tuple[Subspace, Subspace, bool]:
    _check_ambient(a, b)
    return a + b, a.intersection(b), a.contains(b)


def z_valuation(m: Matrix, var: PolyElement = z) -> Union[int, float]:
    """Least power of `var` dividing every entry; INFINITE for zero."""
    if m.is_zero:
        return INFINITE
    if m.domain == QQ:
        return 0
    index = SPECTRAL.gens.index(var)
    return min(
        monom[index] for _, value in m.items() for monom in value.keys()
    )


def minimal_polynomial(m: Matrix) -> PolyElement:
    n = m.rows
    powers: List[Vector] = []
    current = Matrix.identity(n)
    for degree in range(n + 1):
        powers.append(flatten(current))
        relation = kernel_basis(Matrix.from_columns(powers, n * n))
        if relation.rank:
            coeffs = relation.basis[0]
            return sum(
                (t ** k * c for k, c in enumerate(coeffs) if c), T_RING.zero
            )
        current = m @ current
    raise AssertionError("Cayley-Hamilton bound exceeded")


# # Incremental echelon (spinning and algebra closure)


class Echelon:
    """Fully reduced echelon basis grown one vector at a time.

    The pivot of each stored row is its last nonzero coordinate, so
    `to_subspace` yields the canonical form without a second reduction.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: Dict[int, Vector] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vector: Mapping[int, Scalar]) -> Vector:
        residual = dict(vector)
        for p in [p for p in residual if p in self._rows]:
            c = residual.get(p)
            if c:
                add_into(residual, self._rows[p], -c)
        return residual

    def add(self, vector: Mapping[int, Scalar]) -> bool:
        residual = self.reduce(vector)
        if not residual:
            return False
        pivot = max(residual)
        inverse = 1 / QQ.convert(residual[pivot])
        residual = scale_vector(residual, inverse)
        for row in self._rows.values():
            c = row.get(pivot)
            if c:
                add_into(row, residual, -c)
        self._rows[pivot] = residual
        return True

    def to_subspace(self) -> Subspace:
        return Subspace(
            self.dim,
            tuple(dense(self._rows[p], self.dim) for p in sorted(self._rows)),
        )


def matrix_algebra(generators: Sequence[Matrix], dim: int) -> List[Matrix]:
    """Basis of the unital algebra generated by `generators`."""
    if dim == 0:
        return []
    echelon = Echelon(dim * dim)
    identity = Matrix.identity(dim)
    echelon.add(flatten(identity))
    found = [identity]
    queue = deque(found)
    while queue:
        a = queue.popleft()
        for g in generators:
            product = g @ a
            if echelon.add(flatten(product)):
                found.append(product)
                queue.append(product)
    logger.debug("algebra closure: dim %d in Mat(%d)", len(found), dim)
    return [unflatten(v, dim, dim) for v in echelon.to_subspace().vectors()]


# # Modular certificate


def _residues(m: Matrix, modulus: int) -> Optional[np.ndarray]:
    out = np.zeros(m.shape, dtype=np.int64)
    for (i, j), value in m.items():
        value = QQ.convert(value)
        denominator = int(value.denominator)
        if denominator % modulus == 0:
            return None
        out[i, j] = (
            int(value.numerator) * pow(denominator, modulus - 2, modulus)
        ) % modulus
    return out


def full_algebra_certificate(
    generators: Sequence[Matrix], dim: int, modulus: int = DEFAULT_MODULUS
) -> bool:
    """True proves the rational algebra generated is all of Mat(dim).

    The rank of the mod-p reductions of a set of rational matrices never
    exceeds the rational rank, so reaching dim**2 mod p is conclusive.
    False is inconclusive.
    """
    if dim == 0:
        return False
    gens = [_residues(g, modulus) for g in generators]
    if any(g is None for g in gens):
        return False
    target = dim * dim
    basis = np.zeros((0, target), dtype=np.int64)
    pivots: List[int] = []

    def insert(vector: np.ndarray) -> bool:
        nonlocal basis
        if pivots:
            vector = (vector - vector[pivots] @ basis) % modulus
        nonzero = np.flatnonzero(vector)
        if nonzero.size == 0:
            return False
        q = int(nonzero[0])
        vector = vector * pow(int(vector[q]), modulus - 2, modulus) % modulus
        if pivots:
            basis = (basis - np.outer(basis[:, q], vector)) % modulus
        basis = np.vstack([basis, vector])
        pivots.append(q)
        return True

    identity = np.eye(dim, dtype=np.int64)
    insert(identity.ravel())
    frontier = [identity]
    while frontier and len(pivots) < target:
        next_frontier = []
        for a in frontier:
            for g in gens:
                product = (g @ a) % modulus
                if insert(product.ravel()):
                    next_frontier.append(product)
        frontier = next_frontier
    logger.debug("mod %d closure rank %d of %d", modulus, len(pivots), target)
    return len(pivots) == target
