# CONVOLUTION PRODUCTS AND THE PBW REWRITING ENGINE

import hashlib
import itertools
import json
import logging
import pickle
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.rings import PolyElement

from common.config import Settings
from common.errors import RootMismatchError, SymmetryError
from common.klr import (
    Permutation,
    QFamily,
    Word,
    apply_move,
    braid_path,
    is_symmetric,
    min_coset_reps,
    qbar,
)
from common.linalg import (
    Matrix,
    Scalar,
    Subspace,
    Vector,
    coerce,
    evaluate_polynomial,
    flatten,
    matrix_algebra,
)
from common.module import (
    KLRModule,
    ModuleMap,
    Report,
    tau_x_correction,
    trivial_module,
)

logger = logging.getLogger(__name__)

# tau_{w} x^a e(nu): x stands to the right of tau, so a normal form acts on
# a pure tensor without any further rewriting.
Term = Tuple[Permutation, Tuple[int, ...], Word]
Terms = Dict[Term, Scalar]


def _accumulate(target: Terms, key: Term, value: Scalar):
    total = target.get(key, QQ.zero) + value
    if total:
        target[key] = total
    else:
        target.pop(key, None)


def _add_terms(target: Terms, source: Mapping[Term, Scalar], scale=1):
    for key, value in source.items():
        _accumulate(target, key, scale * value)


# # Algebra elements


@dataclass(frozen=True)
class Generator:
    kind: str
    index: Union[int, Word]

    @classmethod
    def x(cls, k: int) -> "Generator":
        return cls("x", k)

    @classmethod
    def tau(cls, k: int) -> "Generator":
        return cls("tau", k)

    @classmethod
    def e(cls, word: Word) -> "Generator":
        return cls("e", tuple(word))

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


@dataclass(frozen=True)
class NormalFormElement:
    """Sum of c * tau_w x^a e(nu) in R(beta).

    The reduced word used for tau_w is c(w1) c(y) where w = w1 y is the
    factorization for `split`; with split (size, 0) it is the canonical
    reduced word of w.
    """

    size: int
    split: Tuple[int, int]
    terms: Mapping[Term, Scalar] = field(default_factory=dict)

    @classmethod
    def basis_element(
        cls,
        w: Permutation,
        word: Word,
        split: Optional[Tuple[int, int]] = None,
        exponents: Optional[Tuple[int, ...]] = None,
    ) -> "NormalFormElement":
        size = len(word)
        exponents = exponents or (0,) * size
        return cls(
            size,
            split or (size, 0),
            {(w, tuple(exponents), tuple(word)): QQ.one},
        )

    @property
    def is_zero(self) -> bool:
        return not self.terms


class RewritingEngine:
    """Left multiplication of normal forms by generators of R(beta).

    Everything reduces to two memoized products, x_k tau_w e(nu) and
    tau_k tau_w e(nu), computed by induction on the length of w.
    """

    def __init__(
        self,
        qfamily: QFamily,
        size: int,
        split: Optional[Tuple[int, int]] = None,
    ):
        self.qfamily = qfamily
        self.size = size
        self.split = split or (size, 0)
        self.identity = Permutation.identity(size)
        self.no_x = (0,) * size
        self._words: Dict[Permutation, Word] = {}
        self._qbar: Dict[Tuple[int, int], PolyElement] = {}
        self._x_memo: Dict[Tuple[int, Permutation, Word], Terms] = {}
        self._tau_memo: Dict[Tuple[int, Permutation, Word], Terms] = {}

    # Memo persistence

    def cache_key(self) -> str:
        payload = json.dumps(
            [self.qfamily.to_json(), self.size, list(self.split)],
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def load(self, path: Path):
        if not path.exists():
            return
        with path.open("rb") as handle:
            x_memo, tau_memo = pickle.load(handle)
        self._x_memo.update(x_memo)
        self._tau_memo.update(tau_memo)
        logger.debug("loaded %d rewriting entries from %s",
                     len(x_memo) + len(tau_memo), path)

    def dump(self, path: Path):
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as handle:
            pickle.dump((self._x_memo, self._tau_memo), handle)

    # Reduced words

    def normal_word(self, w: Permutation) -> Word:
        if w not in self._words:
            w1, y = w.coset_factorization(self.split[0])
            self._words[w] = w1.canonical_word + y.canonical_word
        return self._words[w]

    def qbar(self, i: int, j: int) -> PolyElement:
        if (i, j) not in self._qbar:
            self._qbar[(i, j)] = qbar(self.qfamily, i, j)
        return self._qbar[(i, j)]

    # Left multiplication

    def multiply(self, generator: Generator, terms: Mapping) -> Terms:
        if generator.kind == "x":
            return self.left_x(generator.index, terms)
        if generator.kind == "tau":
            return self.left_tau(generator.index, terms)
        if generator.kind == "e":
            return {
                key: c
                for key, c in terms.items()
                if key[0].act_on_word(key[2]) == generator.index
            }
        raise ValueError(f"unknown generator {generator}")

    def left_x(self, k: int, terms: Mapping) -> Terms:
        out: Terms = {}
        for (w, a, nu), c in terms.items():
            for (y, b, _), d in self._x_tau(k, w, nu).items():
                exps = tuple(p + q for p, q in zip(a, b))
                _accumulate(out, (y, exps, nu), c * d)
        return out

    def left_tau(self, k: int, terms: Mapping) -> Terms:
        out: Terms = {}
        for (w, a, nu), c in terms.items():
            for (y, b, _), d in self._tau_tau(k, w, nu).items():
                exps = tuple(p + q for p, q in zip(a, b))
                _accumulate(out, (y, exps, nu), c * d)
        return out

    def left_word(self, letters: Sequence[int], terms: Mapping) -> Terms:
        for letter in reversed(letters):
            terms = self.left_tau(letter, terms)
        return dict(terms)

    def left_poly(
        self, poly: PolyElement, positions: Sequence[int], terms: Mapping
    ) -> Terms:
        out: Terms = {}
        for monom, coeff in poly.items():
            part = terms
            for position, exponent in zip(positions, monom):
                for _ in range(exponent):
                    part = self.left_x(position, part)
            _add_terms(out, part, coeff)
        return out

    def _x_tau(self, k: int, w: Permutation, nu: Word) -> Terms:
        """x_k tau_w e(nu)."""
        key = (k, w, nu)
        if key in self._x_memo:
            return self._x_memo[key]
        if w.is_identity:
            exps = tuple(1 if p == k else 0 for p in range(1, self.size + 1))
            result: Terms = {(w, exps, nu): QQ.one}
        else:
            a = self.normal_word(w)[0]
            rest = w.left_multiply(a)
            moved = a + 1 if k == a else a if k == a + 1 else k
            # x_k tau_a = tau_a x_moved - c e(.) on the word of tau_rest e(nu)
            result = self.left_tau(a, self._x_tau(moved, rest, nu))
            c = tau_x_correction(moved, a, rest.act_on_word(nu))
            if c:
                _accumulate(result, (rest, self.no_x, nu), QQ(-c))
        self._x_memo[key] = result
        return result

    def _tau_tau(self, k: int, w: Permutation, nu: Word) -> Terms:
        """tau_k tau_w e(nu)."""
        key = (k, w, nu)
        if key in self._tau_memo:
            return self._tau_memo[key]
        shorter_or_longer = w.left_multiply(k)
        if shorter_or_longer.length > w.length:
            longer = shorter_or_longer
            result: Terms = {(longer, self.no_x, nu): QQ.one}
            _add_terms(
                result,
                self._braid_difference(
                    (k,) + self.normal_word(w), self.normal_word(longer), nu
                ),
            )
        else:
            shorter = shorter_or_longer
            # tau_w = tau_k tau_shorter + corrections, and tau_k^2 = Q
            corrections = self._braid_difference(
                self.normal_word(w), (k,) + self.normal_word(shorter), nu
            )
            middle = shorter.act_on_word(nu)
            square = self.qfamily.q(middle[k - 1], middle[k])
            result = self.left_poly(
                square, (k, k + 1), {(shorter, self.no_x, nu): QQ.one}
            )
            _add_terms(result, self.left_tau(k, corrections))
        self._tau_memo[key] = result
        return result

    def _braid_difference(self, source: Word, target: Word, nu: Word) -> Terms:
        """tau_source e(nu) - tau_target e(nu) for two reduced words."""
        total: Terms = {}
        current = tuple(source)
        for move in braid_path(source, target):
            position, old, _ = move
            if len(old) == 3:
                a = min(old)
                prefix, suffix = current[:position], current[position + 3:]
                right = Permutation.from_word(
                    suffix, self.size
                ).act_on_word(nu)
                if right[a - 1] == right[a + 1]:
                    # tau_a tau_a+1 tau_a = tau_a+1 tau_a tau_a+1 - Qbar
                    sign = -1 if old == (a, a + 1, a) else 1
                    term = self.left_word(
                        suffix, {(self.identity, self.no_x, nu): QQ.one}
                    )
                    term = self.left_poly(
                        self.qbar(right[a - 1], right[a]),
                        (a, a + 1, a + 2),
                        term,
                    )
                    _add_terms(total, self.left_word(prefix, term), sign)
            current = apply_move(current, move)
        return total


def pbw_reduce(
    generator: Generator, element: NormalFormElement, qfamily: QFamily
) -> NormalFormElement:
    """generator * element, rewritten into normal form."""
    engine = RewritingEngine(qfamily, element.size, element.split)
    return NormalFormElement(
        element.size, element.split, engine.multiply(generator, element.terms)
    )


# # Convolution of modules


@dataclass(frozen=True)
class ConvBasisLabel:
    coset: Permutation
    left: int
    right: int


@dataclass(frozen=True)
class ConvolutionOrigin:
    first: KLRModule
    second: KLRModule
    labels: Tuple[ConvBasisLabel, ...]

    @cached_property
    def index(self) -> Dict[ConvBasisLabel, int]:
        return {label: k for k, label in enumerate(self.labels)}


class _InducedAction:
    """Acts with normal forms on the pure tensors of M (x) N."""

    def __init__(self, m: KLRModule, n: KLRModule, domain, labels):
        self.m, self.n = m, n
        self.cut = m.height
        self.domain = domain
        self.index = {label: k for k, label in enumerate(labels)}
        self._columns: Dict[Tuple[str, int], List[Vector]] = {}

    def _cols(self, kind: str, k: int) -> List[Vector]:
        if (kind, k) not in self._columns:
            if k <= self.cut and not (kind == "tau" and k == self.cut):
                module, local = self.m, k
            else:
                module, local = self.n, k - self.cut
            mat = module.x(local) if kind == "x" else module.tau(local)
            self._columns[(kind, k)] = mat.lift(self.domain).columns()
        return self._columns[(kind, k)]

    def _internal(self, kind: str, k: int, tensor: Dict) -> Dict:
        left = k <= self.cut and not (kind == "tau" and k == self.cut)
        cols = self._cols(kind, k)
        out: Dict = {}
        for (i, j), c in tensor.items():
            column = cols[i] if left else cols[j]
            for r, value in column.items():
                key = (r, j) if left else (i, r)
                total = out.get(key, self.domain.zero) + c * value
                if total:
                    out[key] = total
                else:
                    out.pop(key, None)
        return out

    def apply(self, terms: Mapping[Term, Scalar], i: int, j: int) -> Vector:
        word = self.m.words[i] + self.n.words[j]
        out: Vector = {}
        for (w, exps, nu), c in terms.items():
            if nu != word:
                continue
            tensor = {(i, j): coerce(c, self.domain)}
            for k, exponent in enumerate(exps, 1):
                for _ in range(exponent):
                    tensor = self._internal("x", k, tensor)
            w1, y = w.coset_factorization(self.cut)
            for letter in reversed(y.canonical_word):
                tensor = self._internal("tau", letter, tensor)
            for (a, b), value in tensor.items():
                row = self.index[ConvBasisLabel(w1, a, b)]
                total = out.get(row, self.domain.zero) + value
                if total:
                    out[row] = total
                else:
                    out.pop(row, None)
        return out


def _common_domain(m: KLRModule, n: KLRModule):
    return m.domain if m.domain == n.domain or n.domain == QQ else n.domain


def convolve(
    m: KLRModule, n: KLRModule, settings: Optional[Settings] = None
) -> KLRModule:
    """M o N on the basis tau_w(u_i (x) v_j), w in S_{m,n}."""
    if m.qfamily != n.qfamily:
        raise RootMismatchError("convolution needs a common Q family")
    settings = settings or Settings.from_env()
    domain = _common_domain(m, n)
    size = m.height + n.height
    reps = [w for w, _ in min_coset_reps(m.height, n.height)]
    labels = tuple(
        ConvBasisLabel(w, i, j)
        for w in reps
        for i in range(m.dim)
        for j in range(n.dim)
    )
    words = tuple(
        label.coset.act_on_word(m.words[label.left] + n.words[label.right])
        for label in labels
    )

    engine = RewritingEngine(m.qfamily, size, (m.height, n.height))
    cache_path = None
    if settings.cache_dir is not None:
        cache_path = settings.cache_dir / f"rewrite-{engine.cache_key()}.pkl"
        engine.load(cache_path)

    action = _InducedAction(m, n, domain, labels)

    def matrix_of(generator: Generator) -> Matrix:
        columns = []
        for label in labels:
            start = {
                (label.coset, engine.no_x, m.words[label.left]
                 + n.words[label.right]): QQ.one
            }
            product = engine.multiply(generator, start)
            columns.append(action.apply(product, label.left, label.right))
        return Matrix.from_columns(columns, len(labels), domain)

    x_mats = tuple(matrix_of(Generator.x(k)) for k in range(1, size + 1))
    tau_mats = tuple(matrix_of(Generator.tau(k)) for k in range(1, size))
    if cache_path is not None:
        engine.dump(cache_path)
    logger.debug(
        "convolved %s and %s: dim %d, %d rewriting entries",
        m.name, n.name, len(labels),
        len(engine._x_memo) + len(engine._tau_memo),
    )
    return KLRModule(
        m.qfamily,
        m.beta + n.beta,
        words,
        x_mats,
        tau_mats,
        name=f"({m.name}∘{n.name})",
        domain=domain,
        origin=ConvolutionOrigin(m, n, labels),
    )


def convolution_power(m: KLRModule, k: int) -> KLRModule:
    if k == 0:
        return trivial_module(m.qfamily)
    result = m
    for _ in range(k - 1):
        result = convolve(result, m)
    return result.renamed(f"{m.name}^{k}")


def embed_pure_tensor(
    m: KLRModule,
    n: KLRModule,
    u: Mapping[int, Scalar],
    v: Mapping[int, Scalar],
) -> Vector:
    """u (x) v in the identity component of convolve(m, n)."""
    out: Vector = {}
    for i, a in u.items():
        for j, b in v.items():
            if a * b:
                out[i * n.dim + j] = a * b
    return out


def _origin(conv: KLRModule) -> ConvolutionOrigin:
    if not isinstance(conv.origin, ConvolutionOrigin):
        raise ValueError(f"{conv.name} was not built by convolve")
    return conv.origin


def apply_tau_word(module: KLRModule, letters: Sequence[int], vector: Vector):
    for letter in reversed(letters):
        vector = module.tau(letter).apply(vector)
    return vector


# # Maps between convolutions


def convolve_maps(
    f: ModuleMap,
    g: ModuleMap,
    source: Optional[KLRModule] = None,
    target: Optional[KLRModule] = None,
) -> ModuleMap:
    """f o g : A o B -> A' o B', tau_w(u (x) v) -> tau_w(f u (x) g v)."""
    source = source or convolve(f.source, g.source)
    target = target or convolve(f.target, g.target)
    index = _origin(target).index
    f_cols = f.matrix.lift(target.domain).columns()
    g_cols = g.matrix.lift(target.domain).columns()
    columns = []
    for label in _origin(source).labels:
        column: Vector = {}
        for i, a in f_cols[label.left].items():
            for j, b in g_cols[label.right].items():
                column[index[ConvBasisLabel(label.coset, i, j)]] = a * b
        columns.append(column)
    return ModuleMap(
        source,
        target,
        Matrix.from_columns(columns, target.dim, target.domain),
    )


def associator(
    a: KLRModule,
    b: KLRModule,
    c: KLRModule,
    source: Optional[KLRModule] = None,
    target: Optional[KLRModule] = None,
) -> ModuleMap:
    """(A o B) o C -> A o (B o C), the identity on pure tensors."""
    source = source or convolve(convolve(a, b), c)
    target = target or convolve(a, convolve(b, c))
    ab = _origin(source).first
    bc = _origin(target).second
    identity_bc = Permutation.identity(b.height + c.height)
    identity = Permutation.identity(target.height)
    columns = []
    for label in _origin(source).labels:
        inner = _origin(ab).labels[label.left]
        q = _origin(bc).index[
            ConvBasisLabel(identity_bc, inner.right, label.right)
        ]
        position = _origin(target).index[
            ConvBasisLabel(identity, inner.left, q)
        ]
        start = {position: QQ.one}
        vector = apply_tau_word(target, inner.coset.canonical_word, start)
        columns.append(
            apply_tau_word(target, label.coset.canonical_word, vector)
        )
    return ModuleMap(
        source, target, Matrix.from_columns(columns, target.dim, target.domain)
    )


def associator_inverse(
    a: KLRModule,
    b: KLRModule,
    c: KLRModule,
    source: Optional[KLRModule] = None,
    target: Optional[KLRModule] = None,
) -> ModuleMap:
    """A o (B o C) -> (A o B) o C."""
    source = source or convolve(a, convolve(b, c))
    target = target or convolve(convolve(a, b), c)
    bc = _origin(source).second
    ab = _origin(target).first
    identity_ab = Permutation.identity(a.height + b.height)
    identity = Permutation.identity(target.height)
    shift = a.height
    columns = []
    for label in _origin(source).labels:
        inner = _origin(bc).labels[label.right]
        p = _origin(ab).index[
            ConvBasisLabel(identity_ab, label.left, inner.left)
        ]
        position = _origin(target).index[
            ConvBasisLabel(identity, p, inner.right)
        ]
        start = {position: QQ.one}
        shifted = tuple(
            letter + shift for letter in inner.coset.canonical_word
        )
        vector = apply_tau_word(target, shifted, start)
        columns.append(
            apply_tau_word(target, label.coset.canonical_word, vector)
        )
    return ModuleMap(
        source, target, Matrix.from_columns(columns, target.dim, target.domain)
    )


# # Tilde generators


@dataclass(frozen=True)
class TildeOperators:
    x: Mapping[Tuple[int, int], Matrix]
    tau: Mapping[int, Matrix]


def _column_filter(conv: KLRModule, mat: Matrix, keep) -> Matrix:
    wanted = {j for j, word in enumerate(conv.words) if keep(word)}
    return Matrix.build(
        mat.rows,
        mat.cols,
        (((i, j), v) for (i, j), v in mat.items() if j in wanted),
        mat.domain,
    )


def _x_tilde(conv: KLRModule, a: int, b: int, common: frozenset) -> Matrix:
    return _column_filter(
        conv,
        conv.x(a) - conv.x(b),
        lambda word: word[a - 1] in common and word[b - 1] in common,
    )


def tilde_operators(conv: KLRModule) -> TildeOperators:
    """x~_{a,b} and tau~_c on a convolution N o M.

    The first factor plays the part of N and the second of M; x~ is
    supported on letters common to both supports and tau~_c on words
    with nu_c in supp(N) and nu_{c+1} in supp(M).
    """
    origin = _origin(conv)
    first, second = origin.first.beta.support, origin.second.beta.support
    common = first & second
    size = conv.height
    x = {
        (a, b): _x_tilde(conv, a, b, common)
        for a, b in itertools.combinations(range(1, size + 1), 2)
    }
    tau = {
        c: _column_filter(
            conv,
            conv.tau(c),
            lambda word, c=c: word[c - 1] in first and word[c] in second,
        )
        for c in range(1, size)
    }
    return TildeOperators(x, tau)


def check_tilde_relations(conv: KLRModule) -> Report:
    """The commutation relations of x~ and tau~, and closure of their
    right-hand sides in the algebra generated by x~ and e(nu)."""
    origin = _origin(conv)
    q = conv.qfamily
    for factor in (origin.first, origin.second):
        if not is_symmetric(q, factor.beta):
            raise SymmetryError(f"{factor.name} is over a non-symmetric root")
    first, second = origin.first.beta.support, origin.second.beta.support
    common = first & second
    size, dim = conv.height, conv.dim
    ops = tilde_operators(conv)
    zero = Matrix.zeros(dim, dim, conv.domain)
    problems: List[str] = []
    right_hand_sides: List[Tuple[str, Matrix]] = []

    def diagonal(value_of) -> Matrix:
        return Matrix.build(
            dim,
            dim,
            (((j, j), value_of(word)) for j, word in enumerate(conv.words)),
            conv.domain,
        )

    def polynomial_part(poly_of, positions, keep) -> Matrix:
        items = []
        operators = [conv.x(p) for p in positions]
        for word, indices in conv.word_blocks.items():
            if not keep(word):
                continue
            poly = poly_of(word)
            value = evaluate_polynomial(
                poly, operators + [zero] * (3 - len(operators)), dim,
                conv.domain,
            )
            wanted = set(indices)
            items.extend(
                ((i, j), v) for (i, j), v in value.items() if j in wanted
            )
        return Matrix.build(dim, dim, items, conv.domain)

    for a, b in itertools.combinations(range(1, size + 1), 2):
        for c in range(1, size):
            s_c = Permutation.simple(c, size)
            a2, b2 = s_c(a), s_c(b)
            lhs = ops.x[(a, b)] @ ops.tau[c] - ops.tau[c] @ _x_tilde(
                conv, a2, b2, common
            )
            weight = (
                (a == c + 1) - (a == c) - (b == c + 1) + (b == c)
            )

            def correction(word, c=c, a2=a2, b2=b2):
                if (
                    word[c - 1] == word[c]
                    and word[c - 1] in first
                    and word[c] in second
                    and word[a2 - 1] in common
                    and word[b2 - 1] in common
                ):
                    return weight
                return 0

            rhs = diagonal(correction)
            right_hand_sides.append((f"tilde-x-tau:{a},{b},{c}", rhs))
            if not (lhs - rhs).is_zero:
                problems.append(f"tilde-x-tau:{a},{b},{c}")

    for c in range(1, size):
        lhs = ops.tau[c] @ ops.tau[c]
        rhs = polynomial_part(
            lambda word: q.q(word[c - 1], word[c]),
            (c, c + 1),
            lambda word: word[c - 1] in common and word[c] in common,
        )
        right_hand_sides.append((f"tilde-square:{c}", rhs))
        if not (lhs - rhs).is_zero:
            problems.append(f"tilde-square:{c}")

    for c, d in itertools.combinations(range(1, size), 2):
        if d - c > 1 and not (
            ops.tau[c] @ ops.tau[d] - ops.tau[d] @ ops.tau[c]
        ).is_zero:
            problems.append(f"tilde-commute:{c},{d}")

    for c in range(1, size - 1):
        t1, t2 = ops.tau[c], ops.tau[c + 1]
        lhs = t2 @ t1 @ t2 - t1 @ t2 @ t1
        rhs = polynomial_part(
            lambda word: qbar(q, word[c - 1], word[c]),
            (c, c + 1, c + 2),
            lambda word: word[c - 1] == word[c + 1]
            and word[c - 1] in first
            and word[c] in common
            and word[c + 1] in second,
        )
        right_hand_sides.append((f"tilde-braid:{c}", rhs))
        if not (lhs - rhs).is_zero:
            problems.append(f"tilde-braid:{c}")

    if conv.domain == QQ and dim:
        idempotents = [conv.idempotent(word) for word in conv.word_blocks]
        algebra = Subspace.from_vectors(
            (flatten(mat) for mat in matrix_algebra(
                list(ops.x.values()) + idempotents, dim
            )),
            dim * dim,
        )
        for name, rhs in right_hand_sides:
            if not algebra.contains_vector(flatten(rhs)):
                problems.append(f"tilde-algebra:{name}")
    return Report(tuple(problems))
