# ROOTS, WORDS, POLYNOMIAL FAMILIES AND PERMUTATIONS

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Tuple

from sympy import QQ
from sympy.polys.rings import PolyElement, ring
from sympy.utilities.iterables import multiset_permutations

from common.linalg import format_poly, parse_poly

# Q_ij lives in u, v; the braid deviation Q-bar also uses w.
KLR_RING, u, v, w = ring("u,v,w", QQ)

Word = Tuple[int, ...]


# # Root lattice


@dataclass(frozen=True)
class RootVector:
    """beta = sum n_i alpha_i, stored as sorted (i, n_i) with n_i > 0."""

    multiplicities: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "RootVector":
        if any(n < 0 for n in mapping.values()):
            raise ValueError(f"negative multiplicity in {dict(mapping)}")
        return cls(tuple(sorted((i, n) for i, n in mapping.items() if n)))

    @classmethod
    def simple(cls, i: int) -> "RootVector":
        return cls(((i, 1),))

    @classmethod
    def from_word(cls, word: Iterable[int]) -> "RootVector":
        counts: Dict[int, int] = {}
        for letter in word:
            counts[letter] = counts.get(letter, 0) + 1
        return cls.of(counts)

    def __getitem__(self, i: int) -> int:
        return dict(self.multiplicities).get(i, 0)

    @property
    def height(self) -> int:
        return sum(n for _, n in self.multiplicities)

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, _ in self.multiplicities)

    @property
    def is_zero(self) -> bool:
        return not self.multiplicities

    def __add__(self, other: "RootVector") -> "RootVector":
        total = dict(self.multiplicities)
        for i, n in other.multiplicities:
            total[i] = total.get(i, 0) + n
        return RootVector.of(total)

    def __sub__(self, other: "RootVector") -> "RootVector":
        total = dict(self.multiplicities)
        for i, n in other.multiplicities:
            total[i] = total.get(i, 0) - n
        return RootVector.of(total)

    def __mul__(self, k: int) -> "RootVector":
        return RootVector.of({i: k * n for i, n in self.multiplicities})

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return "+".join(
            f"a{i}" if n == 1 else f"{n}a{i}" for i, n in self.multiplicities
        )

    def to_json(self) -> Dict[str, int]:
        return {str(i): n for i, n in self.multiplicities}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> "RootVector":
        return cls.of({int(i): int(n) for i, n in data.items()})


def words_of(beta: RootVector) -> List[Word]:
    """All words with letter multiset beta, in lexicographic order.

    >>> words_of(RootVector.of({1: 1, 2: 1}))
    [(1, 2), (2, 1)]
    """
    if beta.is_zero:
        return [()]
    letters = [i for i, n in beta.multiplicities for _ in range(n)]
    return sorted(tuple(p) for p in multiset_permutations(letters))


# # Polynomial families


def swap_uv(poly: PolyElement) -> PolyElement:
    return KLR_RING.from_dict(
        {(b, a, c): coeff for (a, b, c), coeff in poly.items()}
    )


@dataclass(frozen=True)
class QFamily:
    """The polynomials Q_ij(u, v), one per unordered pair {i, j}.

    Only i < j is stored; Q_ji(u, v) = Q_ij(v, u) and Q_ii = 0 are derived.
    """

    index_set: Tuple[int, ...]
    polys: Tuple[Tuple[Tuple[int, int], PolyElement], ...]

    @classmethod
    def of(
        cls,
        index_set: Iterable[int],
        polys: Mapping[Tuple[int, int], PolyElement],
    ) -> "QFamily":
        index_set = tuple(sorted(index_set))
        stored = {}
        for (i, j), poly in polys.items():
            if i == j:
                if poly:
                    raise ValueError(f"Q_{i}{i} must vanish")
                continue
            if i > j:
                i, j, poly = j, i, swap_uv(poly)
            if i not in index_set or j not in index_set:
                raise ValueError(f"pair ({i}, {j}) outside the index set")
            if any(monom[2] for monom in poly.keys()):
                raise ValueError(f"Q_{i}{j} may only involve u and v")
            stored[(i, j)] = poly
        missing = [
            pair
            for pair in itertools.combinations(index_set, 2)
            if pair not in stored
        ]
        if missing:
            raise ValueError(f"no polynomial given for pairs {missing}")
        return cls(index_set, tuple(sorted(stored.items())))

    def q(self, i: int, j: int) -> PolyElement:
        if i == j:
            return KLR_RING.zero
        if i < j:
            return dict(self.polys)[(i, j)]
        return swap_uv(dict(self.polys)[(j, i)])

    def qbar(self, i: int, j: int) -> PolyElement:
        return qbar(self, i, j)

    def to_json(self) -> dict:
        return {
            "field": "Q",
            "index_set": list(self.index_set),
            "q_polys": {
                f"{i},{j}": format_poly(poly, 2)
                for (i, j), poly in self.polys
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "QFamily":
        if data.get("field", "Q") != "Q":
            raise ValueError(f"unsupported field {data['field']!r}")
        polys = {}
        for key, terms in data.get("q_polys", {}).items():
            i, j = (int(part) for part in key.split(","))
            polys[(i, j)] = parse_poly(terms, KLR_RING)
        return cls.of(data["index_set"], polys)


def qbar(q: QFamily, i: int, j: int) -> PolyElement:
    """(Q_ij(u, v) - Q_ij(w, v)) / (u - w), an exact quotient."""
    numerator = q.q(i, j) - q.q(i, j).compose(u, w)
    quotient, remainder = divmod(numerator, u - w)
    if remainder:
        raise ArithmeticError(f"Q-bar division for ({i}, {j}) is not exact")
    return quotient


def is_symmetric(q: QFamily, beta: RootVector) -> bool:
    """Every Q_ij on supp(beta) is a polynomial in u - v.

    Over QQ this is the same as d/du + d/dv killing Q_ij.
    """
    support = sorted(beta.support)
    for i, j in itertools.combinations(support, 2):
        poly = q.q(i, j)
        if poly.diff(u) + poly.diff(v):
            return False
    return True


# # Symmetric group


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1, ..., n} in one-line notation.

    Composition is of functions: (a * b)(k) = a(b(k)).

    >>> Permutation.simple(1, 3) * Permutation.simple(2, 3)
    Permutation(one_line=(2, 3, 1))
    """

    one_line: Tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def simple(cls, k: int, n: int) -> "Permutation":
        if not 1 <= k < n:
            raise ValueError(f"s_{k} is not in S_{n}")
        values = list(range(1, n + 1))
        values[k - 1], values[k] = values[k], values[k - 1]
        return cls(tuple(values))

    @classmethod
    def from_word(cls, word: Iterable[int], n: int) -> "Permutation":
        """The product s_{a1} s_{a2} ... of the letters of `word`."""
        result = cls.identity(n)
        for letter in reversed(tuple(word)):
            result = cls.simple(letter, n) * result
        return result

    @property
    def size(self) -> int:
        return len(self.one_line)

    def __call__(self, k: int) -> int:
        return self.one_line[k - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(
            tuple(self(other(k)) for k in range(1, other.size + 1))
        )

    def inverse(self) -> "Permutation":
        values = [0] * self.size
        for k, image in enumerate(self.one_line, 1):
            values[image - 1] = k
        return Permutation(tuple(values))

    @property
    def is_identity(self) -> bool:
        return all(k == image for k, image in enumerate(self.one_line, 1))

    @property
    def length(self) -> int:
        return sum(
            1
            for a, b in itertools.combinations(self.one_line, 2)
            if a > b
        )

    def left_descents(self) -> List[int]:
        position = self.inverse()
        return [
            a for a in range(1, self.size) if position(a) > position(a + 1)
        ]

    def left_multiply(self, k: int) -> "Permutation":
        """s_k * self: swap the values k and k + 1."""
        return Permutation(
            tuple(
                k + 1 if x == k else k if x == k + 1 else x
                for x in self.one_line
            )
        )

    @property
    def canonical_word(self) -> Word:
        return _canonical_word(self.one_line)

    def act_on_word(self, word: Word) -> Word:
        """Place permutation: the letter at position k moves to self(k)."""
        result = [0] * len(word)
        for k, letter in enumerate(word, 1):
            result[self(k) - 1] = letter
        return tuple(result)

    def is_min_coset_rep(self, m: int) -> bool:
        head, tail = self.one_line[:m], self.one_line[m:]
        return list(head) == sorted(head) and list(tail) == sorted(tail)

    def coset_factorization(
        self, m: int
    ) -> Tuple["Permutation", "Permutation"]:
        """self = w1 * y, w1 in S_{m,n}, y in S_m x S_n."""
        w1 = Permutation(
            tuple(sorted(self.one_line[:m]) + sorted(self.one_line[m:]))
        )
        return w1, w1.inverse() * self


@lru_cache(maxsize=None)
def _canonical_word(one_line: Tuple[int, ...]) -> Word:
    # The smallest left descent first; what remains is again the
    # lexicographically smallest word of the shorter permutation.
    perm = Permutation(one_line)
    descents = perm.left_descents()
    if not descents:
        return ()
    a = descents[0]
    return (a,) + _canonical_word(perm.left_multiply(a).one_line)


def min_coset_reps(m: int, n: int) -> List[Tuple[Permutation, Word]]:
    """S_{m,n}, ordered by length then one-line notation.

    >>> [rep.one_line for rep, _ in min_coset_reps(1, 1)]
    [(1, 2), (2, 1)]
    """
    size = m + n
    reps = []
    for head in itertools.combinations(range(1, size + 1), m):
        tail = tuple(k for k in range(1, size + 1) if k not in head)
        reps.append(Permutation(head + tail))
    reps.sort(key=lambda p: (p.length, p.one_line))
    return [(rep, rep.canonical_word) for rep in reps]


def block_transposition(m: int, n: int) -> Permutation:
    """w[m,n]: k -> k + n on the first m places, k -> k - m after."""
    return Permutation(
        tuple(k + n if k <= m else k - m for k in range(1, m + n + 1))
    )


# # Reduced words

# (position, old letters, new letters), applied to the current word.
Move = Tuple[int, Word, Word]


def _bring_to_front(
    word: Word, a: int, offset: int
) -> Tuple[Word, List[Move]]:
    """Rewrite the reduced `word` into one starting with the descent a."""
    if not word:
        raise ValueError(f"{a} is not a left descent")
    if word[0] == a:
        return word, []
    b = word[0]
    rest, moves = _bring_to_front(word[1:], a, offset + 1)
    if abs(a - b) > 1:
        moves.append((offset, (b, a), (a, b)))
        return (a, b) + rest[1:], moves
    tail, more = _bring_to_front(rest[1:], b, offset + 2)
    moves.extend(more)
    moves.append((offset, (b, a, b), (a, b, a)))
    return (a, b, a) + tail[1:], moves


def braid_path(source: Word, target: Word) -> List[Move]:
    """Commutation and braid moves turning one reduced word into another.

    Both words must be reduced words of the same permutation.
    """
    current = tuple(source)
    moves: List[Move] = []
    for position, letter in enumerate(target):
        segment, segment_moves = _bring_to_front(
            current[position:], letter, position
        )
        moves.extend(segment_moves)
        current = current[:position] + segment
    if current != tuple(target):
        raise ValueError(f"{source} and {target} are not braid equivalent")
    return moves


def apply_move(word: Word, move: Move) -> Word:
    position, old, new = move
    if word[position:position + len(old)] != old:
        raise ValueError(f"move {move} does not apply to {word}")
    return word[:position] + new + word[position + len(old):]
