# SMALL SHARED HELPERS

import hashlib
import json
from typing import Iterable, List, Sequence, Tuple

from common.linalg import Matrix, format_scalar


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def dump_json(data) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    text = json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)
    return text + "\n"


def format_matrix(m: Matrix) -> List[List[str]]:
    """Dense rows of "p/q" strings for a rational matrix."""
    return [[format_scalar(value) for value in row] for row in m.to_rows()]


def sparse_triplets(m: Matrix) -> List[list]:
    return [
        [i, j, format_scalar(value)] for (i, j), value in sorted(m.items())
    ]


def format_words(words: Iterable[Sequence[int]]) -> List[List[int]]:
    return [list(word) for word in words]


def ordered_pairs(names: Sequence[str]) -> List[Tuple[str, str]]:
    return [(a, b) for a in names for b in names]
