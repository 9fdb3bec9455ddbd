from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Tuple

from common import __version__
from common.convolution import ConvolutionOrigin
from common.errors import UnknownModuleError
from common.klr import QFamily, RootVector
from common.linalg import Matrix, parse_scalar
from common.module import KLRModule, Report
from common.util import format_words, ordered_pairs, sparse_triplets


def _matrix_from_triplets(triplets: Sequence, dim: int) -> Matrix:
    return Matrix.build(
        dim,
        dim,
        (((int(i), int(j)), parse_scalar(value)) for i, j, value in triplets),
    )


def module_to_json(m: KLRModule) -> dict:
    """Explicit matrices as sparse [row, col, "p/q"] triplets."""
    data = {
        "name": m.name,
        "beta": m.beta.to_json(),
        "words": format_words(m.words),
        "x": [sparse_triplets(a) for a in m.x_mats],
        "tau": [sparse_triplets(a) for a in m.tau_mats],
    }
    if isinstance(m.origin, ConvolutionOrigin):
        data["conv_of"] = [m.origin.first.name, m.origin.second.name]
    return data


def module_from_json(data: Mapping, qfamily: QFamily) -> KLRModule:
    words = tuple(tuple(int(letter) for letter in word)
                  for word in data["words"])
    dim = len(words)
    if "dim" in data and int(data["dim"]) != dim:
        raise ValueError(
            f"module {data.get('name')!r} declares dim {data['dim']} "
            f"but lists {dim} words"
        )
    if isinstance(data.get("beta"), list):
        # multiplicities in index-set order
        counts = zip(qfamily.index_set, map(int, data["beta"]))
        beta = RootVector.of(dict(counts))
    elif "beta" in data:
        beta = RootVector.from_json(data["beta"])
    elif words:
        beta = RootVector.from_word(words[0])
    else:
        raise ValueError(f"module {data.get('name')!r} needs a root")
    return KLRModule(
        qfamily,
        beta,
        words,
        tuple(_matrix_from_triplets(t, dim) for t in data.get("x", [])),
        tuple(_matrix_from_triplets(t, dim) for t in data.get("tau", [])),
        name=str(data["name"]),
    )


@dataclass(frozen=True)
class Corpus:
    name: str
    qfamily: QFamily
    modules: Mapping[str, KLRModule]
    pairs: Tuple[Tuple[str, str], ...] = ()
    triples: Tuple[Tuple[str, str, str], ...] = ()
    digest: str = ""
    # check_relations per module, filled in on load
    validation: Mapping[str, Report] = field(default_factory=dict)

    def module(self, name: str) -> KLRModule:
        try:
            return self.modules[name]
        except KeyError:
            raise UnknownModuleError(name) from None

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.validation.values())


@dataclass
class RunReport:
    """Results of one command run, keyed by command name."""

    corpus: str
    corpus_hash: str
    version: str = __version__
    results: Dict[str, List[dict]] = field(default_factory=dict)
    passed: bool = True

    def add(self, command: str, entries: List[dict], passed: bool):
        self.results.setdefault(command, []).extend(entries)
        self.passed = self.passed and passed

    def to_json(self) -> dict:
        return {
            "corpus": self.corpus,
            "corpus_hash": self.corpus_hash,
            "version": self.version,
            "results": {
                command: sorted(
                    entries, key=lambda e: (str(e.get("pair", "")),
                                            str(e.get("module", "")))
                )
                for command, entries in self.results.items()
            },
            "passed": self.passed,
        }


def find_modules(
    corpus: Corpus, names: Sequence[str]
) -> List[KLRModule]:
    return [corpus.module(name) for name in names]


def default_pairs(corpus: Corpus) -> List[Tuple[str, str]]:
    if corpus.pairs:
        return list(corpus.pairs)
    return ordered_pairs(
        [name for name, m in corpus.modules.items() if m.height]
    )
