import json
import logging
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

from common.config import Settings
from common.convolution import convolve
from common.data import Corpus, module_from_json
from common.errors import CorpusError, KLRError
from common.klr import QFamily
from common.module import KLRModule, Report, check_relations
from common.util import digest

logger = logging.getLogger(__name__)


def _pairs(data, width: int, key: str):
    entries = tuple(tuple(str(name) for name in entry)
                    for entry in data.get(key, []))
    for entry in entries:
        if len(entry) != width:
            raise CorpusError(f"{key} entry {list(entry)} needs {width} names")
    return entries


def _qfamily_data(data: Mapping) -> Mapping:
    """The polynomial family, nested under "qfamily" or at the top level."""
    if "qfamily" in data:
        return data["qfamily"]
    if "index_set" in data:
        return {key: data[key] for key in ("field", "index_set", "q_polys")
                if key in data}
    if data.get("modules"):
        raise CorpusError("corpus has modules but no index_set")
    return {"index_set": []}


def _check_letters(m: KLRModule, qfamily: QFamily):
    allowed = set(qfamily.index_set)
    letters = set(m.beta.support).union(*(set(w) for w in m.words))
    unknown = sorted(letters - allowed)
    if unknown:
        raise CorpusError(
            f"module {m.name!r} uses letters {unknown} outside the index set "
            f"{list(qfamily.index_set)}"
        )


# Load a corpus file, build derived modules and check every relation.
# With strict=False relation failures are recorded instead of raised.
def initialise_corpus(
    path: Union[str, Path],
    settings: Optional[Settings] = None,
    strict: bool = True,
) -> Corpus:
    settings = settings or Settings.from_env()
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as err:
        raise CorpusError(f"cannot read {path}: {err.strerror}") from err
    try:
        data = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as err:
        raise CorpusError(f"{path} is not UTF-8") from err
    except json.JSONDecodeError as err:
        raise CorpusError(
            f"{path}: {err.msg}", line=err.lineno, column=err.colno
        ) from err
    if not isinstance(data, dict):
        raise CorpusError(f"{path}: top level must be an object")

    modules: Dict[str, KLRModule] = {}
    validation: Dict[str, Report] = {}

    def admit(name: str, m: KLRModule):
        report = check_relations(m)
        validation[name] = report
        if not report.passed:
            if strict:
                raise CorpusError(
                    f"{path}: relations fail for {name!r}: "
                    f"{', '.join(report.violations)}"
                )
            logger.warning("relation failures in %s for %s: %s",
                           path, name, report.violations)
        modules[name] = m

    try:
        qfamily = QFamily.from_json(_qfamily_data(data))
        for entry in data.get("modules", []):
            name = str(entry["name"])
            if name in validation:
                raise CorpusError(f"module {name!r} defined twice")
            if "conv_of" in entry and "words" not in entry:
                first, second = (str(n) for n in entry["conv_of"])
                missing = [n for n in (first, second) if n not in validation]
                if missing:
                    raise CorpusError(
                        f"{name!r} convolves undefined modules {missing}"
                    )
                broken = [n for n in (first, second)
                          if not validation[n].passed]
                if broken:
                    # only reachable when strict is off
                    validation[name] = Report(
                        tuple(f"factor:{n}" for n in broken)
                    )
                    continue
                admit(name, convolve(
                    modules[first], modules[second], settings
                ).renamed(name))
            else:
                m = module_from_json(entry, qfamily)
                _check_letters(m, qfamily)
                admit(name, m)
        pairs = _pairs(data, 2, "pairs")
        triples = _pairs(data, 3, "triples")
    except CorpusError:
        raise
    except KLRError as err:
        raise CorpusError(f"{path}: {err}") from err
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise CorpusError(f"{path}: malformed corpus ({err!r})") from err

    for entry in pairs + triples:
        for name in entry:
            if name not in validation:
                raise CorpusError(
                    f"{path}: unknown module {name!r} in a test list"
                )

    logger.info("loaded %d modules from %s", len(modules), path)
    return Corpus(
        name=str(data.get("name", path.stem)),
        qfamily=qfamily,
        modules=modules,
        pairs=pairs,
        triples=triples,
        digest=digest(raw),
        validation=validation,
    )
