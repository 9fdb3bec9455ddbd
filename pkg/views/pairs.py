import logging
from typing import Callable, Optional, Tuple

from common.config import Settings
from common.errors import PreconditionError, SymmetryError
from common.module import KLRModule
from common.rmatrix import check_hexagons, renormalized_r
from common.structure import verify_main_theorem
from common.util import format_matrix
from views.typing import PairStatus, RMatrixReport

logger = logging.getLogger(__name__)

_PRECONDITION_STATUS = {
    PreconditionError.M_NOT_SIMPLE: PairStatus.M_NOT_SIMPLE,
    PreconditionError.M_IS_ZERO: PairStatus.M_NOT_SIMPLE,
    PreconditionError.R_NOT_SCALAR: PairStatus.NOT_REAL,
    PreconditionError.N_NOT_SIMPLE: PairStatus.N_NOT_SIMPLE,
}


def rmatrix_view(
    m: KLRModule, n: KLRModule, settings: Optional[Settings] = None
) -> RMatrixReport:
    r = renormalized_r(m, n, settings)
    return RMatrixReport(
        pair=(m.name, n.name),
        s=r.s,
        t=r.t,
        r_matrix=tuple(tuple(row) for row in format_matrix(r.matrix)),
        rank=r.rank,
        image_words=tuple(r.image_words()),
    )


def verify_view(
    m: KLRModule, n: KLRModule, settings: Optional[Settings] = None
) -> PairStatus:
    pair = (m.name, n.name)
    try:
        report = verify_main_theorem(m, n, settings)
    except SymmetryError as err:
        return PairStatus(pair, PairStatus.NOT_SYMMETRIC, message=str(err))
    except PreconditionError as err:
        return PairStatus(
            pair, _PRECONDITION_STATUS[err.reason], message=err.reason
        )
    if report.passed:
        return PairStatus(pair, PairStatus.PASS, report)
    failed = tuple(claim.anchor for claim in report.failed_claims())
    logger.warning("pair %s fails %s", pair, failed)
    return PairStatus(pair, PairStatus.FAIL, report, violations=failed)


def hexagon_view(
    triple: Tuple[KLRModule, KLRModule, KLRModule],
) -> PairStatus:
    names = tuple(m.name for m in triple)
    result = check_hexagons(*triple)
    status = PairStatus.PASS if result.passed else PairStatus.FAIL
    return PairStatus(names, status, violations=result.violations)


def make_pair_view(
    kind: str, settings: Optional[Settings] = None
) -> Callable[[KLRModule, KLRModule], object]:
    """Per-pair runner for the rmatrix and verify commands."""
    views = {"rmatrix": rmatrix_view, "verify": verify_view}
    if kind not in views:
        raise ValueError(f"no pair view called {kind!r}")
    view = views[kind]

    def run(m: KLRModule, n: KLRModule):
        logger.info("%s %s %s", kind, m.name, n.name)
        return view(m, n, settings)

    return run
