from dataclasses import dataclass, field
from typing import List, Optional, Tuple


@dataclass(frozen=True)
class Claim:
    """One checked assertion; `anchor` names what was asserted."""

    anchor: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"anchor": self.anchor, "passed": self.passed,
                "detail": self.detail}


@dataclass(frozen=True)
class StructureReport:
    pair: Tuple[str, str]
    claims: Tuple[Claim, ...]
    socle_dim: int
    head_dim: int
    end_dim: int
    simple: bool
    commute: bool

    @property
    def passed(self) -> bool:
        return all(claim.passed for claim in self.claims)

    def failed_claims(self) -> List[Claim]:
        return [claim for claim in self.claims if not claim.passed]

    def to_json(self) -> dict:
        return {
            "pair": list(self.pair),
            "claims": [claim.to_json() for claim in self.claims],
            "socle_dim": self.socle_dim,
            "head_dim": self.head_dim,
            "end_dim": self.end_dim,
            "simple": self.simple,
            "commute": self.commute,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class RMatrixReport:
    pair: Tuple[str, str]
    s: Optional[int]
    t: Optional[int]
    r_matrix: Tuple[Tuple[str, ...], ...]
    rank: int
    image_words: Tuple[Tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {
            "pair": list(self.pair),
            "s": self.s,
            "t": self.t,
            "r_matrix": [list(row) for row in self.r_matrix],
            "rank": self.rank,
            "image_words": [list(word) for word in self.image_words],
        }


@dataclass(frozen=True)
class PairStatus:
    PASS = "pass"
    FAIL = "fail"
    NOT_REAL = "precondition: not real"
    M_NOT_SIMPLE = "precondition: m not simple"
    N_NOT_SIMPLE = "precondition: n not simple"
    NOT_SYMMETRIC = "skipped: not symmetric"

    pair: Tuple[str, str]
    status: str
    report: Optional[StructureReport] = None
    message: str = ""
    violations: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def is_failure(self) -> bool:
        return self.status == self.FAIL

    def to_json(self) -> dict:
        data = {
            "pair": list(self.pair),
            "status": self.status,
            "message": self.message,
        }
        if self.report is not None:
            data["report"] = self.report.to_json()
        if self.violations:
            data["violations"] = list(self.violations)
        return data
