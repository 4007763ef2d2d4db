from typing import Any, List, Literal, Optional, TypedDict

VerdictStatus = Literal["ZERO", "NONZERO", "LIKELY_ZERO"]


class VerdictReport(TypedDict, total=False):
    verdict: VerdictStatus
    source: str
    witness_index: Optional[int]
    witness_point: Optional[List[List[List[Any]]]]
    certifications_checked: int


class ScheduleRecord(TypedDict):
    n: int
    r: int
    d: int
    dtilde: int
    m: int
    kappa: int
    L: int
    ell: int
    a: List[int]
    mu: int
    mode: str


class CorpusRow(TypedDict):
    name: str
    expected: str
    hitset: str
    random: str
    passed: bool
