from typing import Any, Dict, List, Literal, TypedDict

from typing_extensions import Required

FieldName = Literal["Q", "Qw", "K"]


class HittingSetHeader(TypedDict, total=False):
    n: Required[int]
    height: int
    dim: Required[int]
    field: Required[FieldName]
    ell: int
    kappa: int
    mode: str
    count: Required[int]
    s: int
    r: int
    dtilde: int
    L: int
    blockdim: int
    derivation: Dict[str, Any]


class CertificationRecord(TypedDict, total=False):
    det_nonzero: bool
    sigma_chain_ok: bool
    in_D: bool
    dets: List[Any]
    seed: Dict[str, Any]
    assignment: List[str]
    backend: str
    certifies: List[int]
    source: str


class HittingSetFile(TypedDict):
    header: HittingSetHeader
    points: List[List[List[List[Any]]]]
    certifications: List[CertificationRecord]
