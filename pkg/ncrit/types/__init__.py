from .hitting_set import CertificationRecord, HittingSetFile, HittingSetHeader
from .report import CorpusRow, ScheduleRecord, VerdictReport

__all__ = [
    "CertificationRecord",
    "CorpusRow",
    "HittingSetFile",
    "HittingSetHeader",
    "ScheduleRecord",
    "VerdictReport",
]
