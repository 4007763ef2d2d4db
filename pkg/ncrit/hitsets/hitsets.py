import json
from typing import Optional

from ncrit.assembly import hitting_set
from ncrit.fsgen import HittingSet, schedule
from ncrit.types import ScheduleRecord
from ncrit.utils import DeskParams, dumps, run_in_thread_async


def build(n: int, s: int, height: int, desk: Optional[DeskParams] = None) -> HittingSet:
    """Build the rational hitting set for the class (n, s, height)."""
    return hitting_set(n, s, height, desk)


async def abuild(n: int, s: int, height: int, desk: Optional[DeskParams] = None) -> HittingSet:
    """Asynchronously build a hitting set on the default executor."""
    return await run_in_thread_async(None, hitting_set, n, s, height, desk)


def write(hs: HittingSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(hs.to_dict()))


def read(path: str) -> HittingSet:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict) or "header" not in data or "points" not in data:
        raise ValueError(f"{path} is not a hitting-set file")
    return HittingSet.from_dict(data)


def full_schedule(n: int, s: int, height: int) -> ScheduleRecord:
    """The full-size parameter schedule for the class; print-only, nothing is materialized."""
    r = 2 * s
    dtilde = 1
    while dtilde < 2 * s * max(height, 1):
        dtilde *= 2
    return schedule(n, r, dtilde, mode="paper-faithful").to_dict()
