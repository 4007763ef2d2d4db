from typing import Optional

from ncrit.fsgen import HittingSet
from ncrit.hitsets.hitsets import abuild, build, full_schedule, read, write
from ncrit.types import ScheduleRecord
from ncrit.utils import DeskParams, run_in_thread_async


class HittingSetManager:
    def __init__(self, desk: Optional[DeskParams] = None):
        self.desk = desk or DeskParams.from_env()

    def build(self, n: int, s: int, height: int) -> HittingSet:
        return build(n, s, height, self.desk)

    def write(self, hs: HittingSet, path: str) -> None:
        write(hs, path)

    def read(self, path: str) -> HittingSet:
        return read(path)

    def full_schedule(self, n: int, s: int, height: int) -> ScheduleRecord:
        return full_schedule(n, s, height)


class AsyncHittingSetManager:
    def __init__(self, desk: Optional[DeskParams] = None):
        self.desk = desk or DeskParams.from_env()

    async def build(self, n: int, s: int, height: int) -> HittingSet:
        return await abuild(n, s, height, self.desk)

    async def write(self, hs: HittingSet, path: str) -> None:
        await run_in_thread_async(None, write, hs, path)

    async def read(self, path: str) -> HittingSet:
        return await run_in_thread_async(None, read, path)


__all__ = ["HittingSetManager", "AsyncHittingSetManager"]
