import asyncio
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Union

import nest_asyncio
import numpy as np

from ncrit.assembly import Verdict, ablackbox_test, formula_oracle, random_oracle_test, verdicts_agree
from ncrit.formula import EvalResult, Formula, corpus, evaluate, parse
from ncrit.fsgen import HittingSet
from ncrit.hitsets import AsyncHittingSetManager, HittingSetManager
from ncrit.ncrit_mixins import MAP_HEIGHT_TO_BUILDER, NcritMixin
from ncrit.types import CorpusRow
from ncrit.utils import DeskParams, run_in_thread_async


def corpus_row(name: str, expected: str, verdicts: Dict[str, Verdict]) -> CorpusRow:
    hitset, rand = verdicts["hitset"], verdicts["random"]
    passed = hitset.is_zero == (expected == "identity") and verdicts_agree(hitset, rand)
    return {"name": name, "expected": expected, "hitset": hitset.status, "random": rand.status, "passed": passed}


class IdentityTester(NcritMixin):
    def __init__(
        self,
        desk: Optional[DeskParams] = None,
        enable_tracing: bool = False,
        span_log: str = None,
    ):
        self.desk = desk or DeskParams.from_env()
        self.hitsets = HittingSetManager(self.desk)
        self.tracer_provider, self.tracer = self._initialize_tracer(span_log, enable_tracing)

    def _test_internal(
        self, *, formula: Formula, n: int, s: int, height: int, mode: str, seed: int, max_dim: int, trials: int, hs
    ) -> Dict[str, Verdict]:
        verdicts = {}
        if mode in ("hitset", "both"):
            coroutine = AsyncIdentityTester(self.desk)._hitset_verdict(formula, n, s, height, hs)
            try:
                loop = asyncio.get_running_loop()
            except RuntimeError:
                loop = None

            if loop and loop.is_running():
                nest_asyncio.apply()
            verdicts["hitset"] = asyncio.run(coroutine)
        if mode in ("random", "both"):
            verdicts["random"] = random_oracle_test(formula, max_dim=max_dim, trials=trials, seed=seed, n=n)
        return verdicts

    def test(
        self,
        formula: Union[str, Formula],
        n: Optional[int] = None,
        s: Optional[int] = None,
        height: Optional[int] = None,
        mode: str = "hitset",
        seed: int = 0,
        max_dim: int = 4,
        trials: int = 50,
        hs: Optional[HittingSet] = None,
    ) -> Dict[str, Verdict]:
        params = self._prepare_test_params(formula=formula, n=n, s=s, height=height, mode=mode)
        _test_internal_kwargs = {**params, "seed": seed, "max_dim": max_dim, "trials": trials, "hs": hs}

        if self.tracer:
            with self.tracer.start_as_current_span("ncrit test") as span:
                span.set_attribute("formula", str(params["formula"]))
                span.set_attribute("function_input", str({k: v for k, v in params.items() if k != "formula"}))
                result = self._test_internal(**_test_internal_kwargs)
                span.set_attribute("function_output", str({k: v.status for k, v in result.items()}))
                return result
        else:
            return self._test_internal(**_test_internal_kwargs)

    def evaluate(self, formula: Union[str, Formula], point: Sequence[np.ndarray]) -> EvalResult:
        if isinstance(formula, str):
            formula = parse(formula)
        return evaluate(formula, point)

    def hitset(self, n: int, s: int, height: int) -> HittingSet:
        if self.tracer:
            with self.tracer.start_as_current_span("ncrit hitset") as span:
                span.set_attribute("function_input", str({"n": n, "s": s, "height": height}))
                span.set_attribute("stage", MAP_HEIGHT_TO_BUILDER[height]["name"])
                hs = self.hitsets.build(n, s, height)
                span.set_attribute("function_output", str({"count": len(hs), "dim": hs.dim}))
                return hs
        return self.hitsets.build(n, s, height)

    def corpus(self, seed: int = 0, max_dim: int = 4, trials: int = 50) -> List[CorpusRow]:
        rows = []
        for entry in corpus():
            if self.tracer:
                with self.tracer.start_as_current_span("ncrit corpus") as span:
                    span.set_attribute("function_input", entry.name)
                    verdicts = self.test(entry.formula, mode="both", seed=seed, max_dim=max_dim, trials=trials)
                    row = corpus_row(entry.name, entry.expected, verdicts)
                    span.set_attribute("function_output", str(row))
            else:
                verdicts = self.test(entry.formula, mode="both", seed=seed, max_dim=max_dim, trials=trials)
                row = corpus_row(entry.name, entry.expected, verdicts)
            rows.append(row)
        return rows


class AsyncIdentityTester(NcritMixin):
    def __init__(
        self,
        desk: Optional[DeskParams] = None,
        enable_tracing: bool = False,
        span_log: str = None,
    ):
        self.desk = desk or DeskParams.from_env()
        self.hitsets = AsyncHittingSetManager(self.desk)
        self.tracer_provider, self.tracer = self._initialize_tracer(span_log, enable_tracing)

    async def _hitset_verdict(self, formula: Formula, n: int, s: int, height: int, hs=None) -> Verdict:
        with ThreadPoolExecutor(max_workers=self.desk.workers) as executor:
            return await ablackbox_test(
                formula_oracle(formula), n, s, height, desk=self.desk, hs=hs, formula=formula, executor=executor
            )

    async def _test_internal(
        self, *, formula: Formula, n: int, s: int, height: int, mode: str, seed: int, max_dim: int, trials: int, hs
    ) -> Dict[str, Verdict]:
        verdicts = {}
        if mode in ("hitset", "both"):
            verdicts["hitset"] = await self._hitset_verdict(formula, n, s, height, hs)
        if mode in ("random", "both"):
            verdicts["random"] = await run_in_thread_async(
                None, random_oracle_test, formula, max_dim=max_dim, trials=trials, seed=seed, n=n
            )
        return verdicts

    async def test(
        self,
        formula: Union[str, Formula],
        n: Optional[int] = None,
        s: Optional[int] = None,
        height: Optional[int] = None,
        mode: str = "hitset",
        seed: int = 0,
        max_dim: int = 4,
        trials: int = 50,
        hs: Optional[HittingSet] = None,
    ) -> Dict[str, Verdict]:
        params = self._prepare_test_params(formula=formula, n=n, s=s, height=height, mode=mode)
        _test_internal_kwargs = {**params, "seed": seed, "max_dim": max_dim, "trials": trials, "hs": hs}

        if self.tracer:
            with self.tracer.start_as_current_span("ncrit test") as span:
                span.set_attribute("formula", str(params["formula"]))
                span.set_attribute("function_input", str({k: v for k, v in params.items() if k != "formula"}))
                result = await self._test_internal(**_test_internal_kwargs)
                span.set_attribute("function_output", str({k: v.status for k, v in result.items()}))
                return result
        else:
            return await self._test_internal(**_test_internal_kwargs)

    async def hitset(self, n: int, s: int, height: int) -> HittingSet:
        return await self.hitsets.build(n, s, height)

    async def blackbox(self, oracle, n: int, s: int, height: int, hs: Optional[HittingSet] = None) -> Verdict:
        """Black-box verdict for an arbitrary point oracle; no formula is available for re-verification."""
        with ThreadPoolExecutor(max_workers=self.desk.workers) as executor:
            return await ablackbox_test(oracle, n, s, height, desk=self.desk, hs=hs, executor=executor)
