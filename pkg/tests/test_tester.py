import json

import pytest
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import SpanExportResult

from ncrit import AsyncIdentityTester, IdentityTester
from ncrit.assembly import Verdict
from ncrit.formula import parse
from ncrit.hitsets import AsyncHittingSetManager, HittingSetManager
from ncrit.linalg import rational_matrix
from ncrit.ncrit import corpus_row
from ncrit.span_exporter import JsonLinesSpanExporter
from ncrit.utils import DeskParams

DESK = DeskParams()


def test_identity_tester_hitset_mode():
    tester = IdentityTester(DESK)
    verdicts = tester.test("x1")
    assert list(verdicts) == ["hitset"]
    assert verdicts["hitset"].status == "NONZERO"


def test_identity_tester_both_modes_on_an_identity():
    verdicts = IdentityTester(DESK).test("inv(x1)*x1 - 1", mode="both", max_dim=2, trials=5)
    assert verdicts["hitset"].status == "ZERO"
    assert verdicts["random"].status == "LIKELY_ZERO"


def test_identity_tester_validates_parameters():
    tester = IdentityTester(DESK)
    with pytest.raises(ValueError):
        tester.test("x1", mode="exhaustive")
    with pytest.raises(ValueError):
        tester.test("inv(x1)", height=0)
    with pytest.raises(ValueError):
        tester.test("x1", height=3)


def test_identity_tester_evaluate():
    M = rational_matrix([[1, 2], [3, 4]])
    result = IdentityTester(DESK).evaluate("x1*x1", [M])
    assert result[0, 0] == 7


def test_hitset_manager_round_trip(tmp_path):
    manager = HittingSetManager(DESK)
    hs = manager.build(1, 1, 0)
    path = str(tmp_path / "hs.json")
    manager.write(hs, path)
    again = manager.read(path)
    assert len(again) == len(hs)
    assert again.meta["field"] == "Q"
    (tmp_path / "other.json").write_text(json.dumps({"points": []}))
    with pytest.raises(ValueError):
        manager.read(str(tmp_path / "other.json"))


def test_corpus_row():
    zero = Verdict(status="ZERO", source="hitset")
    likely = Verdict(status="LIKELY_ZERO", source="random")
    nonzero = Verdict(status="NONZERO", source="random")
    row = corpus_row("hua", "identity", {"hitset": zero, "random": likely})
    assert row["passed"]
    assert not corpus_row("hua", "identity", {"hitset": zero, "random": nonzero})["passed"]


def test_tracing_writes_json_lines(tmp_path):
    span_log = tmp_path / "spans.jsonl"
    tester = IdentityTester(DESK, enable_tracing=True, span_log=str(span_log))
    tester.test("x1")
    tester.hitset(1, 1, 0)
    tester.tracer_provider.shutdown()
    spans = [json.loads(line) for line in span_log.read_text().splitlines()]
    names = [span["name"] for span in spans]
    assert "ncrit test" in names and "ncrit hitset" in names
    test_span = spans[names.index("ncrit test")]
    assert test_span["attributes"]["formula"] == "x1"
    assert test_span["resource"]["attributes"]["service.name"] == "ncrit"


def test_traceable_decorator(tmp_path):
    span_log = tmp_path / "spans.jsonl"
    tester = IdentityTester(DESK, enable_tracing=True, span_log=str(span_log))

    @tester.traceable(attributes={"stage": "unit"}, name="double")
    def double(value):
        return 2 * value

    assert double(4) == 8
    tester.tracer_provider.shutdown()
    (span,) = [json.loads(line) for line in span_log.read_text().splitlines()]
    assert span["name"] == "double"
    assert span["attributes"]["stage"] == "unit"
    assert span["attributes"]["function_output"] == "8"


def test_exporter_reports_io_failure(tmp_path):
    provider = TracerProvider()
    tracer = provider.get_tracer(__name__)
    with tracer.start_as_current_span("export-check") as span:
        pass
    assert JsonLinesSpanExporter(str(tmp_path)).export([span]) == SpanExportResult.FAILURE
    path = tmp_path / "ok.jsonl"
    assert JsonLinesSpanExporter(str(path)).export([span]) == SpanExportResult.SUCCESS
    assert json.loads(path.read_text())["name"] == "export-check"
    assert JsonLinesSpanExporter(str(path)).export([]) == SpanExportResult.SUCCESS


@pytest.mark.asyncio
async def test_async_identity_tester():
    tester = AsyncIdentityTester(DESK)
    verdicts = await tester.test("x1*x2 - x2*x1", mode="both", max_dim=2, trials=10)
    assert verdicts["hitset"].status == "NONZERO"
    assert verdicts["random"].status == "NONZERO"


@pytest.mark.asyncio
async def test_async_blackbox_with_custom_oracle():
    tester = AsyncIdentityTester(DESK)
    f = parse("x1*x1")
    verdict = await tester.blackbox(lambda point: point[0] @ point[0], 1, f.size, 0)
    assert verdict.status == "NONZERO"
    assert verdict.witness_index == 0


@pytest.mark.asyncio
async def test_sync_tester_inside_running_loop():
    verdicts = IdentityTester(DESK).test("x1")
    assert verdicts["hitset"].status == "NONZERO"


@pytest.mark.asyncio
async def test_async_hitset_manager(tmp_path):
    manager = AsyncHittingSetManager(DESK)
    hs = await manager.build(1, 1, 0)
    path = str(tmp_path / "hs.json")
    await manager.write(hs, path)
    again = await manager.read(path)
    assert len(again) == len(hs) == 36
