import json
import sys
from typing import Any, Dict, Optional, Sequence

from opentelemetry.sdk.trace import ReadableSpan
from opentelemetry.sdk.trace.export import SpanExporter, SpanExportResult

from ncrit.utils import NCRIT_SPAN_LOG


def _hex_id(value: int, width: int) -> str:
    return format(value, f"0{width}x")


def span_record(span: ReadableSpan) -> Dict[str, Any]:
    parent = span.parent
    return {
        "name": span.name,
        "context": {"trace_id": _hex_id(span.context.trace_id, 32), "span_id": _hex_id(span.context.span_id, 16)},
        "parent_id": _hex_id(parent.span_id, 16) if parent else None,
        "start_time": span.start_time,
        "end_time": span.end_time,
        "status": {"status_code": span.status.status_code.name, "description": span.status.description},
        "attributes": dict(span.attributes or {}),
        "events": [
            {"name": event.name, "timestamp": event.timestamp, "attributes": dict(event.attributes or {})}
            for event in span.events
        ],
        "resource": {"attributes": dict(span.resource.attributes), "schema_url": span.resource.schema_url},
    }


class JsonLinesSpanExporter(SpanExporter):
    """Appends one JSON object per finished span to ``path``; ``"-"`` writes to stderr."""

    def __init__(self, path: Optional[str] = None):
        self.path = path or NCRIT_SPAN_LOG

    def _write(self, text: str) -> None:
        if self.path == "-":
            sys.stderr.write(text)
            return
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(text)

    def export(self, spans: Sequence[ReadableSpan]) -> SpanExportResult:
        if not spans:
            return SpanExportResult.SUCCESS
        text = "".join(json.dumps(span_record(span), default=str) + "\n" for span in spans)
        try:
            self._write(text)
        except OSError:
            return SpanExportResult.FAILURE
        return SpanExportResult.SUCCESS

    def shutdown(self) -> None:
        pass
