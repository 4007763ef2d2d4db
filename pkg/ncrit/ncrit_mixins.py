import asyncio
from contextlib import contextmanager
from functools import wraps
from typing import Any, Dict, Iterator, Optional, Union

from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor
from opentelemetry.semconv.resource import ResourceAttributes

from ncrit.assembly import MAP_HEIGHT_TO_BUILDER
from ncrit.formula import Formula, parse
from ncrit.span_exporter import JsonLinesSpanExporter

TEST_MODES = ("hitset", "random", "both")


class NcritMixin:
    tracer = None

    @staticmethod
    def _initialize_tracer(span_log: str = None, enable_tracing: bool = False):
        if not enable_tracing:
            return None, None
        provider = TracerProvider(resource=Resource(attributes={ResourceAttributes.SERVICE_NAME: "ncrit"}))
        provider.add_span_processor(BatchSpanProcessor(JsonLinesSpanExporter(path=span_log)))
        return provider, provider.get_tracer(__name__)

    @staticmethod
    def _prepare_test_params(
        *,
        formula: Union[str, Formula],
        n: Optional[int],
        s: Optional[int],
        height: Optional[int],
        mode: str,
    ) -> Dict[str, Any]:
        if isinstance(formula, str):
            formula = parse(formula)
        if mode not in TEST_MODES:
            raise ValueError(f"mode must be one of {', '.join(TEST_MODES)}, got {mode!r}")
        height = formula.height if height is None else height
        if height not in MAP_HEIGHT_TO_BUILDER:
            raise ValueError(f"height must be 0, 1 or 2, got {height}")
        if formula.height > height:
            raise ValueError(f"formula has inversion height {formula.height} > {height}")
        n = max(formula.variable_count, n or 0, 1)
        s = max(formula.size, s or 0)
        return {"formula": formula, "n": n, "s": s, "height": height, "mode": mode}

    @contextmanager
    def _traced_call(self, span_name: str, attributes: Optional[Dict[str, Any]], args, kwargs) -> Iterator[Any]:
        with self.tracer.start_as_current_span(span_name) as span:
            for key, value in (attributes or {}).items():
                span.set_attribute(key, value)
            span.set_attribute("function_input", str({"args": args, "kwargs": kwargs}))
            yield span

    def traceable(self, attributes=None, name=None):
        """Decorate a sync or async function so each call records a span with its input and output."""

        def decorator(func):
            span_name = name or func.__name__

            if asyncio.iscoroutinefunction(func):

                @wraps(func)
                async def async_wrapper(*args, **kwargs):
                    if not self.tracer:
                        return await func(*args, **kwargs)
                    with self._traced_call(span_name, attributes, args, kwargs) as span:
                        result = await func(*args, **kwargs)
                        span.set_attribute("function_output", str(result))
                    return result

                return async_wrapper

            @wraps(func)
            def sync_wrapper(*args, **kwargs):
                if not self.tracer:
                    return func(*args, **kwargs)
                with self._traced_call(span_name, attributes, args, kwargs) as span:
                    result = func(*args, **kwargs)
                    span.set_attribute("function_output", str(result))
                return result

            return sync_wrapper

        return decorator
