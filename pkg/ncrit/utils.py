import asyncio
import contextvars
import dataclasses
import functools
import json
import os
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ncrit.fields import QQ, CycloElem, CyclotomicField, CyclotomicFunctionField, KElem, parse_rat

NCRIT_SPAN_LOG = os.environ.setdefault("NCRIT_SPAN_LOG", "ncrit-spans.jsonl")
NCRIT_LOG_LEVEL = os.environ.setdefault("NCRIT_LOG_LEVEL", "WARNING")


@dataclass(frozen=True)
class DeskParams:
    """Caps that keep the hitting-set constructions runnable on a desk.

    Each value can be overridden with an ``NCRIT_DESK_<FIELD>`` environment variable.
    """

    kappa: int = 1
    fs_depth: int = 0
    fs_width: int = 1
    seed_values: int = 2
    abp_degree: int = 1
    roabp_values: int = 3
    scaling_values: int = 2
    shift_degree: int = 1
    shift_values: int = 2
    transfer_values: int = 3
    workers: int = 4

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            minimum = 0 if item.name == "fs_depth" else 1
            if not isinstance(value, int) or value < minimum:
                raise ValueError(f"desk parameter {item.name} must be an integer >= {minimum}, got {value!r}")

    @property
    def ell(self) -> int:
        return 4**self.kappa

    @classmethod
    def from_env(cls, **overrides) -> "DeskParams":
        values = {}
        for item in fields(cls):
            raw = os.environ.get(f"NCRIT_DESK_{item.name.upper()}")
            if raw is not None:
                try:
                    values[item.name] = int(raw)
                except ValueError:
                    raise ValueError(f"NCRIT_DESK_{item.name.upper()} must be an integer, got {raw!r}") from None
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @classmethod
    def level_one(cls, **overrides) -> "DeskParams":
        """One combining level of the embedded generator (l = 16, dtilde = 2, width 2).

        The defaults stop at level 0, which only hits degree-1 polynomials in D.
        """
        values = {"kappa": 2, "fs_depth": 1, "fs_width": 2, "seed_values": 4}
        values.update(overrides)
        return cls(**values)

    def replace(self, **changes) -> "DeskParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, int]:
        return dataclasses.asdict(self)


# -- serialization ---------------------------------------------------------


def rat_to_str(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def cyclo_to_json(value: CycloElem) -> List[str]:
    return [rat_to_str(c) for c in value.coeffs]


def k_to_json(value: KElem) -> List[List[List[str]]]:
    return [[cyclo_to_json(c) for c in value.num], [cyclo_to_json(c) for c in value.den]]


def element_to_json(value) -> Any:
    if isinstance(value, KElem):
        return k_to_json(value)
    if isinstance(value, CycloElem):
        return cyclo_to_json(value)
    return rat_to_str(value)


def element_from_json(data, field=QQ):
    if isinstance(field, CyclotomicFunctionField):
        num, den = data
        return KElem(
            field.order,
            [[parse_rat(c) for c in coeff] for coeff in num],
            [[parse_rat(c) for c in coeff] for coeff in den] or None,
        )
    if isinstance(field, CyclotomicField):
        return CycloElem(field.order, [parse_rat(c) for c in data])
    return parse_rat(data)


def matrix_to_json(A: np.ndarray) -> List[List[Any]]:
    return [[element_to_json(v) for v in row] for row in A]


def matrix_from_json(data: Sequence[Sequence[Any]], field=QQ) -> np.ndarray:
    if not data or not data[0]:
        raise ValueError("a serialized matrix needs at least one row and one column")
    out = np.empty((len(data), len(data[0])), dtype=object)
    for i, row in enumerate(data):
        if len(row) != out.shape[1]:
            raise ValueError("ragged rows in serialized matrix")
        for j, value in enumerate(row):
            out[i, j] = element_from_json(value, field)
    return out


def field_from_name(name: str, ell: Optional[int] = None):
    if name == "Q":
        return QQ
    if name == "K":
        return CyclotomicFunctionField(ell)
    if name == "Qw":
        return CyclotomicField(ell)
    raise ValueError(f"unknown field {name!r}")


def point_to_json(point: Sequence[np.ndarray]) -> List[List[List[Any]]]:
    return [matrix_to_json(p) for p in point]


def point_from_json(data, field=QQ) -> List[np.ndarray]:
    if isinstance(data, dict):
        data = data.get("point", data.get("matrices"))
    if not isinstance(data, list) or not data:
        raise ValueError("a point is a nonempty list of matrices")
    return [matrix_from_json(m, field) for m in data]


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True)


# -- async and warnings ----------------------------------------------------


async def run_in_thread_async(executor, func, *args, **kwargs):
    """https://github.com/python/cpython/blob/main/Lib/asyncio/threads.py"""
    loop = asyncio.get_running_loop()
    ctx = contextvars.copy_context()
    func_call = functools.partial(ctx.run, func, *args, **kwargs)
    res = await loop.run_in_executor(executor, func_call)
    return res


def warn_print_only(schedule_summary: str):
    print(f"WARNING: full-size parameters are print-only: {schedule_summary}", file=sys.stderr)
