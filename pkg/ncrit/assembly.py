"""Hitting sets for rational formulas of inversion height <= 2 and the black-box verdicts built on them.

Height 0 uses the sigma-compatible generator in D directly. Height 1 shifts the generalized-ABP
strong set by points of that generator, and height 2 shifts a rational upper-shift set by
points of the height-1 set. All K-points are mapped to Q by substituting (w, z) -> (t1, t2).
"""

import asyncio
import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ncrit import linalg
from ncrit.exceptions import CertificationError, DenominatorVanishesError, InfeasibleParametersError
from ncrit.fields import CyclotomicFunctionField, KElem, eval_at_rationals
from ncrit.formula import EvalResult, Formula, NotDefined, evaluate, is_nonzero_value, subformulas
from ncrit.fsgen import HittingSet, ParamSchedule, hitting_set_in_D, rational_shift_points, schedule
from ncrit.genabp import strong_hitting_set_genabp
from ncrit.types import HittingSetHeader, VerdictReport
from ncrit.utils import DeskParams, point_to_json, rat_to_str, run_in_thread_async

logger = logging.getLogger(__name__)

Point = Tuple[np.ndarray, ...]
Oracle = Callable[[Point], EvalResult]


# -- scaling sets ----------------------------------------------------------


@dataclass(frozen=True)
class ScalingSet:
    values: Tuple[Fraction, ...]
    bound: int
    derivation: Dict[str, int] = field(default_factory=dict)


def scaling_set(s: int, m: int, dprime: int) -> ScalingSet:
    """{0, ..., N} with N = 2 (2 s m d') + 1.

    Entries of L^-1 for a pencil of dimension 2 s m with entry degrees <= d' are quotients of
    polynomials of degree <= 2 s m d'; products of numerator and denominator double that.
    """
    if s < 1 or m < 1 or dprime < 0:
        raise ValueError("scaling sets need s, m >= 1 and d' >= 0")
    bound = 2 * (2 * s * m * dprime) + 1
    return ScalingSet(
        values=tuple(Fraction(v) for v in range(bound + 1)),
        bound=bound,
        derivation={"s": s, "m": m, "dprime": dprime, "pencil_dim": 2 * s * m},
    )


def _capped(values: Sequence, cap: int, what: str) -> list:
    if len(values) > cap:
        logger.warning("%s capped at %d values (derived %d)", what, cap, len(values))
    return list(values[:cap])


# -- K hitting sets --------------------------------------------------------


def divalg_schedule(n: int, s: int, desk: DeskParams) -> ParamSchedule:
    return schedule(n, min(2 * s, desk.fs_width), 2**desk.fs_depth, mode="desk", kappa=desk.kappa)


def divalg_caps(s: int, desk: DeskParams) -> Dict[str, int]:
    """Generator width and degree used for the embedded set, next to what a size-s class needs.

    A formula of size s without inverses is a polynomial of degree <= s, so the generator needs
    dtilde >= s (rounded up to a power of two) and width 2 s.
    """
    dtilde_derived = 1 << (s - 1).bit_length()
    caps = {
        "fs_width": min(2 * s, desk.fs_width),
        "fs_width_derived": 2 * s,
        "dtilde": 2**desk.fs_depth,
        "dtilde_derived": dtilde_derived,
    }
    if caps["dtilde"] < dtilde_derived:
        logger.warning(
            "embedded generator degree capped at %d (derived %d); polynomials of higher degree may be missed in D",
            caps["dtilde"],
            dtilde_derived,
        )
    return caps


def _point_key(point: Point) -> Tuple:
    return tuple(tuple(M.flat) for M in point)


def hs_height0(n: int, s: int, desk: Optional[DeskParams] = None) -> HittingSet:
    """H_0 over K: points of the embedded generator."""
    desk = desk or DeskParams.from_env()
    hs = hitting_set_in_D(divalg_schedule(n, s, desk), desk)
    hs.meta["s"] = s
    hs.meta["derivation"].update(divalg_caps(s, desk))
    return hs


def strong_hs_height1(n: int, s: int, desk: Optional[DeskParams] = None) -> HittingSet:
    """Ĥ_1 = {alpha p + q (x) I_d : p in H_1, q in H_0, alpha in T}, deduplicated, over K."""
    desk = desk or DeskParams.from_env()
    sched = divalg_schedule(n, s, desk)
    algebra = sched.algebra
    derived_degree = 2 * s * algebra.ell - 1
    d = min(desk.abp_degree, derived_degree)
    if d < derived_degree:
        logger.warning("generalized ABP degree capped at %d (derived %d)", d, derived_degree)
    h0 = hitting_set_in_D(sched, desk)
    h1 = strong_hitting_set_genabp(n, 2 * s, d, algebra, desk)
    scaling = scaling_set(s, algebra.ell, 1)
    alphas = _capped(scaling.values, desk.scaling_values, "scaling set T")
    eye = linalg.identity(d, algebra.field)
    meta: HittingSetHeader = {
        "n": n,
        "s": s,
        "height": 1,
        "dim": d * algebra.ell,
        "field": "K",
        "ell": algebra.ell,
        "kappa": algebra.kappa,
        "blockdim": d,
        "mode": "desk",
        "count": 0,
        "derivation": {
            "abp_degree": d,
            "abp_degree_derived": derived_degree,
            "scaling_bound": scaling.bound,
            "scaling_values": len(alphas),
            **divalg_caps(s, desk),
            "h0": len(h0),
            "h1": len(h1),
            "roabp_axis": h1.meta["derivation"].get("axis"),
            "roabp_axis_derived": h1.meta["derivation"].get("axis_derived"),
            "certified_family": h1.meta["derivation"]["family"]["size"],
        },
    }
    out = HittingSet(meta=meta)
    seen = set()
    for (pi, p), (qi, q), alpha in itertools.product(enumerate(h1.points), enumerate(h0.points), alphas):
        point = tuple(P * alpha + np.kron(Q, eye) for P, Q in zip(p, q))
        key = _point_key(point)
        if key in seen:
            continue
        seen.add(key)
        record = dict(h0.certifications[qi])
        record.update(h1.certifications[pi])
        record["alpha"] = rat_to_str(alpha)
        record["sources"] = {"h1": pi, "h0": qi}
        out.points.append(point)
        out.certifications.append(record)
    out.meta["count"] = len(out.points)
    logger.debug("height-1 strong set: %d points of dim %d", len(out), out.dim)
    return out


def _reshape_block_points(fs_point: Point, n: int, dim: int) -> Point:
    """The (i, j) block of the k-th matrix is the matrix substituted for z_(i,j,k)."""
    out = []
    for k in range(n):
        rows = []
        for i in range(dim):
            rows.append([fs_point[k * dim * dim + i * dim + j] for j in range(dim)])
        out.append(linalg.block_matrix(rows))
    return tuple(out)


def hs_height2_k(n: int, s: int, desk: Optional[DeskParams] = None) -> HittingSet:
    """H_2 = {alpha p + q (x) I_(dhat+1) : q in Ĥ_1, p in the reshaped rational shift set, alpha in T}."""
    desk = desk or DeskParams.from_env()
    h1 = strong_hs_height1(n, s, desk)
    dim = h1.dim
    derived_dhat = 2 * s * dim - 1
    dhat = min(desk.shift_degree, derived_dhat)
    if dhat < derived_dhat:
        logger.warning("shift truncation degree capped at %d (derived %d)", dhat, derived_dhat)
    seeds = range(2, 2 + desk.shift_values)
    fs_points = [_reshape_block_points(p, n, dim) for p in rational_shift_points(n * dim * dim, dhat, seeds)]
    field_ = CyclotomicFunctionField(h1.meta["ell"])
    fs_points = [tuple(linalg.to_field(M, field_) for M in p) for p in fs_points]
    scaling = scaling_set(s, dim, 1)
    alphas = _capped(scaling.values, desk.scaling_values, "scaling set T")
    eye = linalg.identity(dhat + 1, field_)
    meta: HittingSetHeader = dict(h1.meta)
    meta.update(
        {
            "height": 2,
            "dim": dim * (dhat + 1),
            "count": 0,
            "derivation": {
                **h1.meta["derivation"],
                "shift_degree": dhat,
                "shift_degree_derived": derived_dhat,
                "shift_points": len(fs_points),
            },
        }
    )
    out = HittingSet(meta=meta)
    seen = set()
    for (qi, q), (pi, p), alpha in itertools.product(enumerate(h1.points), enumerate(fs_points), alphas):
        point = tuple(P * alpha + np.kron(Q, eye) for P, Q in zip(p, q))
        key = _point_key(point)
        if key in seen:
            continue
        seen.add(key)
        record = dict(h1.certifications[qi])
        record["alpha2"] = rat_to_str(alpha)
        record["sources2"] = {"h1": qi, "fs": pi}
        out.points.append(point)
        out.certifications.append(record)
    out.meta["count"] = len(out.points)
    logger.debug("height-2 set over K: %d points of dim %d", len(out), out.dim)
    return out


# -- transfer to Q ---------------------------------------------------------


def transfer_pairs(hs: HittingSet, s: int, desk: Optional[DeskParams] = None) -> List[Tuple[Fraction, Fraction]]:
    """T~ x T~ with T~ = {1, ..., N + 1}, N from the bivariate degree bound of the entries."""
    desk = desk or DeskParams.from_env()
    dprime = max((v.bidegree() for point in hs for M in point for v in M.flat if isinstance(v, KElem)), default=0)
    bound = scaling_set(s, hs.dim, max(dprime, 1)).bound
    values = _capped([Fraction(t) for t in range(1, bound + 2)], desk.transfer_values, "transfer set T~")
    return list(itertools.product(values, repeat=2))


def transfer(hs: HittingSet, pairs: Sequence[Tuple[Fraction, Fraction]]) -> HittingSet:
    """Substitute (w, z) -> (t1, t2) everywhere; drop a point-pair if a denominator or a recorded det vanishes."""
    meta: HittingSetHeader = dict(hs.meta)
    meta.update({"field": "Q", "count": 0})
    meta["derivation"] = {**hs.meta.get("derivation", {}), "pairs": [[rat_to_str(a), rat_to_str(b)] for a, b in pairs]}
    out = HittingSet(meta=meta)
    dropped = 0
    for t1, t2 in pairs:
        for index, (point, cert) in enumerate(zip(hs.points, hs.certifications)):
            try:
                dets = [eval_at_rationals(d, t1, t2) for d in cert.get("dets", ())]
                if not all(dets):
                    raise DenominatorVanishesError("a certified determinant vanishes")
                mapped = tuple(linalg.map_entries(M, lambda v: eval_at_rationals(v, t1, t2)) for M in point)
            except DenominatorVanishesError as exc:
                dropped += 1
                logger.warning("dropping point %d at (t1, t2) = (%s, %s): %s", index, t1, t2, exc)
                continue
            out.points.append(mapped)
            out.certifications.append(
                {
                    "source": f"{index}",
                    "transfer": {"pair": [rat_to_str(t1), rat_to_str(t2)], "dets": [rat_to_str(d) for d in dets]},
                }
            )
    out.meta["count"] = len(out.points)
    logger.debug("transfer: %d rational points, %d dropped", len(out), dropped)
    return out


def hs_height2(n: int, s: int, desk: Optional[DeskParams] = None) -> HittingSet:
    """H~_2: the height-2 set over Q."""
    desk = desk or DeskParams.from_env()
    h2 = hs_height2_k(n, s, desk)
    return transfer(h2, transfer_pairs(h2, s, desk))


MAP_HEIGHT_TO_BUILDER = {
    0: {"name": "H0", "builder": hs_height0},
    1: {"name": "H1-hat", "builder": strong_hs_height1},
    2: {"name": "H2", "builder": hs_height2_k},
}


@lru_cache(maxsize=16)
def _rational_hitting_set(n: int, s: int, height: int, desk: DeskParams) -> HittingSet:
    over_k = MAP_HEIGHT_TO_BUILDER[height]["builder"](n, s, desk)
    hs = transfer(over_k, transfer_pairs(over_k, s, desk))
    for point in hs.points:
        for M in point:
            M.flags.writeable = False
    return hs


def hitting_set(n: int, s: int, height: int, desk: Optional[DeskParams] = None) -> HittingSet:
    """The rational hitting set for formulas in n variables of size <= s and inversion height <= height.

    Builds are cached per (n, s, height, desk); every call gets its own copy of the header and
    records, and the cached matrices are read-only.
    """
    if height not in MAP_HEIGHT_TO_BUILDER:
        raise InfeasibleParametersError(f"inversion height {height} is not supported (0, 1 or 2)")
    if n < 1 or s < 1:
        raise ValueError("n and s must be positive")
    return _rational_hitting_set(n, s, height, desk or DeskParams.from_env()).copy()


# -- verdicts --------------------------------------------------------------


@dataclass
class Verdict:
    status: str
    source: str
    witness_index: Optional[int] = None
    witness_point: Optional[Point] = None
    certifications_checked: int = 0

    @property
    def is_zero(self) -> bool:
        return self.status in ("ZERO", "LIKELY_ZERO")

    def to_report(self) -> VerdictReport:
        return {
            "verdict": self.status,
            "source": self.source,
            "witness_index": self.witness_index,
            "witness_point": point_to_json(self.witness_point) if self.witness_point is not None else None,
            "certifications_checked": self.certifications_checked,
        }


def formula_oracle(f: Formula) -> Oracle:
    def oracle(point: Point) -> EvalResult:
        return evaluate(f, point)

    return oracle


def reverify(f: Formula, point: Point) -> None:
    if not is_nonzero_value(evaluate(f, point)):
        raise CertificationError("witness point does not re-verify: the formula is zero or undefined there")


def first_witness(points: Sequence[Point], oracle: Oracle) -> Optional[int]:
    for index, point in enumerate(points):
        if is_nonzero_value(oracle(point)):
            return index
    return None


async def afirst_witness(points: Sequence[Point], oracle: Oracle, executor=None, batch: int = 16) -> Optional[int]:
    """Evaluate in batches on the executor; the earliest witness in enumeration order wins."""
    for start in range(0, len(points), batch):
        chunk = points[start : start + batch]
        values = await asyncio.gather(*(run_in_thread_async(executor, oracle, point) for point in chunk))
        for offset, value in enumerate(values):
            if is_nonzero_value(value):
                return start + offset
    return None


def _verdict_at(hs: HittingSet, index: Optional[int], formula: Optional[Formula]) -> Verdict:
    if index is None:
        return Verdict(status="ZERO", source="hitset", certifications_checked=len(hs.certifications))
    witness = hs.points[index]
    if formula is not None:
        reverify(formula, witness)
    logger.debug("witness at hitting point %d", index)
    return Verdict(
        status="NONZERO",
        source="hitset",
        witness_index=index,
        witness_point=witness,
        certifications_checked=index + 1,
    )


async def ablackbox_test(
    oracle: Oracle,
    n: int,
    s: int,
    height: int,
    desk: Optional[DeskParams] = None,
    hs: Optional[HittingSet] = None,
    formula: Optional[Formula] = None,
    executor=None,
) -> Verdict:
    if hs is None:
        hs = await run_in_thread_async(executor, hitting_set, n, s, height, desk)
    index = await afirst_witness(hs.points, oracle, executor)
    return _verdict_at(hs, index, formula)


def blackbox_test(
    oracle: Oracle,
    n: int,
    s: int,
    height: int,
    desk: Optional[DeskParams] = None,
    hs: Optional[HittingSet] = None,
    formula: Optional[Formula] = None,
) -> Verdict:
    """Run the oracle over the hitting set in order; the first defined nonzero value is the witness.

    ZERO is only as strong as the class assumption (size <= s, height) and the desk caps.
    """
    hs = hs if hs is not None else hitting_set(n, s, height, desk)
    return _verdict_at(hs, first_witness(hs.points, oracle), formula)


def random_point(rng: random.Random, n: int, dim: int, entry_range: int = 3) -> Point:
    return tuple(
        linalg.rational_matrix([[rng.randint(-entry_range, entry_range) for _ in range(dim)] for _ in range(dim)])
        for _ in range(n)
    )


def random_oracle_test(
    f: Formula, max_dim: int = 4, trials: int = 50, seed: int = 0, n: Optional[int] = None, entry_range: int = 3
) -> Verdict:
    """Evaluate at ``trials`` seeded random rational tuples for every dimension 1..max_dim."""
    rng = random.Random(seed)
    n = max(f.variable_count, n or 0, 1)
    index = 0
    for dim in range(1, max_dim + 1):
        for _ in range(trials):
            point = random_point(rng, n, dim, entry_range)
            if is_nonzero_value(evaluate(f, point)):
                reverify(f, point)
                return Verdict(status="NONZERO", source="random", witness_index=index, witness_point=point)
            index += 1
    return Verdict(status="LIKELY_ZERO", source="random")


def verdicts_agree(first: Verdict, second: Verdict) -> bool:
    return first.is_zero == second.is_zero


def minimize_counterexample(f: Formula, disagrees: Callable[[Formula], bool]) -> Formula:
    """Smallest subformula (by size, then preorder) on which ``disagrees`` still holds."""
    best = f
    for candidate in sorted(subformulas(f), key=lambda g: g.size):
        if candidate.size >= best.size:
            break
        if disagrees(candidate):
            return candidate
    return best


# -- degree bounds over Q(z) -----------------------------------------------


def random_z_point(rng: random.Random, n: int, dim: int, dprime: int) -> Point:
    """Matrices over Q(z) with polynomial entries of z-degree <= d'."""
    field_ = CyclotomicFunctionField(2)
    z = field_.z()
    point = []
    for _ in range(n):
        M = linalg.zeros(dim, dim, field_)
        for idx in np.ndindex(dim, dim):
            value = field_.zero
            for e in range(dprime + 1):
                value = value + z**e * rng.randint(-2, 2)
            M[idx] = value
        point.append(M)
    return tuple(point)


def degree_bound_holds(f: Formula, point: Point, dprime: int) -> Union[bool, NotDefined]:
    """Every reduced numerator and denominator z-degree of f(point) is <= scaling_set(size, m, d').bound."""
    value = evaluate(f, point)
    if isinstance(value, NotDefined):
        return value
    bound = scaling_set(f.size, point[0].shape[0], dprime).bound
    return all(max(v.z_degrees()) <= bound for v in value.flat)


def height_of_class(f: Formula) -> int:
    if f.height > 2:
        raise InfeasibleParametersError(f"inversion height {f.height} is beyond the supported classes")
    return f.height


def describe(hs: HittingSet) -> Dict[str, Any]:
    return {"count": len(hs), **{k: v for k, v in hs.meta.items() if k != "derivation"}}
