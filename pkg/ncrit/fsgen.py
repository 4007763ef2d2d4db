"""Sigma-compatible Forbes-Shpilka generator embedded in the cyclic division algebra D.

A generator of level d holds, for every variable x_i and position j < 2^d, a univariate
polynomial in the last seed coordinate. Materializing at a seed gives cir(b_0, ..., z b_(l-1))
with b_(j+1) = sigma(b_j), which is M(b_0) M(x), the representation of b_0 x in D.
"""

import copy
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ncrit import linalg
from ncrit.divalg import DElem, DivAlgebra, circulant_of, d_add, d_mul, matrix_rep
from ncrit.exceptions import CertificationError, InfeasibleParametersError
from ncrit.fields import KElem, is_power_of_two, sigma_apply
from ncrit.types import HittingSetFile, HittingSetHeader, ScheduleRecord
from ncrit.utils import DeskParams, element_from_json, element_to_json, field_from_name, matrix_from_json, matrix_to_json

logger = logging.getLogger(__name__)

UPoly = Tuple[KElem, ...]


@dataclass
class HittingSet:
    """An ordered list of n-tuples of square matrices plus per-point certification records."""

    meta: HittingSetHeader
    points: List[Tuple[np.ndarray, ...]] = field(default_factory=list)
    certifications: List[Dict[str, Any]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def copy(self) -> "HittingSet":
        """Fresh header, point list and records; the matrices themselves are shared."""
        return HittingSet(
            meta=copy.deepcopy(self.meta),
            points=list(self.points),
            certifications=copy.deepcopy(self.certifications),
        )

    def __iter__(self) -> Iterator[Tuple[np.ndarray, ...]]:
        return iter(self.points)

    @property
    def dim(self) -> int:
        return self.meta["dim"]

    @property
    def scalar_field(self):
        return field_from_name(self.meta["field"], self.meta.get("ell"))

    def to_dict(self) -> HittingSetFile:
        header = dict(self.meta)
        header["count"] = len(self.points)
        return {
            "header": header,
            "points": [[matrix_to_json(p) for p in point] for point in self.points],
            "certifications": [_cert_to_json(c) for c in self.certifications],
        }

    @classmethod
    def from_dict(cls, data: HittingSetFile) -> "HittingSet":
        header = data["header"]
        field_ = field_from_name(header["field"], header.get("ell"))
        points = [tuple(matrix_from_json(m, field_) for m in point) for point in data["points"]]
        certs = [_cert_from_json(c, header) for c in data.get("certifications", [])]
        if header.get("count", len(points)) != len(points):
            raise ValueError(f"header count {header['count']} does not match {len(points)} points")
        return cls(meta=dict(header), points=points, certifications=certs)


def _cert_to_json(record: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(record)
    if "dets" in out:
        out["dets"] = [element_to_json(d) for d in out["dets"]]
    return out


def _cert_from_json(record: Dict[str, Any], header) -> Dict[str, Any]:
    out = dict(record)
    if "dets" in out and header.get("ell"):
        field_ = field_from_name("K", header["ell"])
        out["dets"] = [element_from_json(d, field_) for d in out["dets"]]
    return out


# -- parameter schedule ----------------------------------------------------


def _ceil_two_log2(x: int) -> int:
    """ceil(2 log2 x) for a positive integer x, i.e. the least c with 2^c >= x^2."""
    return (x * x - 1).bit_length()


@dataclass(frozen=True)
class ParamSchedule:
    n: int
    r: int
    d: int
    dtilde: int
    m: int
    kappa: int
    L: int
    ell: int
    a: Tuple[int, ...]
    mu: int
    mode: str

    @cached_property
    def algebra(self) -> DivAlgebra:
        return DivAlgebra(self.ell, self.kappa)

    def level_exponent(self, i: int) -> int:
        """a_i = kappa - i, defined for every level 1..max(d, 1)."""
        return self.kappa - i

    def omega_level(self, i: int) -> int:
        """Exponent e with w_i = w^e."""
        return 2 ** self.level_exponent(i) % self.ell

    def W(self, i: int) -> List[int]:
        """Exponents of W_i = {w_i^j : 1 <= j <= 2^(L - a_i)}."""
        step = 2 ** self.level_exponent(i)
        return [(j * step) % self.ell for j in range(1, 2 ** (self.L - self.level_exponent(i)) + 1)]

    def to_dict(self) -> ScheduleRecord:
        return {
            "n": self.n,
            "r": self.r,
            "d": self.d,
            "dtilde": self.dtilde,
            "m": self.m,
            "kappa": self.kappa,
            "L": self.L,
            "ell": self.ell,
            "a": list(self.a),
            "mu": self.mu,
            "mode": self.mode,
        }


def schedule(n: int, r: int, dtilde: int, m: int = 1, mode: str = "desk", kappa: Optional[int] = None):
    if min(n, r, m) < 1:
        raise ValueError("n, r and m must be positive")
    if not is_power_of_two(dtilde):
        raise ValueError(f"dtilde must be a power of two, got {dtilde}")
    d = dtilde.bit_length() - 1
    if mode == "paper-faithful":
        kappa = 2 * d + _ceil_two_log2(n * m * r) + 1
    elif mode == "desk":
        if kappa is None or kappa < 1:
            raise ValueError("desk mode needs kappa >= 1")
    else:
        raise ValueError(f"unknown schedule mode {mode!r}")
    if d >= 1 and kappa - d <= 0:
        raise InfeasibleParametersError(f"a_{d} = {kappa - d} <= 0: kappa={kappa} is too small for {d} levels")
    if mode == "paper-faithful" and not 2**kappa > (dtilde * n * m * r) ** 2:
        raise InfeasibleParametersError("full-size kappa violates 2^kappa > (dtilde n m r)^2")
    L = 2 * kappa
    sched = ParamSchedule(
        n=n,
        r=r,
        d=d,
        dtilde=dtilde,
        m=m,
        kappa=kappa,
        L=L,
        ell=2**L,
        a=tuple(kappa - i for i in range(1, d + 1)),
        mu=2 ** (kappa + d - 1) + 1,
        mode=mode,
    )
    logger.debug("schedule %s", sched.to_dict())
    return sched


# -- univariate polynomials with K coefficients ----------------------------


def _trim(poly: Sequence[KElem]) -> UPoly:
    poly = list(poly)
    while poly and not poly[-1]:
        poly.pop()
    return tuple(poly)


def poly_eval(poly: UPoly, value):
    total = value * 0
    for c in reversed(poly):
        total = total * value + c
    return total


def poly_sigma(poly: UPoly, algebra: DivAlgebra, times: int = 1) -> UPoly:
    return tuple(sigma_apply(c, algebra.sigma, times) for c in poly)


def _poly_add(p: UPoly, q: UPoly) -> UPoly:
    n = max(len(p), len(q))
    out = []
    for k in range(n):
        a = p[k] if k < len(p) else None
        b = q[k] if k < len(q) else None
        out.append(b if a is None else a if b is None else a + b)
    return _trim(out)


def lagrange_basis(count: int) -> List[Tuple[Fraction, ...]]:
    """Coefficient vectors of the Lagrange polynomials on the nodes 1..count."""
    nodes = range(1, count + 1)
    basis = []
    for t in nodes:
        coeffs = [Fraction(1)]
        for u in nodes:
            if u == t:
                continue
            scale = Fraction(1, t - u)
            shifted = [Fraction(0)] + coeffs
            coeffs = [shifted[k] * scale - (coeffs[k] * u * scale if k < len(coeffs) else 0) for k in range(len(shifted))]
        basis.append(tuple(coeffs))
    return basis


# -- generators ------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    level: int
    polys: Tuple[Tuple[UPoly, ...], ...]
    alphas: Tuple[int, ...] = ()

    def position(self, i: int, j: int) -> UPoly:
        """f^i_j for variable i (1-based) and position j."""
        return self.polys[i - 1][j]


def base_generator(sched: ParamSchedule) -> Generator:
    """f^i_0(v) = v^(i-1)."""
    field_ = sched.algebra.field
    polys = []
    for i in range(1, sched.n + 1):
        polys.append(((field_.zero,) * (i - 1) + (field_.one,),))
    return Generator(level=0, polys=tuple(polys))


def combine(g: Generator, sched: ParamSchedule, alpha: int) -> Generator:
    """Lift g from level d-1 to level d with seed alpha = w^alpha in W_d.

    Position 0 of each half comes from the Lagrange combination over the nodes 1..r^2;
    every other position is a sigma power of those two. The join sigma^h(f'_0) = f'_h is
    checked exactly.
    """
    d = g.level + 1
    if d > sched.d:
        raise ValueError(f"generator is already at level {g.level} of {sched.d}")
    alpha = alpha % sched.ell
    if alpha not in sched.W(d):
        raise ValueError(f"w^{alpha} is not in W_{d}")
    algebra = sched.algebra
    half = 2 ** (d - 1)
    step = sched.omega_level(d)
    lagrange = lagrange_basis(sched.r * sched.r)
    polys = []
    for i in range(1, sched.n + 1):
        f0 = g.position(i, 0)
        first: UPoly = ()
        join: UPoly = ()
        for t, p in enumerate(lagrange, start=1):
            exponent = (t * step + alpha) % sched.ell
            beta = algebra.field.omega(exponent)
            beta_mu = algebra.field.omega(exponent * sched.mu % sched.ell)
            first = _poly_add(first, tuple(poly_eval(f0, beta) * c for c in p))
            join = _poly_add(join, tuple(poly_eval(f0, beta_mu) * c for c in p))
        if poly_sigma(first, algebra, half) != join:
            raise CertificationError(f"sigma join fails for x{i} at level {d} with alpha w^{alpha}")
        positions = [poly_sigma(first, algebra, j) for j in range(half)]
        positions += [poly_sigma(join, algebra, j) for j in range(half)]
        polys.append(tuple(positions))
    return Generator(level=d, polys=tuple(polys), alphas=g.alphas + (alpha,))


def generator_for(sched: ParamSchedule, alphas: Sequence[int]) -> Generator:
    g = base_generator(sched)
    for alpha in alphas:
        g = combine(g, sched, alpha)
    return g


def sigma_extend(g: Generator, sched: ParamSchedule) -> List[List[UPoly]]:
    width = 2**g.level
    if sched.ell < width:
        raise ValueError(f"l={sched.ell} is smaller than the {width} generator positions")
    out = []
    for i in range(1, sched.n + 1):
        positions = [g.position(i, j) for j in range(width)]
        while len(positions) < sched.ell:
            positions.append(poly_sigma(positions[-1], sched.algebra))
        out.append(positions)
    return out


def is_sigma_compatible(g: Generator, sched: ParamSchedule) -> bool:
    algebra = sched.algebra
    for positions in sigma_extend(g, sched):
        for j in range(len(positions) - 1):
            if poly_sigma(positions[j], algebra) != positions[j + 1]:
                return False
    return True


@dataclass(frozen=True)
class MaterializedPoint:
    elements: Tuple[DElem, ...]
    matrices: Tuple[np.ndarray, ...]
    certification: Dict[str, Any]

    @property
    def certified(self) -> bool:
        return bool(self.certification["det_nonzero"] and self.certification["sigma_chain_ok"])


def materialize(g: Generator, sched: ParamSchedule, v) -> MaterializedPoint:
    """Substitute the last seed coordinate and build M(x_i) = cir(b_0, ..., z b_(l-1))."""
    algebra = sched.algebra
    v = algebra.k(v)
    width = 2**g.level
    elements, matrices, dets = [], [], []
    chain_ok, det_ok, in_d = True, True, True
    for i in range(1, sched.n + 1):
        values = [algebra.k(poly_eval(g.position(i, j), v)) for j in range(width)]
        chain_ok = chain_ok and all(values[j + 1] == algebra.sigma_of(values[j]) for j in range(width - 1))
        while len(values) < sched.ell:
            values.append(algebra.sigma_of(values[-1]))
        matrix = circulant_of(algebra, values)
        element = DElem(algebra, [algebra.field.zero, values[0]] + [algebra.field.zero] * (sched.ell - 2))
        in_d = in_d and linalg.matrices_equal(matrix, matrix_rep(element))
        det = linalg.det(matrix)
        det_ok = det_ok and bool(det)
        elements.append(element)
        matrices.append(matrix)
        dets.append(det)
    certification = {"det_nonzero": det_ok, "sigma_chain_ok": chain_ok and in_d, "in_D": in_d, "dets": dets}
    return MaterializedPoint(tuple(elements), tuple(matrices), certification)


def seed_values(sched: ParamSchedule, desk: Optional[DeskParams] = None) -> List[Any]:
    """Values of the last seed coordinate: W_1 at level 0, else the integers 0..N-1."""
    if sched.d == 0:
        return [sched.algebra.field.omega(e) for e in sched.W(1)]
    derived = sched.dtilde * (sched.r * sched.r - 1) + 1
    cap = desk.seed_values if desk is not None else derived
    if derived > cap:
        logger.warning("seed set for v capped at %d values (derived %d)", cap, derived)
    return [Fraction(v) for v in range(min(derived, cap))]


def hitting_set_in_D(sched: ParamSchedule, desk: Optional[DeskParams] = None) -> HittingSet:
    """Enumerate alpha_1 x ... x alpha_d x v lexicographically; keep certified points."""
    desk = desk or DeskParams.from_env()
    values = seed_values(sched, desk)
    meta: HittingSetHeader = {
        "n": sched.n,
        "r": sched.r,
        "dtilde": sched.dtilde,
        "kappa": sched.kappa,
        "L": sched.L,
        "ell": sched.ell,
        "mode": sched.mode,
        "height": 0,
        "dim": sched.ell,
        "field": "K",
        "count": 0,
        "derivation": {"seed_values": len(values), "levels": [len(sched.W(i)) for i in range(1, sched.d + 1)]},
    }
    hs = HittingSet(meta=meta)
    dropped = 0
    for alphas in itertools.product(*(sched.W(i) for i in range(1, sched.d + 1))):
        g = generator_for(sched, alphas)
        for v in values:
            point = materialize(g, sched, v)
            if not point.certified:
                dropped += 1
                logger.warning("dropping hitting point alphas=%s v=%s: certification failed", alphas, v)
                continue
            record = dict(point.certification)
            record["seed"] = {"alphas": list(alphas), "v": element_to_json(v)}
            hs.points.append(point.matrices)
            hs.certifications.append(record)
    hs.meta["count"] = len(hs.points)
    logger.debug("hitting set in D: %d points, %d dropped", len(hs.points), dropped)
    return hs


# -- span preservation -----------------------------------------------------


def _matrix_poly_eval(coeffs: Sequence[np.ndarray], value) -> np.ndarray:
    total = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        total = total * value + c
    return total


def _flatten(coefficients: Dict[Any, np.ndarray]) -> List[List[KElem]]:
    return [list(M.flat) for M in coefficients.values() if not linalg.is_zero_matrix(M)]


def _bivariate_product(factors: Sequence[Tuple[Sequence[np.ndarray], UPoly, int]], field_) -> Dict[Tuple, np.ndarray]:
    """Expand prod_t M_t(f_t(var_t)) as a polynomial in (x, y); var_t is 0 for x and 1 for y."""
    result: Dict[Tuple[int, int], np.ndarray] = {(0, 0): None}
    for coeffs, inner, var in factors:
        # M(f(w)) = sum_k M_k f(w)^k, expanded in powers of w
        expanded: Dict[int, np.ndarray] = {}
        power: UPoly = (field_.one,)
        for Mk in coeffs:
            for e, c in enumerate(power):
                if c:
                    term = Mk * c
                    expanded[e] = term if e not in expanded else expanded[e] + term
            power = _poly_mul(power, inner)
        step: Dict[Tuple[int, int], np.ndarray] = {}
        for (ex, ey), acc in result.items():
            for e, M in expanded.items():
                key = (ex + e, ey) if var == 0 else (ex, ey + e)
                term = M if acc is None else acc @ M
                step[key] = term if key not in step else step[key] + term
        result = step
    return result


def _poly_mul(p: UPoly, q: UPoly) -> UPoly:
    if not p or not q:
        return ()
    out = [None] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = a * b if out[i + j] is None else out[i + j] + a * b
    return _trim(out)


def _to_k(coeffs: Sequence[np.ndarray], field_) -> List[np.ndarray]:
    return [linalg.to_field(M, field_) for M in coeffs]


def span_preserved(
    prev: Generator,
    sched: ParamSchedule,
    alpha: int,
    left: Sequence[Sequence[np.ndarray]],
    right: Sequence[Sequence[np.ndarray]],
    variable: int = 1,
) -> bool:
    """Whether the coefficient span of prod M_j(f_j(x)) prod N_j(f_j(y)) lies in that of the combined product.

    ``left`` and ``right`` hold one matrix polynomial (coefficient list) per position of
    ``prev``; the combined product substitutes f'_j and f'_(h+j) of ``combine(prev, alpha)``.
    """
    half = 2**prev.level
    if len(left) != half or len(right) != half:
        raise ValueError(f"expected {half} left and right factors")
    field_ = sched.algebra.field
    left = [_to_k(c, field_) for c in left]
    right = [_to_k(c, field_) for c in right]
    old = [(left[j], prev.position(variable, j), 0) for j in range(half)]
    old += [(right[j], prev.position(variable, j), 1) for j in range(half)]
    before = _flatten(_bivariate_product(old, field_))
    lifted = combine(prev, sched, alpha)
    new = [(left[j], lifted.position(variable, j), 0) for j in range(half)]
    new += [(right[j], lifted.position(variable, half + j), 0) for j in range(half)]
    after = _flatten(_bivariate_product(new, field_))
    if not before:
        return True
    if not after:
        return False
    rank_after = linalg.rank(linalg.matrix(after, field_))
    return linalg.rank(linalg.matrix(after + before, field_)) == rank_after


def passing_alphas(prev: Generator, sched: ParamSchedule, left, right, variable: int = 1) -> List[int]:
    out = []
    for alpha in sched.W(prev.level + 1):
        if span_preserved(prev, sched, alpha, left, right, variable):
            out.append(alpha)
        else:
            logger.warning("alpha w^%d fails span preservation at level %d", alpha, prev.level + 1)
    if not out:
        logger.warning("no alpha in W_%d preserves the span: parameter-regime failure", prev.level + 1)
    return out


# -- rational shift points and brute-force families ------------------------


def rational_shift_points(nvars: int, dhat: int, seeds: Sequence[int]) -> List[Tuple[np.ndarray, ...]]:
    """Upper-shift substitutions x_v -> sum_j f^v_j(a) E_(j, j+1) with f^v_j(a) = a^(v N^j), N = nvars + 1.

    A word x_(v_1) ... x_(v_k) lands on entry (0, k) as a^(sum_j v_(j+1) N^j), so distinct
    words of length <= dhat get distinct exponents.
    """
    if dhat < 0 or nvars < 1:
        raise ValueError("need dhat >= 0 and nvars >= 1")
    base = nvars + 1
    points = []
    for seed in seeds:
        seed = Fraction(seed)
        point = []
        for v in range(1, nvars + 1):
            M = linalg.zeros(dhat + 1, dhat + 1)
            for j in range(dhat):
                M[j, j + 1] = seed ** (v * base**j)
            point.append(M)
        points.append(tuple(point))
    return points


Word = Tuple[int, ...]


def family_words(n: int, degree: int, homogeneous: bool = False) -> List[Word]:
    lengths = [degree] if homogeneous else range(degree + 1)
    return [w for k in lengths for w in itertools.product(range(1, n + 1), repeat=k)]


def abp_family(
    n: int, degree: int, coefficients: Sequence[int] = (-1, 0, 1), homogeneous: bool = False
) -> Iterator[Dict[Word, int]]:
    """Every nonzero noncommutative polynomial with the given coefficient alphabet on the words up to ``degree``."""
    words = family_words(n, degree, homogeneous)
    for choice in itertools.product(coefficients, repeat=len(words)):
        poly = {w: c for w, c in zip(words, choice) if c}
        if poly:
            yield poly


def evaluate_word_polynomial(coeffs: Dict[Word, int], elements: Sequence[DElem]) -> DElem:
    algebra = elements[0].algebra
    total = algebra.zero()
    for word, c in coeffs.items():
        term = algebra.scalar(c)
        for k in word:
            term = d_mul(term, elements[k - 1])
        total = d_add(total, term)
    return total


def point_elements(point: Sequence[np.ndarray], algebra: DivAlgebra) -> Tuple[DElem, ...]:
    """Read materialized circulants back as elements b_0 x."""
    return tuple(
        DElem(algebra, [algebra.field.zero, M[0, 1]] + [algebra.field.zero] * (algebra.ell - 2)) for M in point
    )
