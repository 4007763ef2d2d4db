"""The cyclic algebra D = (K/F, sigma, z) = K + Kx + ... + Kx^(l-1) with x^l = z and x b = sigma(b) x."""

import logging
import random
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ncrit import linalg
from ncrit.exceptions import CertificationError, FieldMismatchError, NotInSpanError, ShapeError, SingularMatrixError
from ncrit.fields import (
    QQ,
    CycloElem,
    CyclotomicFunctionField,
    KElem,
    Sigma,
    field_of,
    is_power_of_two,
    sigma_apply,
)

logger = logging.getLogger(__name__)


class DivAlgebra:
    def __init__(self, ell: int, kappa: int):
        if ell < 2 or not is_power_of_two(ell):
            raise ValueError(f"the index must be a power of two >= 2, got {ell}")
        self.ell = ell
        self.kappa = kappa
        self.sigma = Sigma(ell, kappa)
        self.field = CyclotomicFunctionField(ell)

    def __eq__(self, other) -> bool:
        return isinstance(other, DivAlgebra) and (self.ell, self.kappa) == (other.ell, other.kappa)

    def __hash__(self) -> int:
        return hash((self.ell, self.kappa))

    def __repr__(self) -> str:
        return f"DivAlgebra(ell={self.ell}, kappa={self.kappa})"

    def k(self, value) -> KElem:
        return self.field.coerce(value)

    def zero(self) -> "DElem":
        return DElem(self, [self.field.zero] * self.ell)

    def one(self) -> "DElem":
        return self.scalar(1)

    def scalar(self, value) -> "DElem":
        coeffs = [self.field.zero] * self.ell
        coeffs[0] = self.k(value)
        return DElem(self, coeffs)

    def x(self, power: int = 1) -> "DElem":
        """x^power; powers of l and above fold through x^l = z."""
        if power < 0:
            raise ValueError("use d_inverse for negative powers of x")
        coeffs = [self.field.zero] * self.ell
        coeffs[power % self.ell] = self.field.z() ** (power // self.ell)
        return DElem(self, coeffs)

    def omega(self, power: int = 1) -> "DElem":
        return self.scalar(self.field.omega(power))

    def sigma_of(self, value: KElem, times: int = 1) -> KElem:
        return sigma_apply(value, self.sigma, times)

    def span_rank(self) -> int:
        """Dimension over K of the span of the C basis: l times the order of sigma on w."""
        return self.ell * self.sigma.order_on_omega()

    def random_element(self, rng: random.Random, coeff_range: int = 1, z_degree: int = 1, density: float = 0.6):
        coeffs = []
        for _ in range(self.ell):
            if rng.random() > density:
                coeffs.append(self.field.zero)
                continue
            poly = [
                [rng.randint(-coeff_range, coeff_range) for _ in range(self.ell // 2)] for _ in range(z_degree + 1)
            ]
            coeffs.append(KElem(self.ell, poly))
        return DElem(self, coeffs)


class DElem:
    """b_0 + b_1 x + ... + b_(l-1) x^(l-1) with every b_i in K."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: DivAlgebra, coeffs: Sequence):
        if len(coeffs) != algebra.ell:
            raise ShapeError(f"expected {algebra.ell} coefficients, got {len(coeffs)}")
        self.algebra = algebra
        self.coeffs: Tuple[KElem, ...] = tuple(algebra.k(c) for c in coeffs)

    def _check(self, other: "DElem") -> None:
        if not isinstance(other, DElem):
            raise TypeError(f"expected a DElem, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise FieldMismatchError(f"elements of {self.algebra} and {other.algebra} do not mix")

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other: "DElem") -> "DElem":
        return d_add(self, other)

    def __neg__(self) -> "DElem":
        return DElem(self.algebra, [-c for c in self.coeffs])

    def __sub__(self, other: "DElem") -> "DElem":
        self._check(other)
        return DElem(self.algebra, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other) -> "DElem":
        if isinstance(other, DElem):
            return d_mul(self, other)
        return d_mul(self, self.algebra.scalar(other))

    def __rmul__(self, other) -> "DElem":
        return d_mul(self.algebra.scalar(other), self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DElem):
            return NotImplemented
        return self.algebra == other.algebra and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.algebra, self.coeffs))

    def __repr__(self) -> str:
        terms = [f"({c!r})*x^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"DElem[{self.algebra.ell}]({' + '.join(terms) or '0'})"

    def to_matrix(self) -> np.ndarray:
        return matrix_rep(self)

    def inverse(self) -> "DElem":
        return d_inverse(self)

    def to_dict(self):
        from ncrit.utils import k_to_json

        return {"ell": self.algebra.ell, "kappa": self.algebra.kappa, "coeffs": [k_to_json(c) for c in self.coeffs]}


def d_add(u: DElem, v: DElem) -> DElem:
    u._check(v)
    return DElem(u.algebra, [a + b for a, b in zip(u.coeffs, v.coeffs)])


def d_mul(u: DElem, v: DElem) -> DElem:
    u._check(v)
    algebra = u.algebra
    ell = algebra.ell
    z = algebra.field.z()
    out = [algebra.field.zero] * ell
    for i, a in enumerate(u.coeffs):
        if not a:
            continue
        for j, b in enumerate(v.coeffs):
            if not b:
                continue
            term = a * algebra.sigma_of(b, i)
            k = i + j
            if k >= ell:
                k -= ell
                term = term * z
            out[k] = out[k] + term
    return DElem(algebra, out)


def d_pow(u: DElem, exponent: int) -> DElem:
    if exponent < 0:
        return d_pow(d_inverse(u), -exponent)
    result = u.algebra.one()
    for _ in range(exponent):
        result = d_mul(result, u)
    return result


def cir(values: Sequence, ell: Optional[int] = None) -> np.ndarray:
    """(i, i+1) entry values[i] for i < l-1 and (l-1, 0) entry values[l-1]."""
    n = len(values)
    if ell is not None and n != ell:
        raise ShapeError(f"cir needs {ell} entries, got {n}")
    if n < 1:
        raise ShapeError("cir of an empty vector")
    field = QQ if isinstance(values[0], int) else field_of(values[0])
    out = linalg.zeros(n, n, field)
    for i, value in enumerate(values):
        out[i, (i + 1) % n] = field.coerce(value)
    return out


def m_x(algebra: DivAlgebra) -> np.ndarray:
    return cir([algebra.field.one] * (algebra.ell - 1) + [algebra.field.z()])


def m_scalar(algebra: DivAlgebra, b) -> np.ndarray:
    """diag(b, sigma(b), ..., sigma^(l-1)(b))."""
    b = algebra.k(b)
    out = linalg.zeros(algebra.ell, algebra.ell, algebra.field)
    for i in range(algebra.ell):
        out[i, i] = algebra.sigma_of(b, i)
    return out


@lru_cache(maxsize=None)
def _x_powers(algebra: DivAlgebra) -> Tuple[np.ndarray, ...]:
    mx = m_x(algebra)
    powers = [linalg.identity(algebra.ell, algebra.field)]
    for _ in range(algebra.ell - 1):
        powers.append(powers[-1] @ mx)
    return tuple(powers)


def matrix_rep(u: DElem) -> np.ndarray:
    """Left regular representation sum_i M(b_i) M(x)^i; row 0 reads back the coefficients."""
    algebra = u.algebra
    out = linalg.zeros(algebra.ell, algebra.ell, algebra.field)
    powers = _x_powers(algebra)
    for i, b in enumerate(u.coeffs):
        if b:
            out = out + m_scalar(algebra, b) @ powers[i]
    return out


def from_matrix(algebra: DivAlgebra, A: np.ndarray) -> DElem:
    """Read an element off row 0 of its representation; the re-encode must reproduce A."""
    if A.shape != (algebra.ell, algebra.ell):
        raise ShapeError(f"expected an {algebra.ell}x{algebra.ell} matrix, got {A.shape}")
    element = DElem(algebra, list(A[0, :]))
    if not linalg.matrices_equal(matrix_rep(element), A):
        raise NotInSpanError("matrix is not the regular representation of an element of D")
    return element


def d_inverse(u: DElem) -> DElem:
    if u.is_zero():
        raise ZeroDivisionError("inverse of zero in D")
    algebra = u.algebra
    try:
        inverse = linalg.inverse(matrix_rep(u))
    except SingularMatrixError:
        logger.warning("singular regular representation for nonzero element %r of %r", u, algebra)
        raise
    try:
        result = from_matrix(algebra, inverse)
    except NotInSpanError as exc:
        raise CertificationError(f"inverse of {u!r} fails the re-encode check") from exc
    if d_mul(u, result) != algebra.one():
        raise CertificationError(f"u * u^-1 != 1 for {u!r}")
    return result


def sigma_chain(algebra: DivAlgebra, b) -> List[KElem]:
    return [algebra.sigma_of(algebra.k(b), i) for i in range(algebra.ell)]


def circulant_of(algebra: DivAlgebra, values: Sequence) -> np.ndarray:
    """cir(v_0, ..., v_(l-2), z v_(l-1)), the shape of a materialized hitting point."""
    values = [algebra.k(v) for v in values]
    if len(values) != algebra.ell:
        raise ShapeError(f"expected {algebra.ell} values, got {len(values)}")
    return cir(values[:-1] + [algebra.field.z() * values[-1]])


def is_sigma_chain(algebra: DivAlgebra, values: Sequence) -> bool:
    return all(values[j + 1] == algebra.sigma_of(values[j]) for j in range(len(values) - 1))


def basis_C(algebra: DivAlgebra, i: int, j: int) -> np.ndarray:
    """C_(i,j) = M(w^(j-1)) M(x^(i-1)), 1-based."""
    ell = algebra.ell
    if not (1 <= i <= ell and 1 <= j <= ell):
        raise ShapeError(f"C basis index ({i}, {j}) out of range for l={ell}")
    return m_scalar(algebra, algebra.field.omega(j - 1)) @ _x_powers(algebra)[i - 1]


def express_in_C(algebra: DivAlgebra, A: np.ndarray) -> np.ndarray:
    """Coefficients y with sum_(i,j) y[i-1, j-1] C_(i,j) = A.

    The C basis spans only ``span_rank()`` dimensions. Each cyclic diagonal is solved as a
    Vandermonde system on the distinct nodes sigma^r(w), using j = 1..order(sigma); the
    remaining rows must agree, else the matrix is outside the span.
    """
    ell = algebra.ell
    if A.shape != (ell, ell):
        raise ShapeError(f"expected an {ell}x{ell} matrix, got {A.shape}")
    A = linalg.to_field(A, algebra.field)
    period = algebra.sigma.order_on_omega()
    nodes = [algebra.sigma_of(algebra.field.omega(), r) for r in range(period)]
    vandermonde = linalg.matrix([[node**j for j in range(period)] for node in nodes], algebra.field)
    vinv = linalg.inverse(vandermonde)
    z = algebra.field.z()
    y = linalg.zeros(ell, ell, algebra.field)
    for k in range(ell):
        # entry (r, r+k) of C_(k+1, j) is (sigma^r w)^(j-1), times z past the wrap
        targets = [A[r, (r + k) % ell] / z if r + k >= ell else A[r, (r + k) % ell] for r in range(ell)]
        rhs = linalg.matrix([[t] for t in targets[:period]], algebra.field)
        solution = vinv @ rhs
        for r in range(period, ell):
            predicted = sum((solution[j, 0] * nodes[r % period] ** j for j in range(1, period)), solution[0, 0])
            if predicted != targets[r]:
                raise NotInSpanError(f"diagonal {k} is not sigma-periodic; the matrix is outside the C span")
        for j in range(period):
            y[k, j] = solution[j, 0]
    return y


def combine_C(algebra: DivAlgebra, y: np.ndarray) -> np.ndarray:
    out = linalg.zeros(algebra.ell, algebra.ell, algebra.field)
    for i in range(algebra.ell):
        for j in range(algebra.ell):
            if y[i, j]:
                out = out + basis_C(algebra, i + 1, j + 1) * y[i, j]
    return out


def c_basis_matrix(algebra: DivAlgebra) -> np.ndarray:
    """Columns are the vectorized C_(i,j); its rank is ``span_rank()``."""
    ell = algebra.ell
    columns = [basis_C(algebra, i, j).reshape(ell * ell) for i in range(1, ell + 1) for j in range(1, ell + 1)]
    return np.column_stack(columns)


def express_element_in_C(u: DElem) -> np.ndarray:
    return express_in_C(u.algebra, matrix_rep(u))


def sigma_fixes_level(algebra: DivAlgebra, level: int, a_level: int) -> bool:
    """Whether sigma^(2^level) fixes w^(2^a_level)."""
    w = CycloElem.omega(algebra.ell, 2**a_level)
    return sigma_apply(KElem.from_cyclo(w), algebra.sigma, 2**level) == KElem.from_cyclo(w)
