"""Exact scalars: Q, the cyclotomic field Q(w) of power-of-two order, and K = Q(w)(z).

Elements are immutable. Arithmetic coerces ``int`` and ``Fraction`` operands and
returns ``NotImplemented`` for anything else, so numpy object arrays can broadcast
scalars over matrices.
"""

from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

from ncrit.exceptions import DenominatorVanishesError, FieldMismatchError

Rat = Fraction
Scalar = Union[int, Fraction]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def is_power_of_two(n: int) -> bool:
    return isinstance(n, int) and n >= 1 and n & (n - 1) == 0


def _check_order(order: int) -> None:
    if not is_power_of_two(order) or order < 2:
        raise ValueError(f"order must be a power of two >= 2, got {order!r}")


def parse_rat(value: Union[str, int, Fraction]) -> Fraction:
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


class CycloElem:
    """An element of Q[w]/(w^(order/2) + 1), stored densely by ascending power of w."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Scalar] = ()):
        _check_order(order)
        half = order // 2
        values = tuple(Fraction(c) for c in coeffs)
        if len(values) > half:
            raise ValueError(f"expected at most {half} coefficients, got {len(values)}; use cyclo_reduce")
        self.order = order
        self.coeffs = values + (_ZERO,) * (half - len(values))

    @classmethod
    def zero(cls, order: int) -> "CycloElem":
        return cls(order)

    @classmethod
    def one(cls, order: int) -> "CycloElem":
        return cls(order, [1])

    @classmethod
    def omega(cls, order: int, power: int = 1) -> "CycloElem":
        raw = [0] * order
        raw[power % order] = 1
        return cyclo_reduce(order, raw)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def degree(self) -> int:
        """Highest power of w with a nonzero coefficient (-1 for zero)."""
        for j in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[j]:
                return j
        return -1

    def _coerce(self, other) -> Optional["CycloElem"]:
        if isinstance(other, CycloElem):
            if other.order != self.order:
                raise FieldMismatchError(f"cyclotomic orders differ: {self.order} != {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.order, [other])
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycloElem(self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "CycloElem":
        return CycloElem(self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return CycloElem(self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.order, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        half = self.order // 2
        out = [_ZERO] * half
        # negacyclic convolution: w^half = -1
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if not b:
                    continue
                k = i + j
                if k >= half:
                    out[k - half] -= a * b
                else:
                    out[k] += a * b
        return CycloElem(self.order, out)

    __rmul__ = __mul__

    def conjugate_sign(self) -> "CycloElem":
        """a(-w)."""
        return CycloElem(self.order, [c if j % 2 == 0 else -c for j, c in enumerate(self.coeffs)])

    def inverse(self) -> "CycloElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(w)")
        if self.order == 2:
            return CycloElem(2, [1 / self.coeffs[0]])
        # a * a(-w) only has even powers, i.e. lies in the subfield Q(w^2)
        conj = self.conjugate_sign()
        norm = self * conj
        inner = CycloElem(self.order // 2, norm.coeffs[0::2]).inverse()
        lifted = [_ZERO] * (self.order // 2)
        lifted[0::2] = inner.coeffs
        return conj * CycloElem(self.order, lifted)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "CycloElem":
        base = self if exponent >= 0 else self.inverse()
        result = CycloElem.one(self.order)
        e = abs(exponent)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, exponent: int) -> "CycloElem":
        """Apply the automorphism w -> w^exponent (exponent odd)."""
        if exponent % 2 == 0:
            raise ValueError(f"galois exponent must be odd, got {exponent}")
        raw = [_ZERO] * self.order
        for j, c in enumerate(self.coeffs):
            if c:
                raw[(j * exponent) % self.order] += c
        return cyclo_reduce(self.order, raw)

    def evaluate(self, t: Scalar) -> Fraction:
        """Formal substitution w -> t into the reduced representative."""
        t = Fraction(t)
        total = _ZERO
        for c in reversed(self.coeffs):
            total = total * t + c
        return total

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloElem):
            return self.order == other.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if j == 0 else f"{c}*w^{j}")
        return f"CycloElem[{self.order}]({' + '.join(terms) or '0'})"


def cyclo_reduce(order: int, raw: Sequence[Scalar]) -> CycloElem:
    """Fold a raw coefficient vector in powers of w into the reduced basis."""
    _check_order(order)
    half = order // 2
    out = [_ZERO] * half
    for j, c in enumerate(raw):
        if not c:
            continue
        e = j % order
        if e >= half:
            out[e - half] -= Fraction(c)
        else:
            out[e] += Fraction(c)
    return CycloElem(order, out)


Poly = Tuple[CycloElem, ...]


def _trim(p: Sequence[CycloElem]) -> Poly:
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return tuple(p)


def _padd(p: Poly, q: Poly) -> Poly:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for k, c in enumerate(q):
        out[k] = out[k] + c
    return _trim(out)


def _pneg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def _pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    order = p[0].order
    out = [CycloElem.zero(order)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b
    return _trim(out)


def _pscale(p: Poly, c) -> Poly:
    return _trim([a * c for a in p])


def _pdivmod(p: Poly, q: Poly) -> Tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    order = q[0].order
    lead_inv = q[-1].inverse()
    rem = list(p)
    quot = [CycloElem.zero(order)] * max(len(p) - len(q) + 1, 0)
    while len(rem) >= len(q) and rem:
        shift = len(rem) - len(q)
        factor = rem[-1] * lead_inv
        quot[shift] = factor
        for k, c in enumerate(q):
            rem[shift + k] = rem[shift + k] - factor * c
        rem = list(_trim(rem))
    return _trim(quot), tuple(rem)


def _pmonic(p: Poly) -> Poly:
    lead = p[-1]
    if lead == 1:
        return p
    return _pscale(p, lead.inverse())


def _pgcd(p: Poly, q: Poly) -> Poly:
    while q:
        p, q = q, _pdivmod(p, q)[1]
    return _pmonic(p)


def _peval(p: Poly, x):
    total = None
    for c in reversed(p):
        total = c if total is None else total * x + c
    return total


class KElem:
    """A rational function num/den in z over Q(w), reduced with a monic denominator.

    Polynomials (den == 1) skip the gcd step on every operation.
    """

    __slots__ = ("order", "num", "den")

    def __init__(self, order: int, num: Sequence = (), den: Optional[Sequence] = None):
        _check_order(order)
        num_poly = _trim([_as_cyclo(order, c) for c in num])
        if den is None:
            den_poly = (CycloElem.one(order),)
        else:
            den_poly = _trim([_as_cyclo(order, c) for c in den])
        self.order = order
        self.num, self.den = _normalize(order, num_poly, den_poly)

    @classmethod
    def _raw(cls, order: int, num: Poly, den: Poly) -> "KElem":
        obj = cls.__new__(cls)
        obj.order, obj.num, obj.den = order, num, den
        return obj

    @classmethod
    def from_scalar(cls, order: int, value: Scalar) -> "KElem":
        return cls(order, [value])

    @classmethod
    def from_cyclo(cls, value: CycloElem) -> "KElem":
        return cls(value.order, [value])

    @classmethod
    def omega(cls, order: int, power: int = 1) -> "KElem":
        return cls(order, [CycloElem.omega(order, power)])

    @classmethod
    def z(cls, order: int) -> "KElem":
        return cls(order, [0, 1])

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def is_rational(self) -> bool:
        """True when the element lies in Q (no z, no w)."""
        return self.is_constant() and (not self.num or self.num[0].is_rational())

    def constant_cyclo(self) -> CycloElem:
        if not self.is_constant():
            raise ValueError("element depends on z")
        return self.num[0] if self.num else CycloElem.zero(self.order)

    def _coerce(self, other) -> Optional["KElem"]:
        if isinstance(other, KElem):
            if other.order != self.order:
                raise FieldMismatchError(f"field orders differ: {self.order} != {other.order}")
            return other
        if isinstance(other, (int, Fraction)):
            return KElem._raw(self.order, _trim([CycloElem(self.order, [other])]), (CycloElem.one(self.order),))
        if isinstance(other, CycloElem):
            if other.order != self.order:
                raise FieldMismatchError(f"field orders differ: {self.order} != {other.order}")
            return KElem._raw(self.order, _trim([other]), (CycloElem.one(self.order),))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_polynomial() and other.is_polynomial():
            return KElem._raw(self.order, _padd(self.num, other.num), self.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return KElem._normalized(self.order, num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self) -> "KElem":
        return KElem._raw(self.order, _pneg(self.num), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.num or not other.num:
            return KElem._raw(self.order, (), (CycloElem.one(self.order),))
        if self.is_polynomial() and other.is_polynomial():
            return KElem._raw(self.order, _pmul(self.num, other.num), self.den)
        return KElem._normalized(self.order, _pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "KElem":
        if not self.num:
            raise ZeroDivisionError("inverse of zero in K")
        return KElem._normalized(self.order, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "KElem":
        base = self if exponent >= 0 else self.inverse()
        result = KElem.from_scalar(self.order, 1)
        e = abs(exponent)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    @classmethod
    def _normalized(cls, order: int, num: Poly, den: Poly) -> "KElem":
        num, den = _normalize(order, num, den)
        return cls._raw(order, num, den)

    def galois(self, exponent: int) -> "KElem":
        """Apply w -> w^exponent to every cyclotomic coefficient; z is fixed."""
        num = tuple(c.galois(exponent) for c in self.num)
        den = tuple(c.galois(exponent) for c in self.den)
        return KElem._raw(self.order, num, den)

    def specialize_z(self, t: Scalar) -> CycloElem:
        den = _peval(self.den, Fraction(t))
        if den.is_zero():
            raise DenominatorVanishesError(f"denominator vanishes at z = {t}")
        if not self.num:
            return CycloElem.zero(self.order)
        return _peval(self.num, Fraction(t)) / den

    def z_degrees(self) -> Tuple[int, int]:
        return len(self.num) - 1, len(self.den) - 1

    def bidegree(self) -> int:
        """Largest total degree in (w, z) over the reduced numerator and denominator."""
        best = 0
        for poly in (self.num, self.den):
            for k, c in enumerate(poly):
                if not c.is_zero():
                    best = max(best, k + c.degree())
        return best

    def __eq__(self, other) -> bool:
        if isinstance(other, KElem):
            return self.order == other.order and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, CycloElem)):
            try:
                other = self._coerce(other)
            except FieldMismatchError:
                return False
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.num[0].coeffs[0] if self.num else _ZERO)
        return hash((self.order, self.num, self.den))

    def __repr__(self) -> str:
        def show(poly):
            parts = []
            for k, c in enumerate(poly):
                if not c.is_zero():
                    inner = repr(c)[len(f"CycloElem[{self.order}]") :]
                    parts.append(inner if k == 0 else f"{inner}*z^{k}")
            return " + ".join(parts) or "0"

        if self.is_polynomial():
            return f"KElem[{self.order}]({show(self.num)})"
        return f"KElem[{self.order}](({show(self.num)}) / ({show(self.den)}))"


def _as_cyclo(order: int, value) -> CycloElem:
    if isinstance(value, CycloElem):
        if value.order != order:
            raise FieldMismatchError(f"field orders differ: {order} != {value.order}")
        return value
    if isinstance(value, (int, Fraction)):
        return CycloElem(order, [value])
    if isinstance(value, (list, tuple)):
        return CycloElem(order, value)
    raise FieldMismatchError(f"cannot read {value!r} as an element of Q(w)")


def _normalize(order: int, num: Poly, den: Poly) -> Tuple[Poly, Poly]:
    if not den:
        raise ZeroDivisionError("zero denominator")
    one = CycloElem.one(order)
    if not num:
        return (), (one,)
    if len(den) > 1:
        g = _pgcd(num, den)
        if len(g) > 1:
            num = _pdivmod(num, g)[0]
            den = _pdivmod(den, g)[0]
    lead = den[-1]
    if lead != 1:
        inv = lead.inverse()
        num = _pscale(num, inv)
        den = _pscale(den, inv)
    return num, den


class Sigma:
    """The automorphism w -> w^(2^kappa + 1) of K, fixing F = Q(z)."""

    def __init__(self, order: int, kappa: int):
        _check_order(order)
        if kappa < 1:
            raise ValueError(f"kappa must be positive, got {kappa}")
        self.order = order
        self.kappa = kappa

    @property
    def exponent(self) -> int:
        return 2**self.kappa + 1

    def power_exponent(self, times: int) -> int:
        if times < 0:
            raise ValueError("sigma powers must be nonnegative")
        return pow(self.exponent, times, self.order)

    def order_on_omega(self) -> int:
        step = self.exponent % self.order
        current, count = step, 1
        while current != 1:
            current = current * step % self.order
            count += 1
        return count

    def apply(self, element, times: int = 1):
        return sigma_apply(element, self, times)

    def __eq__(self, other) -> bool:
        return isinstance(other, Sigma) and (self.order, self.kappa) == (other.order, other.kappa)

    def __hash__(self) -> int:
        return hash((self.order, self.kappa))

    def __repr__(self) -> str:
        return f"Sigma(order={self.order}, kappa={self.kappa})"


def sigma_apply(element, sigma: Sigma, times: int = 1):
    if isinstance(element, (int, Fraction)):
        return element
    if element.order != sigma.order:
        raise FieldMismatchError(f"sigma of order {sigma.order} applied to an element of order {element.order}")
    exponent = sigma.power_exponent(times)
    if exponent == 1:
        return element
    return element.galois(exponent)


def eval_at_rationals(element, t1: Scalar, t2: Scalar) -> Fraction:
    """Substitute w -> t1, z -> t2 into the reduced representative."""
    if isinstance(element, (int, Fraction)):
        return Fraction(element)
    if isinstance(element, CycloElem):
        return element.evaluate(t1)
    t2 = Fraction(t2)

    def value(poly):
        total = _ZERO
        for c in reversed(poly):
            total = total * t2 + c.evaluate(t1)
        return total

    den = value(element.den)
    if den == 0:
        raise DenominatorVanishesError(f"denominator vanishes at (w, z) = ({t1}, {t2})")
    return value(element.num) / den


class RationalField:
    name = "Q"
    order = None
    zero = _ZERO
    one = _ONE

    def coerce(self, value) -> Fraction:
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        if isinstance(value, str):
            return parse_rat(value)
        raise FieldMismatchError(f"{value!r} is not a rational number")

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("Q")

    def __repr__(self) -> str:
        return "QQ"


QQ = RationalField()


class CyclotomicField:
    name = "Qw"

    def __init__(self, order: int):
        _check_order(order)
        self.order = order

    @property
    def zero(self) -> CycloElem:
        return CycloElem.zero(self.order)

    @property
    def one(self) -> CycloElem:
        return CycloElem.one(self.order)

    def coerce(self, value) -> CycloElem:
        return _as_cyclo(self.order, value)

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclotomicField) and other.order == self.order

    def __hash__(self) -> int:
        return hash(("Qw", self.order))

    def __repr__(self) -> str:
        return f"CyclotomicField({self.order})"


class CyclotomicFunctionField:
    """K = Q(w)(z) for a fixed power-of-two order."""

    name = "K"

    def __init__(self, order: int):
        _check_order(order)
        self.order = order

    @property
    def zero(self) -> KElem:
        return KElem(self.order)

    @property
    def one(self) -> KElem:
        return KElem.from_scalar(self.order, 1)

    def omega(self, power: int = 1) -> KElem:
        return KElem.omega(self.order, power)

    def z(self) -> KElem:
        return KElem.z(self.order)

    def coerce(self, value) -> KElem:
        if isinstance(value, KElem):
            if value.order != self.order:
                raise FieldMismatchError(f"field orders differ: {self.order} != {value.order}")
            return value
        if isinstance(value, str):
            value = parse_rat(value)
        if isinstance(value, (int, Fraction, CycloElem)):
            return KElem(self.order, [value])
        raise FieldMismatchError(f"cannot coerce {value!r} into K of order {self.order}")

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclotomicFunctionField) and other.order == self.order

    def __hash__(self) -> int:
        return hash(("K", self.order))

    def __repr__(self) -> str:
        return f"CyclotomicFunctionField({self.order})"


def field_of(value):
    if isinstance(value, KElem):
        return CyclotomicFunctionField(value.order)
    if isinstance(value, CycloElem):
        return CyclotomicField(value.order)
    if isinstance(value, (int, Fraction)):
        return QQ
    raise FieldMismatchError(f"{value!r} is not a field element")
