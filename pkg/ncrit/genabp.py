"""Generalized ABPs over a matrix coefficient algebra and the strong hitting set built from them.

Edges carry generalized linear forms sum a x_k b. Evaluating at km x km matrices embeds the
coefficients with an inclusion map, either a (x) I_k (``"a@I"``) or I_k (x) a (``"I@a"``).
"""

import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ncrit import linalg
from ncrit.divalg import DivAlgebra, basis_C, matrix_rep
from ncrit.exceptions import CertificationError, EncodingCollisionError, InfeasibleParametersError, ShapeError
from ncrit.fsgen import HittingSet
from ncrit.types import HittingSetHeader
from ncrit.utils import DeskParams, rat_to_str

logger = logging.getLogger(__name__)

IOTA_RIGHT = "a@I"
IOTA_LEFT = "I@a"

Term = Tuple[np.ndarray, int, np.ndarray]
Letter = Tuple[int, int, int]


def embed(a: np.ndarray, k: int, iota: str = IOTA_RIGHT) -> np.ndarray:
    if k == 1:
        return a
    eye = linalg.identity(k, linalg.like_field(a))
    if iota == IOTA_RIGHT:
        return np.kron(a, eye)
    if iota == IOTA_LEFT:
        return np.kron(eye, a)
    raise ValueError(f"unknown inclusion map {iota!r}")


def _point_scale(point: Sequence[np.ndarray], m: int) -> int:
    size = point[0].shape[0]
    if size % m:
        raise ShapeError(f"point dimension {size} is not a multiple of the coefficient dimension {m}")
    return size // m


@dataclass(frozen=True)
class GenLinForm:
    """sum of a x_k b over its terms; every coefficient is an m x m matrix."""

    terms: Tuple[Term, ...]
    dim: int

    def __post_init__(self):
        for a, k, b in self.terms:
            if a.shape != (self.dim, self.dim) or b.shape != (self.dim, self.dim):
                raise ShapeError(f"coefficients of a generalized linear form must be {self.dim}x{self.dim}")
            if k < 1:
                raise ValueError("variable indices start at 1")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, point: Sequence[np.ndarray], iota: str = IOTA_RIGHT) -> np.ndarray:
        scale = _point_scale(point, self.dim)
        size = point[0].shape[0]
        out = None
        for a, k, b in self.terms:
            term = embed(a, scale, iota) @ point[k - 1] @ embed(b, scale, iota)
            out = term if out is None else out + term
        if out is None:
            return linalg.zeros(size, size, linalg.like_field(point[0]))
        return out


def psi_letters(layer: Sequence[Sequence[GenLinForm]], m: int) -> Dict[Letter, np.ndarray]:
    """Replace x_k by the m x m matrix of fresh variables z_(i,j,k).

    The letter z_(i,j,k) gets the (r m) x (r m) matrix whose block (p, q) is
    sum a E_ij b over the terms of entry (p, q) that read x_k; zero letters are omitted.
    """
    r = len(layer)
    field = None
    for row in layer:
        for form in row:
            for a, _, _ in form.terms:
                field = linalg.like_field(a)
                break
    if field is None:
        return {}
    letters: Dict[Letter, np.ndarray] = {}
    for p in range(r):
        for q in range(r):
            for a, k, b in layer[p][q].terms:
                for i in range(m):
                    for j in range(m):
                        contribution = np.multiply.outer(a[:, i], b[j, :])
                        if linalg.is_zero_matrix(contribution):
                            continue
                        key = (i + 1, j + 1, k)
                        if key not in letters:
                            letters[key] = linalg.zeros(r * m, r * m, field)
                        letters[key][p * m : (p + 1) * m, q * m : (q + 1) * m] += contribution
    return {key: N for key, N in sorted(letters.items()) if not linalg.is_zero_matrix(N)}


@dataclass(frozen=True)
class GenABP:
    """Layered generalized ABP c * L_1 * ... * L_d * b over m x m coefficients."""

    c: Tuple[np.ndarray, ...]
    layers: Tuple[Tuple[Tuple[GenLinForm, ...], ...], ...]
    b: Tuple[np.ndarray, ...]
    dim: int

    def __post_init__(self):
        r = self.width
        if len(self.b) != r:
            raise ShapeError(f"boundary widths differ: {r} and {len(self.b)}")
        for layer in self.layers:
            if len(layer) != r or any(len(row) != r for row in layer):
                raise ShapeError(f"every layer must be {r}x{r}")

    @property
    def width(self) -> int:
        return len(self.c)

    @property
    def degree(self) -> int:
        return len(self.layers)

    @classmethod
    def from_word(cls, coefficients: Sequence[np.ndarray], variables: Sequence[int]) -> "GenABP":
        """The width-1 program a_0 x_(k_1) a_1 ... x_(k_d) a_d."""
        if len(coefficients) != len(variables) + 1:
            raise ValueError("a word with d variables needs d + 1 coefficients")
        m = coefficients[0].shape[0]
        eye = linalg.identity(m, linalg.like_field(coefficients[0]))
        layers = tuple(((GenLinForm(((eye, k, a),), m),),) for k, a in zip(variables, coefficients[1:]))
        return cls(c=(coefficients[0],), layers=layers, b=(eye,), dim=m)

    @classmethod
    def sum_of_words(cls, words: Sequence[Tuple[Sequence[np.ndarray], Sequence[int]]]) -> "GenABP":
        """A width-w program computing the sum of w generalized words of one common degree."""
        parts = [cls.from_word(coeffs, variables) for coeffs, variables in words]
        degree = {p.degree for p in parts}
        if len(degree) != 1:
            raise ValueError("all words must have the same degree")
        m = parts[0].dim
        field = linalg.like_field(parts[0].c[0])
        w = len(parts)
        empty = GenLinForm((), m)
        layers = []
        for t in range(parts[0].degree):
            rows = []
            for p in range(w):
                rows.append(tuple(parts[p].layers[t][0][0] if q == p else empty for q in range(w)))
            layers.append(tuple(rows))
        eye = linalg.identity(m, field)
        return cls(c=tuple(p.c[0] for p in parts), layers=tuple(layers), b=(eye,) * w, dim=m)

    def evaluate(self, point: Sequence[np.ndarray], iota: str = IOTA_RIGHT) -> np.ndarray:
        scale = _point_scale(point, self.dim)
        size = point[0].shape[0]
        row = [embed(c, scale, iota) for c in self.c]
        for layer in self.layers:
            values = [[form.evaluate(point, iota) for form in layer_row] for layer_row in layer]
            row = [
                _sum_products([(row[p], values[p][q]) for p in range(self.width)], size, point[0])
                for q in range(self.width)
            ]
        return _sum_products([(row[p], embed(self.b[p], scale, iota)) for p in range(self.width)], size, point[0])

    def boundary(self) -> Tuple[np.ndarray, np.ndarray]:
        """(m x rm) row of c blocks and (rm x m) column of b blocks."""
        return np.hstack(self.c), np.vstack(self.b)

    def word_coefficients(self) -> Dict[Tuple[Letter, ...], np.ndarray]:
        """Expand psi(B) over the free monoid in the z_(i,j,k): word -> m x m coefficient (nonzero only)."""
        left, right = self.boundary()
        frontier = {(): left}
        for layer in self.layers:
            letters = psi_letters(layer, self.dim)
            step = {}
            for word, vec in frontier.items():
                for letter, N in letters.items():
                    nxt = vec @ N
                    if not linalg.is_zero_matrix(nxt):
                        step[word + (letter,)] = nxt
            frontier = step
        out = {}
        for word, vec in frontier.items():
            value = vec @ right
            if not linalg.is_zero_matrix(value):
                out[word] = value
        return out


def _sum_products(pairs, size, like) -> np.ndarray:
    out = None
    for a, b in pairs:
        term = a @ b
        out = term if out is None else out + term
    if out is None:
        return linalg.zeros(size, size, linalg.like_field(like))
    return out


def q0_matrix(ell: int, d: int) -> np.ndarray:
    """Permutation with q0 (I_d (x) a) q0^-1 = a (x) I_d; row i d + j - 1 has its 1 in column (j - 1) l + i."""
    if ell < 1 or d < 1:
        raise ValueError("ell and d must be positive")
    perm = [0] * (ell * d)
    for i in range(ell):
        for j in range(1, d + 1):
            perm[(j - 1) * ell + i] = i * d + j - 1
    return linalg.permutation_matrix(perm)


# -- commutative polynomials in the y variables ----------------------------

Monomial = Tuple[Tuple[Hashable, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for var, e in b:
        powers[var] = powers.get(var, 0) + e
    return tuple(sorted(powers.items()))


class SparsePoly:
    """Commutative polynomial as a dict from monomials to field coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Monomial, Any]] = None):
        self.terms = {mono: c for mono, c in (terms or {}).items() if c}

    @classmethod
    def variable(cls, var: Hashable, coefficient=1) -> "SparsePoly":
        return cls({((var, 1),): coefficient})

    @classmethod
    def constant(cls, value) -> "SparsePoly":
        return cls({(): value})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _coerce(self, other) -> Optional["SparsePoly"]:
        if isinstance(other, SparsePoly):
            return other
        if isinstance(other, np.ndarray):
            return None
        return SparsePoly.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms[mono] + c if mono in terms else c
        return SparsePoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return SparsePoly({mono: -c for mono, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms: Dict[Monomial, Any] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                value = c1 * c2
                terms[mono] = terms[mono] + value if mono in terms else value
        return SparsePoly(terms)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __repr__(self) -> str:
        return f"SparsePoly({len(self.terms)} terms)"

    def variables(self) -> set:
        return {var for mono in self.terms for var, _ in mono}

    def evaluate(self, assignment: Dict[Hashable, Any], zero=Fraction(0)):
        total = zero
        for mono, c in self.terms.items():
            term = c
            for var, e in mono:
                term = term * assignment[var] ** e
            total = total + term
        return total

    def substitute(self, rename) -> "SparsePoly":
        """Map every variable to (new_var, multiplier): var^e -> new_var^(e * multiplier)."""
        terms: Dict[Monomial, Any] = {}
        for mono, c in self.terms.items():
            powers: Dict[Hashable, int] = {}
            for var, e in mono:
                new_var, mult = rename(var)
                powers[new_var] = powers.get(new_var, 0) + e * mult
            key = tuple(sorted(powers.items()))
            terms[key] = terms[key] + c if key in terms else c
        return SparsePoly(terms)


def poly_matrix(A: np.ndarray) -> np.ndarray:
    return linalg.map_entries(A, lambda v: v if isinstance(v, SparsePoly) else SparsePoly.constant(v))


def is_zero_poly_matrix(A: np.ndarray) -> bool:
    return not any(bool(v) for v in A.flat)


# -- the shifted cyclic substitution ---------------------------------------


def y_var(i: int, j: int, k: int, l: int) -> Tuple[str, int, int, int, int]:
    return ("y", i, j, k, l)


def cyclic_permutation(i: int, d: int) -> List[int]:
    """pi_i on [d] with pi_i(1) = i, pi_i(2) = i + 1, ..."""
    return [(i - 1 + t) % d + 1 for t in range(d)]


@dataclass(frozen=True)
class ShiftedSubstitution:
    """x_k -> Z~_k, the dl x dl block shift whose block (l, l+1) is Z~_(k,l) = sum_(i,j) y_(ijkl) C_(i,j)."""

    algebra: DivAlgebra
    n: int
    d: int

    def block(self, k: int, l: int) -> np.ndarray:
        ell = self.algebra.ell
        out = np.empty((ell, ell), dtype=object)
        for idx in np.ndindex(ell, ell):
            out[idx] = SparsePoly()
        for i in range(1, ell + 1):
            for j in range(1, ell + 1):
                y = SparsePoly.variable(y_var(i, j, k, l))
                C = basis_C(self.algebra, i, j)
                for idx, value in np.ndenumerate(C):
                    if value:
                        out[idx] = out[idx] + y * value
        return out

    def matrix(self, k: int) -> np.ndarray:
        ell, d = self.algebra.ell, self.d
        out = np.empty((d * ell, d * ell), dtype=object)
        for idx in np.ndindex(d * ell, d * ell):
            out[idx] = SparsePoly()
        for l in range(1, d + 1):
            row = (l - 1) * ell
            col = (l % d) * ell
            out[row : row + ell, col : col + ell] = self.block(k, l)
        return out

    def matrices(self) -> Tuple[np.ndarray, ...]:
        return tuple(self.matrix(k) for k in range(1, self.n + 1))

    def permutations(self) -> List[List[int]]:
        return [cyclic_permutation(i, self.d) for i in range(1, self.d + 1)]

    def numeric_block(self, k: int, l: int, values: Dict[Hashable, Any]) -> np.ndarray:
        out = linalg.zeros(self.algebra.ell, self.algebra.ell, self.algebra.field)
        for i in range(1, self.algebra.ell + 1):
            for j in range(1, self.algebra.ell + 1):
                y = values[y_var(i, j, k, l)]
                if y:
                    out = out + basis_C(self.algebra, i, j) * y
        return out

    def numeric_matrix(self, k: int, values: Dict[Hashable, Any]) -> np.ndarray:
        ell, d = self.algebra.ell, self.d
        out = linalg.zeros(d * ell, d * ell, self.algebra.field)
        for l in range(1, d + 1):
            row = (l - 1) * ell
            col = (l % d) * ell
            out[row : row + ell, col : col + ell] = self.numeric_block(k, l, values)
        return out


@dataclass(frozen=True)
class SetMultilinearABP:
    """Commutative ABP whose t-th layer is linear in the y variables of block ``order[t]``."""

    left: np.ndarray
    layers: Tuple[np.ndarray, ...]
    right: np.ndarray
    order: Tuple[int, ...]
    n: int

    @property
    def width(self) -> int:
        return self.left.shape[1]

    def expand(self) -> np.ndarray:
        acc = poly_matrix(self.left)
        for layer in self.layers:
            acc = acc @ layer
        return acc @ poly_matrix(self.right)

    def evaluate(self, values: Dict[Hashable, Any]) -> np.ndarray:
        zero = linalg.like_field(self.left).zero
        acc = self.left
        for layer in self.layers:
            acc = acc @ linalg.map_entries(layer, lambda p: p.evaluate(values, zero))
        return acc @ self.right

    def is_zero(self) -> bool:
        return is_zero_poly_matrix(self.expand())


def _layer_forms(layer, algebra: DivAlgebra, block_index: int) -> np.ndarray:
    ell = algebra.ell
    r = len(layer)
    out = np.empty((r * ell, r * ell), dtype=object)
    for idx in np.ndindex(r * ell, r * ell):
        out[idx] = SparsePoly()
    for p in range(r):
        for q in range(r):
            for a, k, b in layer[p][q].terms:
                for i in range(1, ell + 1):
                    for j in range(1, ell + 1):
                        coeff = a @ basis_C(algebra, i, j) @ b
                        y = SparsePoly.variable(y_var(i, j, k, block_index))
                        for (u, v), value in np.ndenumerate(coeff):
                            if value:
                                cell = (p * ell + u, q * ell + v)
                                out[cell] = out[cell] + y * value
    return out


def shifted_cyclic_eval(B: GenABP, algebra: DivAlgebra, n: Optional[int] = None) -> List[SetMultilinearABP]:
    """The d diagonal blocks B^(pi_i) of B(Z~) under I_d (x) a, as set-multilinear ABPs of width r l."""
    if B.dim != algebra.ell:
        raise ShapeError(f"coefficients are {B.dim}x{B.dim}, expected {algebra.ell}x{algebra.ell}")
    d = B.degree
    n = n or max((k for layer in B.layers for row in layer for f in row for _, k, _ in f.terms), default=1)
    left, right = B.boundary()
    blocks = []
    for i in range(1, max(d, 1) + 1):
        order = tuple(cyclic_permutation(i, d)) if d else ()
        layers = tuple(_layer_forms(layer, algebra, l) for layer, l in zip(B.layers, order))
        blocks.append(SetMultilinearABP(left=left, layers=layers, right=right, order=order, n=n))
    return blocks


def evaluate_substitution(B: GenABP, subst: ShiftedSubstitution) -> np.ndarray:
    """B(Z~) under iota' = I_d (x) a, expanded symbolically."""
    point = tuple(subst.matrix(k) for k in range(1, subst.n + 1))
    scale = subst.d
    row = [poly_matrix(embed(c, scale, IOTA_LEFT)) for c in B.c]
    for layer in B.layers:
        new_row = []
        for q in range(B.width):
            acc = None
            for p in range(B.width):
                for a, k, b in layer[p][q].terms:
                    term = row[p] @ embed(a, scale, IOTA_LEFT) @ point[k - 1] @ embed(b, scale, IOTA_LEFT)
                    acc = term if acc is None else acc + term
            if acc is None:
                acc = poly_matrix(linalg.zeros(scale * B.dim, scale * B.dim, linalg.like_field(B.c[0])))
            new_row.append(acc)
        row = new_row
    out = None
    for p in range(B.width):
        term = row[p] @ embed(B.b[p], scale, IOTA_LEFT)
        out = term if out is None else out + term
    return out


# -- read-once oblivious ABPs ----------------------------------------------


def encoding_base(ell: int, n: int, d: int) -> int:
    return ell + 1 if ell > max(n, d) else max(ell, n, d) + 1


def encode_exponent(i: int, j: int, k: int, base: int) -> int:
    return base * base * i + base * j + k


@dataclass(frozen=True)
class ROABP:
    """Layer t is a matrix of univariate polynomials (exponent -> coefficient) in v_(order[t])."""

    left: np.ndarray
    layers: Tuple[np.ndarray, ...]
    right: np.ndarray
    order: Tuple[int, ...]

    @property
    def nvars(self) -> int:
        return max(self.order, default=0)

    @property
    def degree(self) -> int:
        return max((e for layer in self.layers for poly in layer.flat for e in poly), default=0)

    def evaluate(self, assignment: Sequence) -> np.ndarray:
        """Substitute v_l = assignment[l - 1]."""
        field = linalg.like_field(self.left)
        acc = self.left
        for layer, var in zip(self.layers, self.order):
            value = assignment[var - 1]
            acc = acc @ linalg.map_entries(layer, lambda poly: _uni_eval(poly, value, field))
        return acc @ self.right


def _uni_eval(poly: Dict[int, Any], value, field):
    total = field.zero
    for e, c in poly.items():
        total = total + c * Fraction(value) ** e
    return total


def to_roabp(block: SetMultilinearABP, ell: int) -> ROABP:
    """Encode y_(ijkl) as v_l^(base^2 i + base j + k); the variable order follows the block's layers."""
    d = len(block.layers)
    base = encoding_base(ell, block.n, d)
    seen: Dict[int, Tuple[int, int, int]] = {}
    for i, j, k in itertools.product(range(1, ell + 1), range(1, ell + 1), range(1, block.n + 1)):
        e = encode_exponent(i, j, k, base)
        if e in seen:
            raise EncodingCollisionError(f"y{(i, j, k)} and y{seen[e]} share exponent {e} with base {base}")
        seen[e] = (i, j, k)
    layers = []
    for layer, l in zip(block.layers, block.order):
        out = np.empty(layer.shape, dtype=object)
        for idx, poly in np.ndenumerate(layer):
            uni: Dict[int, Any] = {}
            for mono, c in poly.terms.items():
                ((var, power),) = mono
                _, i, j, k, var_l = var
                if var_l != l:
                    raise ValueError(f"layer reads block {var_l}, expected {l}")
                e = encode_exponent(i, j, k, base) * power
                uni[e] = uni[e] + c if e in uni else c
            out[idx] = {e: c for e, c in uni.items() if c}
        layers.append(out)
    return ROABP(left=block.left, layers=tuple(layers), right=block.right, order=block.order)


def roabp_hitting_set(
    nvars: int, width: int, degree: int, desk: Optional[DeskParams] = None, seed: int = 0
) -> Tuple[List[Tuple[Fraction, ...]], Dict[str, Any]]:
    """Assignments hitting every nonzero ROABP with the given shape, in any variable order.

    Up to four variables use the grid {0..degree}^nvars. When the desk caps the per-axis size
    the grid starts at 2, since 0 and 1 collapse every Kronecker-encoded monomial to 0 or 1.
    Beyond four variables, seeded random points from a root-counting range.
    """
    desk = desk or DeskParams.from_env()
    if nvars < 1 or width < 1 or degree < 0:
        raise InfeasibleParametersError("an ROABP needs nvars >= 1, width >= 1 and degree >= 0")
    if nvars > 64:
        raise InfeasibleParametersError(f"{nvars} variables exceed both ROABP backends")
    if nvars <= 4:
        axis = min(degree + 1, desk.roabp_values)
        start = 0
        if axis < degree + 1:
            start = 2
            logger.warning("ROABP grid capped at %d values per axis (degree bound %d)", axis, degree)
        values = [Fraction(v) for v in range(start, start + axis)]
        points = [tuple(p) for p in itertools.product(values, repeat=nvars)]
        record = {
            "backend": "grid",
            "axis": axis,
            "axis_derived": degree + 1,
            "start": start,
            "degree": degree,
            "width": width,
        }
        return points, record
    rng = random.Random(seed)
    upper = 2 * nvars * degree + 1
    repetitions = 20
    points = [tuple(Fraction(rng.randint(0, upper)) for _ in range(nvars)) for _ in range(repetitions)]
    record = {"backend": "random", "range": upper, "repetitions": repetitions, "seed": seed, "width": width}
    return points, record


# -- the strong hitting set ------------------------------------------------


def y_values(assignment: Sequence[Fraction], ell: int, n: int, d: int) -> Dict[Hashable, Fraction]:
    base = encoding_base(ell, n, d)
    values = {}
    for l in range(1, d + 1):
        for i, j, k in itertools.product(range(1, ell + 1), range(1, ell + 1), range(1, n + 1)):
            values[y_var(i, j, k, l)] = Fraction(assignment[l - 1]) ** encode_exponent(i, j, k, base)
    return values


def twisted_word_family(algebra: DivAlgebra, n: int, d: int) -> List[GenABP]:
    """Every word a_0 x_(k_1) a_1 ... x_(k_d) a_d with each a_t in {1, x, w}, as matrices of D."""
    coefficients = [matrix_rep(algebra.one()), matrix_rep(algebra.x()), matrix_rep(algebra.omega())]
    return [
        GenABP.from_word(list(coeffs), list(word))
        for word in itertools.product(range(1, n + 1), repeat=d)
        for coeffs in itertools.product(coefficients, repeat=d + 1)
    ]


def certify_family(points: Iterable[Sequence[np.ndarray]], family: Sequence[GenABP]) -> List[Optional[int]]:
    """For each member, the index of the first point where it evaluates to an invertible matrix."""
    points = list(points)
    out: List[Optional[int]] = []
    for member in family:
        found = None
        for index, point in enumerate(points):
            if linalg.is_invertible(member.evaluate(point)):
                found = index
                break
        out.append(found)
    return out


def strong_hitting_set_genabp(
    n: int, r: int, d: int, algebra: DivAlgebra, desk: Optional[DeskParams] = None
) -> HittingSet:
    """Points in M_(d l)(K)^n, q0-conjugated so downstream evaluation uses a (x) I_d.

    Every member of ``twisted_word_family`` must become invertible at some point; each point's
    record lists the members it certifies first.
    """
    desk = desk or DeskParams.from_env()
    ell = algebra.ell
    base = encoding_base(ell, n, d)
    degree = encode_exponent(ell, ell, n, base)
    assignments, backend = roabp_hitting_set(d, r * ell, degree, desk)
    subst = ShiftedSubstitution(algebra, n, d)
    q0 = linalg.to_field(q0_matrix(ell, d), algebra.field)
    q0_inv = q0.T.copy()
    meta: HittingSetHeader = {
        "n": n,
        "r": r,
        "height": 1,
        "dim": d * ell,
        "field": "K",
        "ell": ell,
        "kappa": algebra.kappa,
        "blockdim": d,
        "mode": "desk",
        "count": 0,
        "derivation": {"encoding_base": base, "degree": degree, **backend},
    }
    hs = HittingSet(meta=meta)
    for assignment in assignments:
        values = y_values(assignment, ell, n, d)
        hs.points.append(tuple(q0 @ subst.numeric_matrix(k, values) @ q0_inv for k in range(1, n + 1)))

    family = twisted_word_family(algebra, n, d)
    witnesses = certify_family(hs.points, family)
    missing = [index for index, witness in enumerate(witnesses) if witness is None]
    if missing:
        raise CertificationError(
            f"{len(missing)} of {len(family)} twisted words stay singular on the strong set (first: member {missing[0]})"
        )
    for index, assignment in enumerate(assignments):
        hs.certifications.append(
            {
                "assignment": [rat_to_str(v) for v in assignment],
                "backend": backend["backend"],
                "certifies": [member for member, witness in enumerate(witnesses) if witness == index],
            }
        )
    hs.meta["derivation"]["family"] = {"kind": "twisted-words", "size": len(family), "witnesses": witnesses}
    hs.meta["count"] = len(hs.points)
    logger.debug("strong hitting set for generalized ABPs: %d points of dim %d", len(hs.points), d * ell)
    return hs
