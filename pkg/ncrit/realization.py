"""Linear pencils of formulas, shifted realizations as generalized series, and their zero test.

A pencil L(x) = A_0 + sum A_k x_k represents f when f(p) is block ``out`` of L(p)^-1. The
pencil of an inverse gate is only meaningful where the gate's argument pencil is itself
invertible, so every pencil carries guard pencils; f is defined at p exactly when the core
and all guards are invertible there.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ncrit import linalg
from ncrit.exceptions import NotDefinedAtShiftError, ShapeError, SingularMatrixError
from ncrit.fields import QQ, field_of
from ncrit.formula import Add, Const, Formula, Inv, Mul, Var
from ncrit.genabp import IOTA_RIGHT, GenABP, GenLinForm, Letter, embed, psi_letters

logger = logging.getLogger(__name__)

Coefficients = Tuple[np.ndarray, ...]


def _pencil_matrix(coefficients: Coefficients, point: Sequence[np.ndarray], dim: int, field) -> np.ndarray:
    eye = linalg.identity(dim, field)
    out = np.kron(linalg.to_field(coefficients[0], field), eye)
    for A, p in zip(coefficients[1:], point):
        if not linalg.is_zero_matrix(A):
            out = out + np.kron(linalg.to_field(A, field), p)
    return out


@dataclass(frozen=True)
class LinearPencil:
    coefficients: Coefficients
    out: Tuple[int, int]
    guards: Tuple[Coefficients, ...] = ()

    @property
    def size(self) -> int:
        return self.coefficients[0].shape[0]

    @property
    def nvars(self) -> int:
        return len(self.coefficients) - 1

    def _frame(self, point: Sequence[np.ndarray], dim: Optional[int]):
        if len(point) < self.nvars:
            raise ShapeError(f"pencil reads {self.nvars} variables but the point has {len(point)}")
        if point:
            return point[0].shape[0], field_of(point[0].flat[0])
        return dim or 1, QQ

    def evaluate(self, point: Sequence[np.ndarray], dim: Optional[int] = None) -> np.ndarray:
        """A_0 (x) I_m + sum A_k (x) p_k."""
        dim, field = self._frame(point, dim)
        return _pencil_matrix(self.coefficients, point, dim, field)

    def is_defined_at(self, point: Sequence[np.ndarray], dim: Optional[int] = None) -> bool:
        dim, field = self._frame(point, dim)
        return all(
            linalg.is_invertible(_pencil_matrix(c, point, dim, field)) for c in (self.coefficients,) + self.guards
        )

    def value_at(self, point: Sequence[np.ndarray], dim: Optional[int] = None) -> Optional[np.ndarray]:
        """Block ``out`` of L(p)^-1, or None where the formula is not defined."""
        if not self.is_defined_at(point, dim):
            return None
        dim, _ = self._frame(point, dim)
        inverse = linalg.inverse(self.evaluate(point, dim))
        i, j = self.out
        return linalg.block(inverse, i + 1, j + 1, dim)


@dataclass(frozen=True)
class _Piece:
    coefficients: Coefficients
    gates: Tuple[Coefficients, ...]
    guards: Tuple[Coefficients, ...]

    @property
    def size(self) -> int:
        return self.coefficients[0].shape[0]


def _leaf(n: int, index: int, value) -> _Piece:
    A0 = linalg.identity(2)
    coefficients = [A0] + [linalg.zeros(2) for _ in range(n)]
    if index:
        coefficients[index][0, 1] = QQ.coerce(-1)
    else:
        A0[0, 1] = -QQ.coerce(value)
    return _Piece(tuple(coefficients), (), ())


def _build(f: Formula, n: int) -> _Piece:
    if isinstance(f, Var):
        return _leaf(n, f.index, None)
    if isinstance(f, Const):
        return _leaf(n, 0, f.value)
    if isinstance(f, Mul):
        left, right = _build(f.left, n), _build(f.right, n)
        k1 = left.size
        coefficients = [linalg.block_diag(a, b) for a, b in zip(left.coefficients, right.coefficients)]
        coefficients[0][k1 - 1, k1] = QQ.coerce(-1)
        return _Piece(tuple(coefficients), left.gates + right.gates, left.guards + right.guards)
    if isinstance(f, Add):
        left, right = _build(f.left, n), _build(f.right, n)
        k1 = left.size
        k = k1 + right.size
        P = linalg.identity(k)
        P[k1 - 1, k - 1] = QQ.coerce(-1)
        Q = linalg.identity(k)
        Q[0, k1] = QQ.coerce(-1)
        coefficients = tuple(P @ linalg.block_diag(a, b) @ Q for a, b in zip(left.coefficients, right.coefficients))
        return _Piece(coefficients, left.gates + right.gates, left.guards + right.guards)
    if isinstance(f, Inv):
        if isinstance(f.child, Var):
            coefficients = [linalg.zeros(1)] + [linalg.zeros(1) for _ in range(n)]
            coefficients[f.child.index][0, 0] = QQ.one
            coefficients = tuple(coefficients)
            return _Piece(coefficients, (coefficients,), ())
        inner = _build(f.child, n)
        k = inner.size
        bordered = []
        for index, A in enumerate(inner.coefficients):
            B = linalg.zeros(k + 1)
            B[:k, :k] = A
            if index == 0:
                B[k - 1, k] = QQ.one
                B[k, 0] = QQ.coerce(-1)
            B[:, [0, k]] = B[:, [k, 0]]
            bordered.append(B)
        coefficients = tuple(bordered)
        return _Piece(coefficients, (coefficients,), inner.guards + inner.gates)
    raise TypeError(f"unknown formula node {f!r}")


def build_pencil(f: Formula, nvars: Optional[int] = None) -> LinearPencil:
    """Pencil of size at most 2 size(f) with output entry (0, size - 1)."""
    n = max(f.variable_count, nvars or 0)
    piece = _build(f, n)
    logger.debug("pencil of size %d with %d guards for a formula of size %d", piece.size, len(piece.guards), f.size)
    return LinearPencil(piece.coefficients, (0, piece.size - 1), piece.guards)


# -- shifted realization ---------------------------------------------------


@dataclass(frozen=True)
class LinearRep:
    """The generalized series c (I - M)^-1 b over m x m coefficients, expanded around ``shift``."""

    c: Tuple[np.ndarray, ...]
    M: Tuple[Tuple[GenLinForm, ...], ...]
    b: Tuple[np.ndarray, ...]
    shift: Tuple[np.ndarray, ...]

    @property
    def s(self) -> int:
        return len(self.c)

    @property
    def dim(self) -> int:
        return self.c[0].shape[0]

    def to_dict(self) -> Dict[str, object]:
        from ncrit.utils import matrix_to_json, point_to_json

        return {
            "s": self.s,
            "dim": self.dim,
            "c": [matrix_to_json(a) for a in self.c],
            "M": [
                [[{"a": matrix_to_json(a), "var": k, "b": matrix_to_json(b)} for a, k, b in form.terms] for form in row]
                for row in self.M
            ],
            "b": [matrix_to_json(a) for a in self.b],
            "shift": point_to_json(self.shift),
        }


def realize_shifted(f: Formula, u: Sequence[np.ndarray]) -> LinearRep:
    """Realize f(x + u) as a recognizable generalized series.

    With R = L(u)^-1, L(x + u)^-1 = sum_k (-R L_lin(x))^k R, so M = -R L_lin, c is the
    first block coordinate row and b is block column ``out`` of R.
    """
    pencil = build_pencil(f, len(u))
    if not u:
        raise ShapeError("the shift needs at least one matrix")
    m = u[0].shape[0]
    field = field_of(u[0].flat[0])
    if not pencil.is_defined_at(u):
        raise NotDefinedAtShiftError(f"formula is not defined at the shift point (dim {m})")
    R = linalg.inverse(pencil.evaluate(u))
    p = pencil.size
    eye = linalg.identity(m, field)
    blocks = [[linalg.block(R, a + 1, c + 1, m) for c in range(p)] for a in range(p)]
    rows = []
    for a in range(p):
        row = []
        for col in range(p):
            terms = []
            for k, A in enumerate(pencil.coefficients[1:], start=1):
                coeff = None
                for c in range(p):
                    if A[c, col]:
                        part = blocks[a][c] * A[c, col]
                        coeff = part if coeff is None else coeff + part
                if coeff is not None and not linalg.is_zero_matrix(coeff):
                    terms.append((-coeff, k, eye))
            row.append(GenLinForm(tuple(terms), m))
        rows.append(tuple(row))
    zero = linalg.zeros(m, m, field)
    c = tuple(eye if a == 0 else zero for a in range(p))
    b = tuple(blocks[a][p - 1] for a in range(p))
    return LinearRep(c=c, M=tuple(rows), b=b, shift=tuple(u))


def truncate(rep: LinearRep, d: int) -> GenABP:
    """The homogeneous degree-d part c M^d b as a width-s generalized ABP."""
    if d < 0:
        raise ValueError("truncation degree must be nonnegative")
    return GenABP(c=rep.c, layers=(rep.M,) * d, b=rep.b, dim=rep.dim)


def series_terms(rep: LinearRep, point: Sequence[np.ndarray], degree: int) -> List[np.ndarray]:
    """c M(q)^k b for k = 0..degree, with coefficients embedded as a (x) I."""
    size = point[0].shape[0]
    if size % rep.dim:
        raise ShapeError(f"point dimension {size} is not a multiple of {rep.dim}")
    scale = size // rep.dim
    values = [[form.evaluate(point, IOTA_RIGHT) for form in row] for row in rep.M]
    tail = [embed(b, scale) for b in rep.b]
    row = [embed(c, scale) for c in rep.c]
    out = []
    for k in range(degree + 1):
        out.append(sum((row[a] @ tail[a] for a in range(1, rep.s)), row[0] @ tail[0]))
        if k < degree:
            row = [sum((row[a] @ values[a][col] for a in range(1, rep.s)), row[0] @ values[0][col]) for col in range(rep.s)]
    return out


# -- zero testing ----------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class NonzeroAtDegree:
    degree: int


ZeroTestResult = Union[Zero, NonzeroAtDegree]


class _EchelonBasis:
    """Incremental row-echelon basis; ``add`` reports whether the vector was independent."""

    def __init__(self):
        self.rows: List[Tuple[int, np.ndarray]] = []

    def reduce(self, v: np.ndarray) -> np.ndarray:
        v = v.copy()
        for pivot, row in self.rows:
            if v[pivot]:
                v = v - row * v[pivot]
        return v

    def add(self, v: np.ndarray) -> bool:
        w = self.reduce(v)
        pivot = next((i for i, value in enumerate(w) if value), None)
        if pivot is None:
            return False
        w = w * (1 / w[pivot])
        reduced = []
        for p, row in self.rows:
            if row[pivot]:
                row = row - w * row[pivot]
            reduced.append((p, row))
        self.rows = reduced + [(pivot, w)]
        return True


def zero_test_rep(rep: LinearRep) -> ZeroTestResult:
    """Least degree with a nonzero homogeneous part, or Zero.

    Breadth-first search over the row space spanned by (rows of c) N_w, where N_z are the
    psi-letter matrices; the span stabilizes within s m steps, well inside 2 s m - 1.
    """
    if all(linalg.is_zero_matrix(c) for c in rep.c) or all(linalg.is_zero_matrix(b) for b in rep.b):
        return Zero()
    letters = list(psi_letters(rep.M, rep.dim).values())
    left = np.hstack(rep.c)
    right = np.vstack(rep.b)
    basis = _EchelonBasis()
    queue = deque()
    for i in range(left.shape[0]):
        v = left[i, :]
        if basis.add(v):
            queue.append((v, 0))
    while queue:
        v, degree = queue.popleft()
        if not linalg.is_zero_matrix((v @ right).reshape(1, -1)):
            logger.debug("series is nonzero at degree %d (span %d)", degree, len(basis.rows))
            return NonzeroAtDegree(degree)
        for N in letters:
            w = v @ N
            if basis.add(w):
                queue.append((w, degree + 1))
    return Zero()


def brute_force_zero_test(rep: LinearRep, max_degree: Optional[int] = None) -> ZeroTestResult:
    """Expand the series word by word over the z letters up to ``max_degree`` (default 2 s m - 1)."""
    max_degree = 2 * rep.s * rep.dim - 1 if max_degree is None else max_degree
    letters = psi_letters(rep.M, rep.dim)
    right = np.vstack(rep.b)
    frontier: Dict[Tuple[Letter, ...], np.ndarray] = {(): np.hstack(rep.c)}
    for degree in range(max_degree + 1):
        if any(not linalg.is_zero_matrix(vec @ right) for vec in frontier.values()):
            return NonzeroAtDegree(degree)
        step = {}
        for word, vec in frontier.items():
            for letter, N in letters.items():
                nxt = vec @ N
                if not linalg.is_zero_matrix(nxt):
                    step[word + (letter,)] = nxt
        if not step:
            break
        frontier = step
    return Zero()
