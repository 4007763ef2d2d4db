"""Dense exact linear algebra on numpy object arrays.

Matrices are ``numpy.ndarray`` objects of dtype ``object`` holding ``Fraction``,
``CycloElem`` or ``KElem`` entries of a single field. Elimination pivots on the first
nonzero entry in column order, so results and certification records are reproducible.
"""

import logging
from fractions import Fraction
from itertools import permutations
from typing import List, Optional, Sequence

import numpy as np

from ncrit.exceptions import FieldMismatchError, ShapeError, SingularMatrixError
from ncrit.fields import QQ, CycloElem, CyclotomicFunctionField, KElem, field_of

logger = logging.getLogger(__name__)

Mat = np.ndarray


def _field_key(value):
    if isinstance(value, KElem):
        return ("K", value.order)
    if isinstance(value, CycloElem):
        return ("Qw", value.order)
    return ("Q", None)


def matrix(rows: Sequence[Sequence], field=QQ) -> Mat:
    rows = [list(row) for row in rows]
    if not rows or not rows[0]:
        raise ShapeError("matrices must have at least one row and one column")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ShapeError("ragged rows")
    out = np.empty((len(rows), width), dtype=object)
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            out[i, j] = field.coerce(value)
    return out


def zeros(rows: int, cols: Optional[int] = None, field=QQ) -> Mat:
    cols = rows if cols is None else cols
    out = np.empty((rows, cols), dtype=object)
    zero = field.zero
    for i in range(rows):
        for j in range(cols):
            out[i, j] = zero
    return out


def identity(n: int, field=QQ) -> Mat:
    out = zeros(n, n, field)
    one = field.one
    for i in range(n):
        out[i, i] = one
    return out


def like_field(A: Mat):
    """Field descriptor of a nonempty matrix."""
    return field_of(A.flat[0])


def check_same_field(A: Mat, B: Mat) -> None:
    if A.size and B.size and _field_key(A.flat[0]) != _field_key(B.flat[0]):
        raise FieldMismatchError(f"field mismatch: {_field_key(A.flat[0])} vs {_field_key(B.flat[0])}")


def mat_mul(A: Mat, B: Mat) -> Mat:
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"cannot multiply {A.shape} by {B.shape}")
    check_same_field(A, B)
    return A @ B


def mat_add(A: Mat, B: Mat) -> Mat:
    if A.shape != B.shape:
        raise ShapeError(f"cannot add {A.shape} and {B.shape}")
    check_same_field(A, B)
    return A + B


def scalar_mul(c, A: Mat) -> Mat:
    out = np.empty(A.shape, dtype=object)
    for idx, value in np.ndenumerate(A):
        out[idx] = value * c
    return out


def is_zero_matrix(A: Mat) -> bool:
    return not any(bool(v) for v in A.flat)


def matrices_equal(A: Mat, B: Mat) -> bool:
    return A.shape == B.shape and all(a == b for a, b in zip(A.flat, B.flat))


def _monomial_pattern(A: Mat) -> Optional[List[int]]:
    """Column index of the single nonzero per row, if A is a monomial matrix."""
    n = A.shape[0]
    cols = []
    for i in range(n):
        nonzero = [j for j in range(n) if A[i, j]]
        if len(nonzero) != 1:
            return None
        cols.append(nonzero[0])
    if len(set(cols)) != n:
        return None
    return cols


def _permutation_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det(A: Mat):
    n = A.shape[0]
    if A.shape != (n, n):
        raise ShapeError(f"determinant of non-square {A.shape}")
    pattern = _monomial_pattern(A)
    if pattern is not None:
        # covers circulant shifts cir(v) and every b*x^k in D
        result = A[0, pattern[0]] * _permutation_sign(pattern)
        for i in range(1, n):
            result = result * A[i, pattern[i]]
        return result
    X = A.copy()
    result = X[0, 0] * 0 + 1
    for i in range(n):
        pivot = next((r for r in range(i, n) if X[r, i]), None)
        if pivot is None:
            return X[0, 0] * 0
        if pivot != i:
            X[[i, pivot]] = X[[pivot, i]]
            result = -result
        result = result * X[i, i]
        inv = 1 / X[i, i]
        for r in range(i + 1, n):
            if X[r, i]:
                factor = X[r, i] * inv
                X[r, i:] = X[r, i:] - X[i, i:] * factor
    return result


def _polynomial_k_matrix(A: Mat) -> bool:
    return isinstance(A.flat[0], KElem) and all(v.is_polynomial() for v in A.flat)


def is_invertible(A: Mat) -> bool:
    """Exact invertibility test.

    For K-matrices with polynomial entries, z is specialized at 0, 1, 2, ... over Q(w);
    det is a polynomial in z of degree at most the sum of the row degrees, so that many
    points plus one decide it exactly.
    """
    n = A.shape[0]
    if A.shape != (n, n):
        raise ShapeError(f"invertibility of non-square {A.shape}")
    if _monomial_pattern(A) is not None:
        return True
    if not _polynomial_k_matrix(A):
        return bool(det(A))
    bound = sum(max(len(v.num) - 1 for v in A[i, :]) for i in range(n))
    if bound < 0:
        return False
    for t in range(bound + 1):
        specialized = np.empty((n, n), dtype=object)
        for idx, value in np.ndenumerate(A):
            specialized[idx] = value.specialize_z(t)
        if det(specialized):
            return True
    return False


def inverse(A: Mat) -> Mat:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ShapeError(f"inverse of non-square {A.shape}")
    X = A.copy()
    Y = identity(n, like_field(A))
    for i in range(n):
        pivot = next((r for r in range(i, n) if X[r, i]), None)
        if pivot is None:
            raise SingularMatrixError("matrix is not invertible")
        if pivot != i:
            X[[i, pivot]] = X[[pivot, i]]
            Y[[i, pivot]] = Y[[pivot, i]]
        inv = 1 / X[i, i]
        X[i, :] = X[i, :] * inv
        Y[i, :] = Y[i, :] * inv
        for r in range(n):
            if r != i and X[r, i]:
                factor = X[r, i]
                X[r, :] = X[r, :] - X[i, :] * factor
                Y[r, :] = Y[r, :] - Y[i, :] * factor
    return Y


def solve(A: Mat, B: Mat) -> Mat:
    """The unique X with A X = B (A square, invertible)."""
    if A.shape[0] != B.shape[0]:
        raise ShapeError(f"cannot solve {A.shape} against {B.shape}")
    return mat_mul(inverse(A), B)


def rank(A: Mat) -> int:
    X = A.copy()
    rows, cols = X.shape
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if X[i, c]), None)
        if pivot is None:
            continue
        if pivot != r:
            X[[r, pivot]] = X[[pivot, r]]
        inv = 1 / X[r, c]
        for i in range(r + 1, rows):
            if X[i, c]:
                factor = X[i, c] * inv
                X[i, c:] = X[i, c:] - X[r, c:] * factor
        r += 1
        if r == rows:
            break
    return r


def kron(A: Mat, B: Mat) -> Mat:
    check_same_field(A, B)
    return np.kron(A, B)


def block(A: Mat, i: int, j: int, m: int) -> Mat:
    """The (i, j) m x m block of A, 1-based."""
    rows, cols = A.shape
    if m <= 0 or rows % m or cols % m:
        raise ShapeError(f"block size {m} does not divide {A.shape}")
    if not (1 <= i <= rows // m and 1 <= j <= cols // m):
        raise ShapeError(f"block ({i}, {j}) out of range for {A.shape} with m={m}")
    return A[(i - 1) * m : i * m, (j - 1) * m : j * m].copy()


def block_matrix(blocks: Sequence[Sequence[Mat]]) -> Mat:
    return np.vstack([np.hstack(list(row)) for row in blocks])


def block_diag(*mats: Mat) -> Mat:
    field = like_field(mats[0])
    size = sum(M.shape[0] for M in mats)
    out = zeros(size, size, field)
    offset = 0
    for M in mats:
        k = M.shape[0]
        out[offset : offset + k, offset : offset + k] = M
        offset += k
    return out


def permutation_matrix(perm: Sequence[int], field=QQ) -> Mat:
    """P with P[perm[c], c] = 1, i.e. P e_c = e_{perm[c]}."""
    n = len(perm)
    out = zeros(n, n, field)
    for c, r in enumerate(perm):
        out[r, c] = field.one
    return out


def map_entries(A: Mat, func) -> Mat:
    out = np.empty(A.shape, dtype=object)
    for idx, value in np.ndenumerate(A):
        out[idx] = func(value)
    return out


def to_field(A: Mat, field) -> Mat:
    return map_entries(A, field.coerce)


def brute_force_det(A: Mat):
    """Leibniz expansion; only for cross-checking elimination on tiny matrices."""
    n = A.shape[0]
    total = A[0, 0] * 0
    for perm in permutations(range(n)):
        term = A[0, 0] * 0 + _permutation_sign(perm)
        for i in range(n):
            term = term * A[i, perm[i]]
        total = total + term
    return total


def k_identity(n: int, order: int) -> Mat:
    return identity(n, CyclotomicFunctionField(order))


def rational_matrix(rows: Sequence[Sequence]) -> Mat:
    return matrix([[Fraction(v) for v in row] for row in rows])
