"""Small linear-algebra kernel shared by the exact and floating-point paths.

Matrices are numpy arrays.  An array with ``dtype=object`` holding
:class:`fractions.Fraction` entries is treated as exact: every routine below
then runs Gaussian elimination over the rationals with no rounding.  Float
arrays are handed to LAPACK through numpy/scipy.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

FLOAT_TOL = 1e-10


def is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: silently converting them would smuggle rounding
    into the exact path.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} value {x!r} as an exact rational")


def exact_array(rows) -> np.ndarray:
    """Build an object array of Fractions from nested sequences."""
    a = np.array(rows, dtype=object)
    flat = a.reshape(-1)
    for idx, v in enumerate(flat):
        flat[idx] = to_fraction(v)
    return a


def exact_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(to_fraction(v) for v in values)


def fraction_str(q: Fraction) -> str:
    """Render as ``"p/q"`` always, including integers (``"3/1"``)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _is_zero(x) -> bool:
    return x == 0


def _rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the rationals; returns (R, pivot columns)."""
    m = a.copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if not _is_zero(m[i, c])), None)
        if p is None:
            continue
        if p != r:
            m[[r, p]] = m[[p, r]]
        m[r] = m[r] / m[r, c]
        for i in range(rows):
            if i != r and not _is_zero(m[i, c]):
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def det(a: np.ndarray):
    """Determinant; exact Fraction for object arrays."""
    a = np.asarray(a)
    n, n2 = a.shape
    if n != n2:
        raise ValueError(f"determinant of non-square {a.shape} matrix")
    if n == 0:
        return Fraction(1) if is_exact(a) else 1.0
    if not is_exact(a):
        return float(np.linalg.det(a))
    m = a.copy()
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if not _is_zero(m[i, c])), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[[c, p]] = m[[p, c]]
            result = -result
        piv = m[c, c]
        result *= piv
        for i in range(c + 1, n):
            if not _is_zero(m[i, c]):
                m[i, c:] = m[i, c:] - (m[i, c] / piv) * m[c, c:]
    return result


def rank(a: np.ndarray, tol: float = FLOAT_TOL) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    if is_exact(a):
        return len(_rref(a)[1])
    return int(np.linalg.matrix_rank(a, tol=tol * max(1.0, np.abs(a).max(initial=0.0))))


def null_space(a: np.ndarray) -> np.ndarray:
    """Columns spanning ker(a).  Exact basis from RREF for object arrays."""
    a = np.asarray(a)
    rows, cols = a.shape
    if not is_exact(a):
        if rows == 0:
            return np.eye(cols)
        return scipy.linalg.null_space(a, rcond=FLOAT_TOL)
    if rows == 0:
        return identity(cols, exact=True)
    r, pivots = _rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.empty((cols, len(free)), dtype=object)
    basis[:] = Fraction(0)
    for k, f in enumerate(free):
        basis[f, k] = Fraction(1)
        for i, p in enumerate(pivots):
            basis[p, k] = -r[i, f]
    return basis


def pivot_columns(a: np.ndarray) -> list[int]:
    """Indices of a maximal set of linearly independent columns."""
    a = np.asarray(a)
    if is_exact(a):
        return _rref(a)[1]
    # greedy left to right, like RREF: keep a column if it leaves the span so far
    scale = max(1.0, np.abs(a).max(initial=0.0))
    q = np.zeros((a.shape[0], 0))
    piv = []
    for c in range(a.shape[1]):
        v = a[:, c] - q @ (q.T @ a[:, c])
        v = v - q @ (q.T @ v)
        nv = np.linalg.norm(v)
        if nv > FLOAT_TOL * scale * max(1.0, np.linalg.norm(a[:, c])):
            q = np.concatenate([q, (v / nv)[:, None]], axis=1)
            piv.append(c)
    return piv


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for x, requiring an exact solution to exist.

    ``a`` may be tall with full column rank; for float input the
    least-squares solution is returned and its residual checked.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    vec = b.ndim == 1
    if vec:
        b = b.reshape(-1, 1)
    rows, cols = a.shape
    if is_exact(a) or is_exact(b):
        a = a.astype(object)
        b = b.astype(object)
        aug = np.concatenate([a, b], axis=1)
        r, pivots = _rref(aug)
        if any(p >= cols for p in pivots):
            raise np.linalg.LinAlgError("inconsistent linear system")
        if len(pivots) < cols:
            raise np.linalg.LinAlgError("linear system has no unique solution")
        x = r[:cols, cols:]
    else:
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        if rank(a) < cols:
            raise np.linalg.LinAlgError("linear system has no unique solution")
        resid = np.abs(a @ x - b).max() if b.size else 0.0
        if resid > 1e-8 * max(1.0, np.abs(b).max(initial=0.0)):
            raise np.linalg.LinAlgError(f"inconsistent linear system (residual {resid:.3g})")
    return x.reshape(-1) if vec else x


def inv(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    n = a.shape[0]
    if det(a) == 0:
        raise np.linalg.LinAlgError("singular matrix")
    return solve(a, identity(n, exact=is_exact(a)))


def identity(n: int, exact: bool = False) -> np.ndarray:
    if not exact:
        return np.eye(n)
    e = np.empty((n, n), dtype=object)
    e[:] = Fraction(0)
    for i in range(n):
        e[i, i] = Fraction(1)
    return e


def zeros(shape: Sequence[int], exact: bool = False) -> np.ndarray:
    if not exact:
        return np.zeros(shape)
    z = np.empty(shape, dtype=object)
    z[:] = Fraction(0)
    return z


def pfaffian(a: np.ndarray):
    """Pfaffian of a skew-symmetric matrix by skew Gaussian elimination.

    Exact for object arrays.  Pivoting keeps the float path stable.
    """
    a = np.asarray(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("pfaffian needs a square matrix")
    exact = is_exact(a)
    one = Fraction(1) if exact else 1.0
    if n % 2:
        return 0 * one
    m = a.copy() if exact else a.astype(float).copy()
    result = one
    for k in range(0, n - 1, 2):
        col = m[k + 1 :, k]
        if exact:
            p = next((i for i, v in enumerate(col) if v != 0), None)
            if p is None:
                return 0 * one
        else:
            p = int(np.argmax(np.abs(col)))
            if col[p] == 0:
                return 0.0
        p += k + 1
        if p != k + 1:
            # simultaneous row/column swap flips the sign
            m[[k + 1, p]] = m[[p, k + 1]]
            m[:, [k + 1, p]] = m[:, [p, k + 1]]
            result = -result
        piv = m[k, k + 1]
        result *= piv
        if k + 2 < n:
            # Schur complement of the 2x2 pivot block: C + (b a^T - a b^T) / p
            upd = np.outer(m[k, k + 2 :] / piv, m[k + 1, k + 2 :])
            m[k + 2 :, k + 2 :] = m[k + 2 :, k + 2 :] - upd + upd.T
    return result
