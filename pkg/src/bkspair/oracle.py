"""Brute-force cross-checks that share no code path with the main modules.

Each function recomputes a quantity from a different starting point:
Pfaffians by cofactor expansion instead of a closed product, Weyl orders
from the classical formulas instead of enumeration, admissible weights by
scanning a box instead of a bounded recursion, and intersection points as
actual unitary matrices for SU(r+1).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .rootsys import RootSystem, inner_product
from .weyl import WeylElement

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SkewMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = self.entries
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
            raise ValueError("skew matrix must be square of even size")
        if not np.allclose(a, -a.T, atol=0.0, rtol=0.0):
            raise ValueError("matrix is not skew-symmetric")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def omega_matrix(rs: RootSystem, xi: Sequence) -> SkewMatrix:
    """Blocks [[0, -2 pi a(xi)], [2 pi a(xi), 0]] on (x_a, y_a), positive roots in stored order."""
    m = rs.m
    a = np.zeros((2 * m, 2 * m))
    for p, alpha in enumerate(rs.positive_roots):
        v = TWO_PI * float(inner_product(rs, alpha, xi))
        a[2 * p, 2 * p + 1] = -v
        a[2 * p + 1, 2 * p] = v
    return SkewMatrix(a)


def pfaffian_expansion(a: np.ndarray) -> float:
    """Pf by expansion along the first row, skipping zero entries."""
    n = a.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    rest = list(range(1, n))
    for idx, j in enumerate(rest):
        if a[0, j] == 0:
            continue
        keep = [c for c in rest if c != j]
        sub = a[np.ix_(keep, keep)]
        total += (-1) ** idx * a[0, j] * pfaffian_expansion(sub)
    return total


def pfaffian_blocks(a: np.ndarray) -> float:
    """Pf of a 2x2-block-diagonal skew matrix: the product of upper entries."""
    return float(np.prod([a[i, i + 1] for i in range(0, a.shape[0], 2)]))


@dataclass(frozen=True)
class PfaffianCheck:
    passed: bool
    pf_expansion: float
    pf_blocks: float
    expected: float
    rel_error: float


def pfaffian_check(rs: RootSystem, xi: Sequence, rtol: float = 1e-12) -> PfaffianCheck:
    """Pf(omega_xi) against (-2 pi)^m prod a(xi), which also fixes |Pf|."""
    mat = omega_matrix(rs, xi).entries
    pf = pfaffian_expansion(mat)
    pfb = pfaffian_blocks(mat)
    prod = Fraction(1)
    for alpha in rs.positive_roots:
        prod *= inner_product(rs, alpha, xi)
    # signed: Omega_xi = (-2 pi)^m prod a(xi) gamma
    expected = (-TWO_PI) ** rs.m * float(prod)
    scale = max(abs(expected), 1e-300)
    err = float(max(abs(pf - expected), abs(pfb - expected)) / scale)
    return PfaffianCheck(bool(err <= rtol), float(pf), pfb, expected, err)


_EXCEPTIONAL_ORDERS = {("G", 2): 12, ("F", 4): 1152, ("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600}


def classical_weyl_order(rs: RootSystem) -> int:
    r = rs.rank
    letter = rs.type_letter
    if letter == "A":
        return math.factorial(r + 1)
    if letter in "BC":
        return 2**r * math.factorial(r)
    if letter == "D":
        return 2 ** (r - 1) * math.factorial(r)
    return _EXCEPTIONAL_ORDERS[(letter, r)]


MAX_SCAN_RANK = 4


def admissible_count_scan(rs: RootSystem, k: int) -> int:
    """Count integral lambda with every c_i >= 1 and <alpha_0, lambda> < k by a box scan."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if rs.rank > MAX_SCAN_RANK:
        raise ValueError(f"box scan limited to rank <= {MAX_SCAN_RANK}")
    weights = rs.fundamental_weights
    count = 0
    # each c_i omega_i already has level >= c_i, so c_i < k bounds the box
    for c in itertools.product(range(1, k), repeat=rs.rank):
        lam = [sum(c[i] * weights[i][j] for i in range(rs.rank)) for j in range(rs.rank)]
        if inner_product(rs, rs.highest_root, lam) < k:
            count += 1
    return count


# -- type A matrices -------------------------------------------------------


def typeA_diagonal(coords: Sequence) -> np.ndarray:
    """Diagonal entries of sum c_i (e_i - e_{i+1}): traceless, length r + 1."""
    c = [Fraction(x) for x in coords]
    r = len(c)
    d = [c[0]] + [c[i] - c[i - 1] for i in range(1, r)] + [-c[r - 1]]
    return np.array([float(x) for x in d])


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _multiset_match(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    left = list(b)
    for x in a:
        dists = [abs(x - y) for y in left]
        i = int(np.argmin(dists))
        if dists[i] > tol:
            return False
        left.pop(i)
    return True


@dataclass(frozen=True)
class TypeACheck:
    commute: bool
    h_in_class: bool
    hg_in_class: bool
    max_deviation: float

    @property
    def passed(self) -> bool:
        return self.commute and self.h_in_class and self.hg_in_class


def typeA_matrix_check(rs: RootSystem, beta, beta_prime, w: WeylElement, tol: float = 1e-10,
                       seed: int = 0) -> TypeACheck:
    """Realize z_w = (exp(w beta - beta'), exp(beta')) in SU(r+1) and test it.

    Both unitaries are conjugated by one random unitary so the checks do not
    see diagonal matrices.
    """
    if rs.type_letter != "A":
        raise ValueError("typeA_matrix_check needs a type A root system")
    n = rs.rank + 1
    beta = [Fraction(x) for x in beta]
    beta_prime = [Fraction(x) for x in beta_prime]
    wb = [sum(w.matrix[i][j] * beta[j] for j in range(rs.rank)) for i in range(rs.rank)]
    diff = [a - b for a, b in zip(wb, beta_prime)]
    u = _random_unitary(np.random.default_rng(seed), n)
    g = u @ np.diag(np.exp(2j * math.pi * typeA_diagonal(diff))) @ u.conj().T
    h = u @ np.diag(np.exp(2j * math.pi * typeA_diagonal(beta_prime))) @ u.conj().T
    comm = float(np.abs(g @ h - h @ g).max())
    target_h = np.exp(2j * math.pi * typeA_diagonal(beta_prime))
    target_hg = np.exp(2j * math.pi * typeA_diagonal(beta))
    eig_h = np.linalg.eigvals(h)
    eig_hg = np.linalg.eigvals(h @ g)
    return TypeACheck(
        comm <= tol,
        _multiset_match(eig_h, target_h, tol),
        _multiset_match(eig_hg, target_hg, tol),
        comm,
    )
