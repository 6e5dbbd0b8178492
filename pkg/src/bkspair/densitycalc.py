"""Densities on finite-dimensional real vector spaces.

A density of order ``alpha`` on an n-dimensional space is stored as its value
on the space's reference basis; on the tuple whose coordinates are the
columns of A it evaluates to ``value * |det A| ** alpha``.

The canonical isomorphisms below all reduce to a scalar of the form
``(input values) * F ** (1/2)`` with F a ratio of absolute determinants and
Pfaffians.  Every routine computes F with the same code for float and
exact inputs: pass ``dtype=object`` arrays of Fractions and F comes back as
an exact rational, which is what the exact checks compare.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import linalg

TOL = 1e-9

_ids = itertools.count()


def _new_id() -> str:
    return f"V{next(_ids)}"


@dataclass(frozen=True)
class SpaceRef:
    dim: int
    id: str = field(default_factory=_new_id)

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")


@dataclass(frozen=True)
class DensityValue:
    space: SpaceRef
    order: float
    value: complex

    def __post_init__(self):
        if not self.order > 0:
            raise ValueError(f"density order must be positive, got {self.order}")


@dataclass(frozen=True)
class LinearMapMatrix:
    source: SpaceRef
    target: SpaceRef
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{self.source.dim}-dim source and {self.target.dim}-dim target"
            )

    @property
    def exact(self) -> bool:
        return linalg.is_exact(self.matrix)


@dataclass(frozen=True)
class ExactSequence:
    """0 -> U --i--> V --j--> W -> 0."""

    i: LinearMapMatrix
    j: LinearMapMatrix

    def __post_init__(self):
        if self.i.target != self.j.source:
            raise ValueError("i and j do not share the middle space")
        u, v, w = self.i.source.dim, self.i.target.dim, self.j.target.dim
        if v != u + w:
            raise ValueError(f"dim V = {v} but dim U + dim W = {u + w}")
        comp = self.j.matrix @ self.i.matrix
        if comp.size and not _is_zero(comp):
            raise ValueError("sequence is not exact: j o i != 0")
        if linalg.rank(self.i.matrix) != u:
            raise ValueError("sequence is not exact: i is not injective")
        if linalg.rank(self.j.matrix) != w:
            raise ValueError("sequence is not exact: j is not surjective")

    @property
    def spaces(self) -> tuple[SpaceRef, SpaceRef, SpaceRef]:
        return self.i.source, self.i.target, self.j.target

    @property
    def exact(self) -> bool:
        return self.i.exact and self.j.exact


def _is_zero(a: np.ndarray, tol: float = TOL) -> bool:
    if linalg.is_exact(a):
        return all(x == 0 for x in a.flat)
    return bool(np.abs(a).max(initial=0.0) <= tol)


def _abs(x):
    return abs(x)


def _sqrt(f) -> float:
    return math.sqrt(float(f))


def eval_density(d: DensityValue, tuple_matrix: np.ndarray) -> complex:
    tuple_matrix = np.asarray(tuple_matrix)
    n = d.space.dim
    if tuple_matrix.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} tuple matrix, got {tuple_matrix.shape}")
    return d.value * float(_abs(linalg.det(tuple_matrix))) ** d.order


def product_density(d1: DensityValue, d2: DensityValue) -> DensityValue:
    if d1.space != d2.space:
        raise ValueError("densities live on different spaces")
    return DensityValue(d1.space, d1.order + d2.order, d1.value * d2.value)


def pullback(phi: LinearMapMatrix, d: DensityValue) -> DensityValue:
    """phi^* d, a density on phi.source."""
    if phi.target != d.space:
        raise ValueError("density is not on the target of phi")
    if phi.source.dim != phi.target.dim:
        raise ValueError("pullback needs an isomorphism")
    det = linalg.det(phi.matrix)
    if det == 0:
        raise ValueError("phi is singular")
    return DensityValue(phi.source, d.order, d.value * float(_abs(det)) ** d.order)


def default_complement(j: np.ndarray) -> np.ndarray:
    """Coordinate subspace on the pivot columns of j: a complement of ker j."""
    n = j.shape[1]
    piv = linalg.pivot_columns(j)
    c = linalg.zeros((n, len(piv)), exact=linalg.is_exact(j))
    for col, p in enumerate(piv):
        c[p, col] = 1
    return c


def seq_iso_factor(seq: ExactSequence, complement=None, basis_u=None, basis_w=None):
    """F with theta(rho_U (x) rho_W) = rho_U.value * rho_W.value * F**(1/2).

    Builds the basis {i(u_p), (j|_C)^{-1}(w_q)} of V for the complement C and
    the chosen bases of U and W, and returns |det Bu| |det Bw| / |det B|.
    """
    i, j = seq.i.matrix, seq.j.matrix
    exact = seq.exact
    nu, nw = seq.i.source.dim, seq.j.target.dim
    c = default_complement(j) if complement is None else np.asarray(complement)
    bu = linalg.identity(nu, exact) if basis_u is None else np.asarray(basis_u)
    bw = linalg.identity(nw, exact) if basis_w is None else np.asarray(basis_w)
    if c.shape != (seq.i.target.dim, nw):
        raise ValueError(f"complement must be {seq.i.target.dim}x{nw}, got {c.shape}")
    jc = j @ c
    if linalg.det(jc) == 0:
        raise ValueError("complement meets ker j")
    lifts = c @ linalg.solve(jc, bw)
    basis = np.concatenate([i @ bu, lifts], axis=1)
    det_b = _abs(linalg.det(basis))
    if det_b == 0:
        raise ValueError("chosen bases are degenerate")
    return _abs(linalg.det(bu)) * _abs(linalg.det(bw)) / det_b


def seq_iso(seq: ExactSequence, dU: DensityValue, dW: DensityValue, **choices) -> DensityValue:
    """Image of dU (x) dW under |U|^1/2 (x) |W|^1/2 -> |V|^1/2.

    ``choices`` (complement, basis_u, basis_w) select the construction; the
    result does not depend on them.
    """
    U, V, W = seq.spaces
    if dU.space != U or dW.space != W:
        raise ValueError("half-densities are not on the ends of the sequence")
    if dU.order != 0.5 or dW.order != 0.5:
        raise ValueError("seq_iso acts on half-densities")
    f = seq_iso_factor(seq, **choices)
    return DensityValue(V, 0.5, dU.value * dW.value * _sqrt(f))


@dataclass(frozen=True)
class ScalingResult:
    theta: complex
    theta_prime: complex
    ratio: float
    expected: float
    factor_ratio: object
    det_k: object
    passed: bool
    deviation: float


def scaling_check(seq: ExactSequence, seq2: ExactSequence, k: np.ndarray,
                  probe: tuple[complex, complex] = (1.0, 1.0)) -> ScalingResult:
    """Compare the isomorphisms of two sequences related by an automorphism k of V.

    Requires k i = i' and j' k = j; the values should satisfy
    theta = |det k|^(1/2) theta'.
    """
    if seq.spaces != seq2.spaces:
        raise ValueError("sequences must share U, V and W")
    k = np.asarray(k)
    if not _is_zero(k @ seq.i.matrix - seq2.i.matrix) or not _is_zero(seq2.j.matrix @ k - seq.j.matrix):
        raise ValueError("diagram does not commute")
    U, _, W = seq.spaces
    dU, dW = DensityValue(U, 0.5, probe[0]), DensityValue(W, 0.5, probe[1])
    f1, f2 = seq_iso_factor(seq), seq_iso_factor(seq2)
    theta = seq_iso(seq, dU, dW).value
    theta2 = seq_iso(seq2, dU, dW).value
    det_k = _abs(linalg.det(k))
    expected = _sqrt(det_k)
    ratio = abs(theta / theta2)
    if seq.exact and seq2.exact:
        passed = f1 / f2 == det_k
        deviation = 0.0 if passed else abs(ratio - expected)
    else:
        deviation = abs(theta - expected * theta2)
        passed = deviation <= TOL
    return ScalingResult(theta, theta2, ratio, expected, f1 / f2, det_k, bool(passed), float(deviation))


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    exact = linalg.is_exact(a) or linalg.is_exact(b)
    out = linalg.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), exact)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0] :, a.shape[1] :] = b
    return out


def direct_sum(seq: ExactSequence, seq2: ExactSequence) -> ExactSequence:
    (u, v, w), (u2, v2, w2) = seq.spaces, seq2.spaces
    U, V, W = SpaceRef(u.dim + u2.dim), SpaceRef(v.dim + v2.dim), SpaceRef(w.dim + w2.dim)
    return ExactSequence(
        LinearMapMatrix(U, V, _block_diag(seq.i.matrix, seq2.i.matrix)),
        LinearMapMatrix(V, W, _block_diag(seq.j.matrix, seq2.j.matrix)),
    )


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    deviation: float


def direct_sum_check(seq: ExactSequence, seq2: ExactSequence, probes) -> CheckResult:
    """zeta o (theta (x) theta') = theta'' o tau on each probe (rho, nu, rho', nu').

    zeta, xi and eta multiply values on the stacked reference bases, so both
    sides are scalars on the reference basis of V (+) V'.
    """
    total = direct_sum(seq, seq2)
    f, f2, f_sum = seq_iso_factor(seq), seq_iso_factor(seq2), seq_iso_factor(total)
    exact = seq.exact and seq2.exact
    worst = 0.0
    ok = True
    for rho, nu, rho2, nu2 in probes:
        left = (rho * nu * _sqrt(f)) * (rho2 * nu2 * _sqrt(f2))
        right = (rho * rho2) * (nu * nu2) * _sqrt(f_sum)
        worst = max(worst, abs(left - right))
    if exact:
        ok = f * f2 == f_sum
    else:
        ok = worst <= TOL
    return CheckResult(bool(ok), float(worst))


def naturality_check(seq: ExactSequence, seq2: ExactSequence, k, l, m,
                     probe: tuple[complex, complex] = (1.0, 1.0)) -> CheckResult:
    """l^* theta'(rho' (x) nu') = theta(k^* rho' (x) m^* nu') for vertical isos k, l, m."""
    k, l, m = (np.asarray(x) for x in (k, l, m))
    if not _is_zero(l @ seq.i.matrix - seq2.i.matrix @ k) or not _is_zero(m @ seq.j.matrix - seq2.j.matrix @ l):
        raise ValueError("squares do not commute")
    U, V, W = seq.spaces
    U2, V2, W2 = seq2.spaces
    rho2, nu2 = DensityValue(U2, 0.5, probe[0]), DensityValue(W2, 0.5, probe[1])
    top = seq_iso(seq2, rho2, nu2)
    left = pullback(LinearMapMatrix(V, V2, l), top).value
    right = seq_iso(
        seq,
        pullback(LinearMapMatrix(U, U2, k), rho2),
        pullback(LinearMapMatrix(W, W2, m), nu2),
    ).value
    if seq.exact and seq2.exact and k.dtype == object:
        lhs = seq_iso_factor(seq2) * _abs(linalg.det(l))
        rhs = seq_iso_factor(seq) * _abs(linalg.det(k)) * _abs(linalg.det(m))
        return CheckResult(lhs == rhs, abs(left - right))
    dev = abs(left - right)
    return CheckResult(dev <= TOL, float(dev))


# -- BKS density of two Lagrangian subspaces ---------------------------------


@dataclass(frozen=True)
class DensityMapResult:
    """Image of rho1 (x) rho2 as a density on L1 cap L2.

    ``value`` is that density evaluated on ``intersection_basis``;
    ``factor`` is the determinant/Pfaffian ratio F with
    value = a * b * F**(1/2), exact when the inputs were.
    """

    value: complex
    factor: object
    intersection_basis: np.ndarray
    a: complex
    b: complex

    @property
    def dim(self) -> int:
        return self.intersection_basis.shape[1]


def _check_symplectic(omega: np.ndarray) -> int:
    n2 = omega.shape[0]
    if omega.shape != (n2, n2) or n2 % 2:
        raise ValueError(f"symplectic form must be square of even size, got {omega.shape}")
    if not _is_zero(omega + omega.T):
        raise ValueError("form is not skew-symmetric")
    if linalg.rank(omega) != n2:
        raise ValueError("form is degenerate")
    return n2 // 2


def _check_lagrangian(omega: np.ndarray, basis: np.ndarray, name: str) -> None:
    n = omega.shape[0] // 2
    if basis.shape != (2 * n, n) or linalg.rank(basis) != n:
        raise ValueError(f"{name} is not an {n}-dimensional subspace")
    if not _is_zero(basis.T @ omega @ basis):
        raise ValueError(f"{name} is not isotropic")


def intersection(l1: np.ndarray, l2: np.ndarray) -> np.ndarray:
    """Basis (columns) of span(l1) cap span(l2)."""
    ker = linalg.null_space(np.concatenate([l1, -l2], axis=1))
    return l1 @ ker[: l1.shape[1]]


def _resolve_intersection(l1, l2, given):
    k = intersection(l1, l2)
    if given is None:
        return k
    given = np.asarray(given)
    d = k.shape[1]
    if given.shape != (l1.shape[0], d) or linalg.rank(given) != d:
        raise ValueError(f"intersection basis must be {d} independent vectors")
    if linalg.rank(np.concatenate([k, given], axis=1)) != d:
        raise ValueError("given vectors do not lie in L1 cap L2")
    return given


def bks_density_phi(omega, L1, L2, a=1.0, b=1.0, intersection_basis=None,
                    quotient_lift=None, lift_complement=None) -> DensityMapResult:
    """The canonical map |L1|^1/2 (x) |L2|^1/2 -> |L1 cap L2| through S = L1 + L2.

    rho1, rho2 take values a, b on the columns of L1, L2.  The chain is
      |L1|^1/2 |L2|^1/2 -> |L1 (+) L2|^1/2            (product)
        -> |K|^1/2 |S|^1/2                            (0 -> K -> L1 (+) L2 -> S -> 0)
        -> |K|^1/2 |K|^1/2 |S/K|^1/2                  (0 -> K -> S -> S/K -> 0)
        -> |K|                                        (symplectic half-density on S/K)
    with K = L1 cap L2, v -> (v, v) and (v1, v2) -> v1 - v2.

    ``quotient_lift`` (vectors of S lifting a basis of S/K) and
    ``lift_complement`` (coordinates of a complement of ker in L1 (+) L2)
    select the construction; the output does not depend on them.
    """
    omega, L1, L2 = (np.asarray(x) for x in (omega, L1, L2))
    _check_symplectic(omega)
    _check_lagrangian(omega, L1, "L1")
    _check_lagrangian(omega, L2, "L2")
    exact = linalg.is_exact(omega)
    K = _resolve_intersection(L1, L2, intersection_basis)
    d = K.shape[1]
    span = np.concatenate([L1, L2], axis=1)
    if quotient_lift is None:
        piv = linalg.pivot_columns(np.concatenate([K, span], axis=1))
        lift = np.concatenate([K, span], axis=1)[:, piv[d:]]
    else:
        lift = np.asarray(quotient_lift)
        if linalg.rank(np.concatenate([K, lift], axis=1)) != linalg.rank(span) or \
                linalg.rank(np.concatenate([span, lift], axis=1)) != linalg.rank(span):
            raise ValueError("quotient_lift does not lift a basis of (L1 + L2) / (L1 cap L2)")
    s_basis = np.concatenate([K, lift], axis=1)
    delta = np.concatenate([L1, -L2], axis=1)
    wc = default_complement(delta) if lift_complement is None else np.asarray(lift_complement)
    preimages = wc @ linalg.solve(delta @ wc, s_basis)
    diag = np.concatenate([linalg.solve(L1, K), linalg.solve(L2, K)], axis=0)
    m1 = np.concatenate([diag, preimages], axis=1)
    pf = linalg.pfaffian(lift.T @ omega @ lift)
    if pf == 0:
        raise ValueError("form does not descend to a symplectic form on the quotient")
    factor = _abs(linalg.det(m1)) / _abs(pf)
    if not exact:
        factor = float(factor)
    return DensityMapResult(a * b * _sqrt(factor), factor, K, a, b)


def bks_density_phi_split(omega, L1, L2, V1, V2, a=1.0, b=1.0,
                          intersection_basis=None) -> DensityMapResult:
    """The same map computed through complements V1, V2 of K in L1, L2.

    |L_i|^1/2 splits as |K|^1/2 |V_i|^1/2, the two V-factors are carried to
    |S/K|^1/2 by (v1, v2) -> [v1 - v2], and the K-factors multiply.
    """
    omega, L1, L2, V1, V2 = (np.asarray(x) for x in (omega, L1, L2, V1, V2))
    _check_symplectic(omega)
    _check_lagrangian(omega, L1, "L1")
    _check_lagrangian(omega, L2, "L2")
    exact = linalg.is_exact(omega)
    K = _resolve_intersection(L1, L2, intersection_basis)
    n, d = L1.shape[1], K.shape[1]
    for name, L, V in (("V1", L1, V1), ("V2", L2, V2)):
        if V.shape != (L.shape[0], n - d):
            raise ValueError(f"{name} must have {n - d} columns")
        if linalg.rank(np.concatenate([L, V], axis=1)) != n:
            raise ValueError(f"{name} does not lie in its Lagrangian")
        if linalg.rank(np.concatenate([K, V], axis=1)) != n:
            raise ValueError(f"{name} is not a complement of L1 cap L2")
    if V1.shape[1] and linalg.rank(np.concatenate([V1, V2], axis=1)) != 2 * (n - d):
        raise ValueError("V1 and V2 intersect")
    p1 = linalg.solve(L1, np.concatenate([K, V1], axis=1))
    p2 = linalg.solve(L2, np.concatenate([K, V2], axis=1))
    q = np.concatenate([V1, -V2], axis=1)
    pf = linalg.pfaffian(q.T @ omega @ q)
    if pf == 0:
        raise ValueError("form does not descend to a symplectic form on the quotient")
    factor = _abs(linalg.det(p1)) * _abs(linalg.det(p2)) / _abs(pf)
    if not exact:
        factor = float(factor)
    return DensityMapResult(a * b * _sqrt(factor), factor, K, a, b)


# -- seeded instance generators ---------------------------------------------


def _rand_matrix(rng: np.random.Generator, rows: int, cols: int, exact: bool) -> np.ndarray:
    if exact:
        ints = rng.integers(-3, 4, size=(rows, cols))
        return linalg.exact_array(ints.tolist()) if rows and cols else linalg.zeros((rows, cols), True)
    return rng.standard_normal((rows, cols))


def random_invertible(rng: np.random.Generator, n: int, exact: bool = False,
                      max_cond: float = 1e4) -> np.ndarray:
    while True:
        a = _rand_matrix(rng, n, n, exact)
        if n == 0:
            return a
        if exact:
            if linalg.det(a) != 0:
                return a
        elif np.linalg.cond(a) < max_cond:
            return a


def random_exact_sequence(rng: np.random.Generator, du: int, dw: int,
                          exact: bool = False) -> ExactSequence:
    """A generic exact sequence: V = R^(du+dw) scrambled by a random automorphism."""
    dv = du + dw
    g = random_invertible(rng, dv, exact)
    ginv = linalg.inv(g) if exact else np.linalg.inv(g)
    e = linalg.identity(dv, exact)
    i = g @ e[:, :du]
    j = e[du:, :] @ ginv
    # scramble the target basis of W too
    j = random_invertible(rng, dw, exact) @ j if dw else j
    U, V, W = SpaceRef(du), SpaceRef(dv), SpaceRef(dw)
    return ExactSequence(LinearMapMatrix(U, V, i), LinearMapMatrix(V, W, j))


def random_complement(rng: np.random.Generator, seq: ExactSequence) -> np.ndarray:
    """A random complement of ker j: a default complement sheared along ker j."""
    exact = seq.exact
    c = default_complement(seq.j.matrix)
    shear = _rand_matrix(rng, seq.i.source.dim, c.shape[1], exact)
    return c + seq.i.matrix @ shear


def standard_symplectic(n: int, exact: bool = False) -> np.ndarray:
    """Matrix of omega(e_i, f_j) = delta_ij on the basis (e_1..e_n, f_1..f_n)."""
    j = linalg.zeros((2 * n, 2 * n), exact)
    for i in range(n):
        j[i, n + i] = 1
        j[n + i, i] = -1
    return j


@dataclass(frozen=True)
class LagrangianPair:
    omega: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    intersection_dim: int


def random_clean_lagrangians(rng: np.random.Generator, n: int, d: int,
                             exact: bool = False, max_cond: float = 100.0) -> LagrangianPair:
    """Two Lagrangians of R^2n meeting cleanly in a d-dimensional subspace.

    In the standard basis (e, f), L1 = span(e) and L2 = span(e_1..e_d) plus the
    graph f_j + sum_k S_jk e_k (j > d) of a symmetric S, so L1 cap L2 =
    span(e_1..e_d) exactly.  A random automorphism T of R^2n then moves both
    subspaces and the form (omega -> T^-T omega T^-1), and the bases inside
    L1, L2 are scrambled.  ``max_cond`` bounds the condition number of T and
    of the scrambling matrices on the float path.
    """
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    j0 = standard_symplectic(n, exact)
    e = linalg.identity(2 * n, exact)
    l1 = e[:, :n]
    s = _rand_matrix(rng, n - d, n - d, exact)
    s = s + s.T
    graph = e[:, n + d :].copy()
    graph[d:n, :] = graph[d:n, :] + s
    l2 = np.concatenate([e[:, :d], graph], axis=1)
    t = random_invertible(rng, 2 * n, exact, max_cond)
    tinv = linalg.inv(t) if exact else np.linalg.inv(t)
    omega = tinv.T @ j0 @ tinv
    L1 = t @ l1 @ random_invertible(rng, n, exact, max_cond)
    L2 = t @ l2 @ random_invertible(rng, n, exact, max_cond)
    return LagrangianPair(omega, L1, L2, d)


def _orth_complement_in(basis: np.ndarray, sub: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the Euclidean complement of span(sub) inside span(basis)."""
    q = scipy.linalg.orth(basis)
    if sub.shape[1]:
        ks = scipy.linalg.orth(sub)
        q = q - ks @ (ks.T @ q)
    u, sv, _ = np.linalg.svd(q, full_matrices=False)
    return u[:, : basis.shape[1] - sub.shape[1]]


def random_split(rng: np.random.Generator, pair: LagrangianPair,
                 exact: bool = False, tries: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Random complements V1, V2 of L1 cap L2 inside L1, L2 with V1 cap V2 = 0.

    Exact draws are integer combinations of the given bases.  Float draws
    shear the Euclidean complement of K in L_i along K by a bounded random
    amount, which keeps every candidate well conditioned.
    """
    n = pair.L1.shape[1]
    k = pair.intersection_dim
    K = intersection(pair.L1, pair.L2)
    if not exact:
        comps = [_orth_complement_in(L, K) for L in (pair.L1, pair.L2)]
        kq = scipy.linalg.orth(K) if k else K
    for _ in range(tries):
        if exact:
            v1 = pair.L1 @ _rand_matrix(rng, n, n - k, exact)
            v2 = pair.L2 @ _rand_matrix(rng, n, n - k, exact)
        else:
            v1, v2 = (
                c @ random_invertible(rng, n - k, max_cond=10.0) + kq @ rng.uniform(-0.5, 0.5, (k, n - k))
                for c in comps
            )
        if linalg.rank(np.concatenate([K, v1], axis=1)) != n:
            continue
        if linalg.rank(np.concatenate([K, v2], axis=1)) != n:
            continue
        if n - k and linalg.rank(np.concatenate([v1, v2], axis=1)) != 2 * (n - k):
            continue
        return v1, v2
    raise RuntimeError("could not draw valid complements")
