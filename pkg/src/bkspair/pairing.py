"""Orbit forms, volumes, Haar constant, phases and the Weyl-sum BKS pairing.

Powers of 2*pi are tracked as integer exponents and only turned into floats
at the very end.  Everything that is rational upstream (products of root
values, norms, the squares of the constants) is kept as a Fraction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .alcove import AlcoveError, classify
from .linalg import exact_vector
from .rootsys import Coords, RootSystem, inner_product, root_values
from .weyl import WeylElement, act

HAAR_CONVENTIONS = ("probability", "unit-lattice")
K_POWERS = ("n-r", "m")
TWO_PI = 2 * math.pi


class AdmissibilityError(ValueError):
    pass


@dataclass(frozen=True)
class Conventions:
    """Readings of the pairing formula that the source leaves open.

    haar: "probability" gives kappa^2 = 1/det(coroot Gram); "unit-lattice"
      takes kappa = 1.
    phase_k: multiply the phase exponent by k.
    k_power: exponent of k in the prefactor, n - r (as printed) or m (what
      |Omega_{k beta}|^1/2 |Omega_{k beta'}|^1/2 actually scales by).
    """

    haar: str = "probability"
    phase_k: bool = False
    k_power: str = "n-r"

    def __post_init__(self):
        if self.haar not in HAAR_CONVENTIONS:
            raise ValueError(f"haar must be one of {HAAR_CONVENTIONS}, got {self.haar!r}")
        if self.k_power not in K_POWERS:
            raise ValueError(f"k_power must be one of {K_POWERS}, got {self.k_power!r}")


# -- orbit form and volumes --------------------------------------------------


def product_of_roots(rs: RootSystem, xi: Sequence) -> Fraction:
    """prod over positive alpha of alpha(xi)."""
    p = Fraction(1)
    for v in root_values(rs, exact_vector(xi)):
        p *= v
    return p


def omega_top_coeff(rs: RootSystem, xi: Sequence) -> tuple[Fraction, int]:
    """(P, m) with Omega_xi = (-2 pi)^m P gamma."""
    return product_of_roots(rs, xi), rs.m


def _require_regular(rs: RootSystem, xi: Sequence) -> list[Fraction]:
    vals = root_values(rs, exact_vector(xi))
    if any(v == 0 for v in vals):
        raise ValueError(f"{rs.name}: xi = {tuple(xi)} is not regular")
    return vals


@dataclass(frozen=True)
class SignCheck:
    passed: bool
    checked: int
    counterexample: tuple[int, ...] | None = None


def sign_identity_check(rs: RootSystem, elements: Sequence[WeylElement], xi: Sequence) -> SignCheck:
    """Exact check of prod alpha(w xi) = (-1)^l(w) prod alpha(xi) for every w given."""
    xi = exact_vector(xi)
    _require_regular(rs, xi)
    # integer numerators: xi = X / D, gram = G / d, so alpha(w xi) = alpha^T G w X / (d D)
    den = math.lcm(*(x.denominator for x in xi))
    x = np.array([int(c * den) for c in xi], dtype=object)
    g, _ = rs.gram_scaled
    lhs_rows = rs.roots_array.T.astype(object) @ g.astype(object)
    base = math.prod(lhs_rows @ x)
    for w in elements:
        vals = lhs_rows @ (w.array.astype(object) @ x)
        if math.prod(vals) != (-1) ** w.length * base:
            return SignCheck(False, len(elements), w.word)
    return SignCheck(True, len(elements))


def coroot_gram(rs: RootSystem) -> np.ndarray:
    r = rs.rank
    g = rs.gram
    return linalg.exact_array([[4 * g[i][j] / (g[i][i] * g[j][j]) for j in range(r)] for i in range(r)])


def kappa_sq(rs: RootSystem, haar: str = "probability") -> Fraction:
    if haar == "probability":
        return 1 / linalg.det(coroot_gram(rs))
    if haar == "unit-lattice":
        return Fraction(1)
    raise ValueError(f"haar must be one of {HAAR_CONVENTIONS}, got {haar!r}")


def kappa(rs: RootSystem, haar: str = "probability") -> float:
    return math.sqrt(kappa_sq(rs, haar))


def rho_product(rs: RootSystem) -> Fraction:
    """prod over positive alpha of <alpha, rho>."""
    return product_of_roots(rs, rs.rho)


@dataclass(frozen=True)
class SymbolicReal:
    """rational * (2 pi)^power."""

    rational: Fraction
    power: int

    @property
    def value(self) -> float:
        return float(self.rational) * TWO_PI**self.power


def vol_GT_metric(rs: RootSystem) -> SymbolicReal:
    return SymbolicReal(1 / rho_product(rs), -rs.m)


@dataclass(frozen=True)
class VolumeResult:
    value: float
    square: Fraction


def _dominant_regular(rs: RootSystem, xi: Sequence) -> list[Fraction]:
    vals = root_values(rs, exact_vector(xi))
    if any(v <= 0 for v in vals):
        raise ValueError(f"{rs.name}: xi = {tuple(xi)} is not dominant regular")
    return vals


def vol_GT_pair(rs: RootSystem, xi: Sequence, xi_prime: Sequence) -> VolumeResult:
    """Volume of G/T for |Xi_xi|^1/2 |Xi_xi'|^1/2."""
    p = math.prod(_dominant_regular(rs, xi)) * math.prod(_dominant_regular(rs, xi_prime))
    p = Fraction(p)
    q = rho_product(rs)
    square = p / (q * q)
    # same number via (2 pi)^m (prod)^1/2 times the metric volume
    metric = vol_GT_metric(rs)
    assert metric.power + rs.m == 0
    assert p * metric.rational**2 == square
    return VolumeResult(math.sqrt(square), square)


def half_density_value(rs: RootSystem, k: int, beta: Sequence, eta, haar: str = "probability") -> float:
    """kappa^1/2 |Omega_{k beta}(eta_1..eta_{n-r})|^1/2.

    ``eta`` is a (2m) x (2m) matrix whose columns are the tuple in the basis
    x_{a1}, y_{a1}, x_{a2}, y_{a2}, ... of the complement of the torus.
    """
    eta = np.asarray(eta)
    size = 2 * rs.m
    if eta.shape != (size, size):
        raise ValueError(f"{rs.name}: need {size} vectors of length {size}, got shape {eta.shape}")
    kb = tuple(k * b for b in exact_vector(beta))
    p = abs(product_of_roots(rs, kb))
    d = abs(linalg.det(eta))
    return math.sqrt(kappa_sq(rs, haar)) ** 0.5 * math.sqrt(float(d) * float(p)) * TWO_PI ** (rs.m / 2)


# -- intersection points and phases -----------------------------------------


@dataclass(frozen=True)
class IntersectionPoint:
    w: WeylElement
    beta: Coords
    beta_prime: Coords
    diff: Coords
    norm_sq: Fraction


def _regular(rs: RootSystem, beta, k: int = 1):
    try:
        pt = classify(rs, beta, k)
    except AlcoveError as exc:
        raise AdmissibilityError(str(exc)) from None
    if not pt.is_regular:
        raise AdmissibilityError(f"{rs.name}: beta = {tuple(map(str, pt.beta))} is not regular")
    return pt


def _admissible(rs: RootSystem, beta, k: int):
    pt = _regular(rs, beta, k)
    if not pt.is_k_integral:
        raise AdmissibilityError(f"{rs.name}: beta = {tuple(map(str, pt.beta))} is not 1/{k}-integral")
    return pt


def intersection_points(rs: RootSystem, elements: Sequence[WeylElement], beta, beta_prime) -> list[IntersectionPoint]:
    """One point z_w per w, recorded through w beta - beta'."""
    beta = _regular(rs, beta).beta
    beta_prime = _regular(rs, beta_prime).beta
    out = []
    for w in elements:
        diff = tuple(a - b for a, b in zip(act(w, beta), beta_prime))
        out.append(IntersectionPoint(w, beta, beta_prime, diff, inner_product(rs, diff, diff)))
    if len({p.diff for p in out}) != len(out):
        raise AssertionError("intersection points are not distinct")
    return out


def _phase(e: Fraction) -> complex:
    frac = e % 1
    return cmath.exp(2j * math.pi * float(frac))


def phase_exponent(rs: RootSystem, k: int, w: WeylElement, beta, beta_prime, phase_k: bool = False) -> Fraction:
    diff = tuple(a - b for a, b in zip(act(w, exact_vector(beta)), exact_vector(beta_prime)))
    e = inner_product(rs, diff, diff)
    return k * e if phase_k else e


def phase_at(rs: RootSystem, k: int, w: WeylElement, beta, beta_prime, include_k_exponent: bool = False) -> complex:
    _admissible(rs, beta, k)
    _admissible(rs, beta_prime, k)
    return _phase(phase_exponent(rs, k, w, beta, beta_prime, include_k_exponent))


def weyl_norms(rs: RootSystem, elements: Sequence[WeylElement], beta, beta_prime) -> list[Fraction]:
    """||w beta - beta'||^2 for every w, exactly, with integer arithmetic."""
    beta, beta_prime = exact_vector(beta), exact_vector(beta_prime)
    den = math.lcm(*(x.denominator for x in beta + beta_prime))
    b = np.array([int(x * den) for x in beta], dtype=object)
    bp = np.array([int(x * den) for x in beta_prime], dtype=object)
    g, d = rs.gram_scaled
    g = g.astype(object)
    q = d * den * den
    out = []
    for w in elements:
        v = w.array.astype(object) @ b - bp
        out.append(Fraction(int(v @ g @ v), q))
    return out


# -- the pairing ---------------------------------------------------------------


@dataclass(frozen=True)
class WeylTerm:
    word: tuple[int, ...]
    length: int
    norm_sq: Fraction
    exponent: Fraction
    phase: complex


@dataclass(frozen=True)
class PairingResult:
    rs_name: str
    k: int
    beta: Coords
    beta_prime: Coords
    conventions: Conventions
    k_exponent: int
    constant: float
    constant_sq: Fraction
    prefactor: float
    product_term: float
    product_sq: Fraction
    weyl_terms: list[WeylTerm] = field(repr=False)
    weyl_sum: complex
    total: complex


def main_computation_identity(rs: RootSystem, k: int, beta) -> bool:
    """prod alpha(k beta) = k^m prod alpha(beta), exactly."""
    kb = tuple(k * b for b in exact_vector(beta))
    return product_of_roots(rs, kb) == Fraction(k) ** rs.m * product_of_roots(rs, beta)


def _fsum_complex(values: Sequence[complex]) -> complex:
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def bks_pairing(rs: RootSystem, elements: Sequence[WeylElement], k: int, beta, beta_prime,
                conventions: Conventions = Conventions()) -> PairingResult:
    """k^e (kappa / prod <a, rho>) (prod a(beta) a(beta'))^1/2 sum_w exp(2 pi i E_w).

    ``elements`` must be all of W in (length, word) order, as returned by
    weyl.enumerate_weyl; the sum is taken in that order.
    """
    if k < 1:
        raise AdmissibilityError(f"level must be a positive integer, got {k}")
    beta = _admissible(rs, beta, k).beta
    beta_prime = _admissible(rs, beta_prime, k).beta
    k_exp = rs.n - rs.rank if conventions.k_power == "n-r" else rs.m
    constant_sq = kappa_sq(rs, conventions.haar) / rho_product(rs) ** 2
    product_sq = product_of_roots(rs, beta) * product_of_roots(rs, beta_prime)
    # the density carries (2 pi)^m from |Omega_beta|^1/2 |Omega_beta'|^1/2, the
    # metric volume (2 pi)^-m; the constant is 2 pi free
    if rs.m + vol_GT_metric(rs).power != 0:
        raise AssertionError("2 pi powers do not cancel")
    if not main_computation_identity(rs, k, beta) or not main_computation_identity(rs, k, beta_prime):
        raise AssertionError("root product is not homogeneous of degree m")
    norms = weyl_norms(rs, elements, beta, beta_prime)
    terms = []
    for w, e in zip(elements, norms):
        ex = k * e if conventions.phase_k else e
        terms.append(WeylTerm(w.word, w.length, e, ex, _phase(ex)))
    wsum = _fsum_complex([t.phase for t in terms])
    constant = math.sqrt(constant_sq)
    prefactor = float(k) ** k_exp * constant
    product_term = math.sqrt(product_sq)
    total = prefactor * product_term * wsum
    check = prefactor * product_term * sum(t.phase for t in terms)
    # relative to sum |terms|, the conditioning of the Weyl sum
    if abs(total - check) > 1e-12 * max(1.0, prefactor * product_term * len(terms)):
        raise AssertionError("pairing breakdown is inconsistent")
    return PairingResult(
        rs.name, k, beta, beta_prime, conventions, k_exp, constant, constant_sq,
        prefactor, product_term, product_sq, terms, wsum, total,
    )
