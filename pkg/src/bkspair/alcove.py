"""Fundamental alcove: conjugacy-class representatives and level-k points."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .linalg import exact_vector
from .rootsys import Coords, RootSystem, inner_product, pairing_with_coroot


class AlcoveError(ValueError):
    pass


class AdmissibleLimitExceeded(RuntimeError):
    def __init__(self, partial: int, max_count: int):
        self.partial = partial
        super().__init__(f"more than {max_count} admissible points (aborted after {partial})")


@dataclass(frozen=True)
class AlcovePoint:
    beta: Coords
    k: int
    is_regular: bool
    is_k_integral: bool

    @property
    def admissible(self) -> bool:
        return self.is_regular and self.is_k_integral


def weight_coords(rs: RootSystem, v: Sequence) -> Coords:
    """Coordinates of v in the fundamental-weight basis: <v, alpha_i^vee>."""
    return tuple(pairing_with_coroot(rs, v, a) for a in rs.simple_roots)


def from_weight_coords(rs: RootSystem, c: Sequence) -> Coords:
    """Simple-root coordinates of sum_i c_i omega_i."""
    r = rs.rank
    omega = rs.fundamental_weights
    return tuple(sum((Fraction(c[i]) * omega[i][j] for i in range(r)), Fraction(0)) for j in range(r))


def classify(rs: RootSystem, beta: Sequence, k: int) -> AlcovePoint:
    """Check alcove membership of beta and flag regularity and 1/k-integrality."""
    if k < 1:
        raise AlcoveError(f"level must be a positive integer, got {k}")
    beta = exact_vector(beta)
    if len(beta) != rs.rank:
        raise AlcoveError(f"{rs.name}: beta must have {rs.rank} coordinates, got {len(beta)}")
    walls = [inner_product(rs, a, beta) for a in rs.simple_roots]
    for i, v in enumerate(walls, start=1):
        if v < 0:
            raise AlcoveError(f"beta outside the alcove: <alpha_{i}, beta> = {v} < 0")
    top = inner_product(rs, rs.highest_root, beta)
    if top > 1:
        raise AlcoveError(f"beta outside the alcove: <alpha_0, beta> = {top} > 1")
    regular = all(v > 0 for v in walls) and top < 1
    kb = tuple(k * x for x in beta)
    integral = all(c.denominator == 1 for c in weight_coords(rs, kb))
    return AlcovePoint(beta, k, regular, integral)


def level_marks(rs: RootSystem) -> tuple[int, ...]:
    """<alpha_0, omega_i>: the level of each fundamental weight."""
    marks = tuple(inner_product(rs, rs.highest_root, w) for w in rs.fundamental_weights)
    if any(m.denominator != 1 or m <= 0 for m in marks):
        raise AssertionError(f"{rs.name}: non-integral level marks {marks}")
    return tuple(int(m) for m in marks)


def _strict_weights(marks: Sequence[int], budget: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors c >= 1 with sum c_i marks_i < budget, lexicographic."""
    if not marks:
        yield ()
        return
    head, rest = marks[0], marks[1:]
    floor_rest = sum(rest)
    c = 1
    while c * head + floor_rest < budget:
        for tail in _strict_weights(rest, budget - c * head):
            yield (c,) + tail
        c += 1


def enumerate_admissible(rs: RootSystem, k: int, max_count: int = 10**6) -> list[AlcovePoint]:
    """All regular 1/k-integral alcove points beta = lambda / k."""
    if k < 1:
        raise AlcoveError(f"level must be a positive integer, got {k}")
    out = []
    for c in _strict_weights(level_marks(rs), k):
        if len(out) >= max_count:
            raise AdmissibleLimitExceeded(len(out), max_count)
        beta = tuple(x / k for x in from_weight_coords(rs, c))
        out.append(AlcovePoint(beta, k, True, True))
    return out
