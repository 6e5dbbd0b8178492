"""Root systems of the compact simple simply-connected groups.

All vectors live in the simple-root basis.  The Gram matrix is scaled so the
highest root has squared length 2, and everything here is exact over the
rationals.  The Cartan torus and its dual are identified through this form,
so a root evaluated on a torus element is just an inner product.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import lcm
from typing import Sequence

import numpy as np

from . import linalg

Coords = tuple[Fraction, ...]
IntRoot = tuple[int, ...]

VALID_RANKS = {
    "A": "rank >= 1",
    "B": "rank >= 2",
    "C": "rank >= 3",
    "D": "rank >= 4",
    "E": "rank in {6, 7, 8}",
    "F": "rank == 4",
    "G": "rank == 2",
}


class InvalidTypeError(ValueError):
    """Raised for a (type, rank) pair that is not a simple Lie type."""


def _valid(letter: str, rank: int) -> bool:
    return {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 3,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }.get(letter, False)


def cartan_matrix(letter: str, rank: int) -> list[list[int]]:
    """Cartan matrix with entries <alpha_i^vee, alpha_j>, Bourbaki numbering."""
    if not _valid(letter, rank):
        ranges = "; ".join(f"{t}: {v}" for t, v in VALID_RANKS.items())
        raise InvalidTypeError(f"no simple type {letter}{rank}; valid types are {ranges}")
    r = rank
    a = [[2 if i == j else 0 for j in range(r)] for i in range(r)]

    def link(i: int, j: int, aij: int = -1, aji: int = -1) -> None:
        a[i][j] = aij
        a[j][i] = aji

    if letter in "ABCD":
        chain = r - 1 if letter == "D" else r
        for i in range(chain - 1):
            link(i, i + 1)
        if letter == "B":
            # alpha_r short
            link(r - 2, r - 1, -1, -2)
        elif letter == "C":
            # alpha_r long
            link(r - 2, r - 1, -2, -1)
        elif letter == "D":
            link(r - 3, r - 1)
    elif letter == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, r - 1):
            link(i, i + 1)
    elif letter == "F":
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif letter == "G":
        # alpha_1 short, alpha_2 long
        link(0, 1, -3, -1)
    return a


def _relative_norms(cartan: list[list[int]]) -> list[Fraction]:
    """Squared lengths of the simple roots up to a common scale."""
    r = len(cartan)
    norms: list[Fraction | None] = [None] * r
    norms[0] = Fraction(1)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(r):
            if j != i and cartan[i][j] != 0 and norms[j] is None:
                # (a_i, a_j) = A_ij |a_i|^2 / 2 = A_ji |a_j|^2 / 2
                norms[j] = norms[i] * Fraction(cartan[i][j], cartan[j][i])
                queue.append(j)
    if any(x is None for x in norms):
        raise InvalidTypeError("Dynkin diagram is not connected")
    return norms  # type: ignore[return-value]


def _positive_roots(cartan: list[list[int]]) -> list[IntRoot]:
    """Close the simple roots under root strings, level by level in height."""
    r = len(cartan)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    roots = set(simple)
    level = list(simple)
    cap = 10 * r * r
    while level:
        nxt: set[IntRoot] = set()
        for beta in level:
            for i in range(r):
                if beta == simple[i]:
                    continue
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                pairing = sum(beta[j] * cartan[i][j] for j in range(r))
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    nxt.add(tuple(up))
        nxt -= roots
        roots |= nxt
        if len(roots) > cap:
            raise RuntimeError(f"root closure exceeded {cap} roots")
        level = sorted(nxt)
    return sorted(roots, key=lambda v: (sum(v), v))


@dataclass(frozen=True)
class RootSystem:
    type_letter: str
    rank: int
    cartan: tuple[tuple[int, ...], ...]
    gram: tuple[tuple[Fraction, ...], ...]
    positive_roots: tuple[IntRoot, ...]
    highest_root: IntRoot
    rho: Coords = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.type_letter}{self.rank}"

    @property
    def m(self) -> int:
        return len(self.positive_roots)

    @property
    def n(self) -> int:
        return self.rank + 2 * self.m

    @property
    def simple_roots(self) -> tuple[IntRoot, ...]:
        r = self.rank
        return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))

    @cached_property
    def gram_array(self) -> np.ndarray:
        return linalg.exact_array(self.gram)

    @cached_property
    def gram_scaled(self) -> tuple[np.ndarray, int]:
        """Integer matrix G_int and denominator d with gram = G_int / d."""
        d = lcm(*(q.denominator for row in self.gram for q in row))
        g = np.array([[int(q * d) for q in row] for row in self.gram], dtype=np.int64)
        return g, d

    @cached_property
    def roots_array(self) -> np.ndarray:
        """Positive roots as the columns of an r x m integer array."""
        return np.array(self.positive_roots, dtype=np.int64).T.reshape(self.rank, self.m)

    @cached_property
    def all_roots(self) -> frozenset[IntRoot]:
        neg = (tuple(-c for c in a) for a in self.positive_roots)
        return frozenset(self.positive_roots) | frozenset(neg)

    @cached_property
    def fundamental_weights(self) -> tuple[Coords, ...]:
        """omega_i in simple-root coordinates: <omega_i, alpha_j^vee> = delta_ij."""
        r = self.rank
        # rows: coroot pairings of the simple roots, P[i][j] = <alpha_j, alpha_i^vee>
        p = linalg.exact_array(
            [[2 * self.gram[j][i] / self.gram[i][i] for j in range(r)] for i in range(r)]
        )
        w = linalg.inv(p)
        return tuple(tuple(w[:, i]) for i in range(r))

    def norm_sq(self, v: Sequence) -> Fraction:
        return inner_product(self, v, v)


def _validate(rs: RootSystem) -> None:
    r = rs.rank
    g = rs.gram_array
    for k in range(1, r + 1):
        if linalg.det(g[:k, :k]) <= 0:
            raise AssertionError(f"{rs.name}: Gram matrix not positive definite")
    if rs.norm_sq(rs.highest_root) != 2:
        raise AssertionError(f"{rs.name}: highest root not normalized")
    lengths = {rs.norm_sq(a) for a in rs.positive_roots}
    if not lengths <= {Fraction(2), Fraction(1), Fraction(2, 3)} or len(lengths) > 2:
        raise AssertionError(f"{rs.name}: unexpected root lengths {sorted(lengths)}")
    for a in rs.positive_roots:
        if any(h < c for h, c in zip(rs.highest_root, a)):
            raise AssertionError(f"{rs.name}: {a} not below the highest root")


@lru_cache(maxsize=None)
def build_root_system(type_letter: str, rank: int) -> RootSystem:
    """Construct the normalized root system of type ``type_letter``, ``rank``."""
    letter = str(type_letter).upper()
    rank = int(rank)
    cartan = cartan_matrix(letter, rank)
    norms = _relative_norms(cartan)
    gram = [[cartan[i][j] * norms[i] / 2 for j in range(rank)] for i in range(rank)]
    pos = _positive_roots(cartan)
    top = max(sum(a) for a in pos)
    highest = [a for a in pos if sum(a) == top]
    if len(highest) != 1:
        raise AssertionError(f"{letter}{rank}: highest root not unique")
    h = highest[0]
    h_norm = sum(h[i] * gram[i][j] * h[j] for i in range(rank) for j in range(rank))
    scale = Fraction(2) / h_norm
    gram = [[x * scale for x in row] for row in gram]
    rho = tuple(Fraction(sum(a[i] for a in pos), 2) for i in range(rank))
    rs = RootSystem(
        type_letter=letter,
        rank=rank,
        cartan=tuple(tuple(row) for row in cartan),
        gram=tuple(tuple(row) for row in gram),
        positive_roots=tuple(pos),
        highest_root=h,
        rho=rho,
    )
    _validate(rs)
    return rs


def inner_product(rs: RootSystem, v: Sequence, w: Sequence) -> Fraction:
    """Exact v^T gram w."""
    r = rs.rank
    if len(v) != r or len(w) != r:
        raise ValueError(f"{rs.name}: expected vectors of length {r}, got {len(v)} and {len(w)}")
    g = rs.gram
    total = Fraction(0)
    for i in range(r):
        if v[i]:
            total += v[i] * sum(g[i][j] * w[j] for j in range(r) if w[j])
    return Fraction(total)


def pairing_with_coroot(rs: RootSystem, lam: Sequence, alpha: Sequence) -> Fraction:
    """2 <lam, alpha> / <alpha, alpha> for a root alpha."""
    key = tuple(int(c) for c in alpha) if all(Fraction(c).denominator == 1 for c in alpha) else None
    if key is None or key not in rs.all_roots:
        raise ValueError(f"{rs.name}: {tuple(alpha)} is not a root")
    return 2 * inner_product(rs, lam, alpha) / inner_product(rs, alpha, alpha)


def root_values(rs: RootSystem, xi: Sequence) -> list[Fraction]:
    """alpha(xi) = <alpha, xi> for every positive root, in stored order."""
    return [inner_product(rs, a, xi) for a in rs.positive_roots]


def parse_type(spec: str) -> tuple[str, int]:
    """'G2' -> ('G', 2)."""
    s = spec.strip()
    if len(s) < 2 or not s[1:].isdigit():
        raise InvalidTypeError(f"cannot parse group type {spec!r}; expected e.g. 'A2' or 'G2'")
    return s[0].upper(), int(s[1:])
