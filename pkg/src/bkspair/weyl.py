"""Weyl group enumeration as exact matrices on simple-root coordinates.

In the simple-root basis every simple reflection is an integer matrix, so the
whole group is too.  Elements are deduplicated on their exact integer
entries; there is no floating point anywhere in this module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .linalg import fraction_str
from .rootsys import RootSystem, inner_product

DEFAULT_MAX_SIZE = 10**6
CACHE_FORMAT = "bkspair.weyl-cache"
CACHE_VERSION = 1

IntMatrix = tuple[tuple[int, ...], ...]


class WeylGroupTooLarge(RuntimeError):
    def __init__(self, name: str, partial: int, max_size: int):
        self.partial = partial
        self.max_size = max_size
        super().__init__(
            f"W({name}) has more than {max_size} elements (aborted after {partial}); "
            "raise max_size explicitly to enumerate it"
        )


@dataclass(frozen=True)
class WeylElement:
    matrix: IntMatrix
    word: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.word)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    def rational_matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(Fraction(x) for x in row) for row in self.matrix)

    def __matmul__(self, other: "WeylElement") -> "WeylElement":
        prod = self.array @ other.array
        return WeylElement(_as_tuple(prod), self.word + other.word)


def _as_tuple(a: np.ndarray) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in a)


def identity_element(rs: RootSystem) -> WeylElement:
    return WeylElement(_as_tuple(np.eye(rs.rank, dtype=np.int64)), ())


def _reflection_array(rs: RootSystem, i: int) -> np.ndarray:
    r = rs.rank
    s = np.eye(r, dtype=np.int64)
    # s_i(v) = v - <v, alpha_i^vee> alpha_i only touches coordinate i
    s[i - 1, :] -= np.array(rs.cartan[i - 1], dtype=np.int64)
    return s


def simple_reflection(rs: RootSystem, i: int) -> WeylElement:
    """The reflection in the i-th simple root (1-based)."""
    if not 1 <= i <= rs.rank:
        raise ValueError(f"{rs.name}: simple index {i} out of range 1..{rs.rank}")
    return WeylElement(_as_tuple(_reflection_array(rs, i)), (i,))


def enumerate_weyl(rs: RootSystem, max_size: int = DEFAULT_MAX_SIZE) -> list[WeylElement]:
    """All of W, each with its lexicographically smallest reduced word.

    Breadth-first search over right multiplication by simple reflections.
    Frontiers are processed in word order, so the first word to reach an
    element is its lex-least reduced word and the output is already sorted
    by (length, word).
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    r = rs.rank
    gens = [_reflection_array(rs, i) for i in range(1, r + 1)]
    ident = np.eye(r, dtype=np.int64)
    seen = {ident.tobytes()}
    out_mats = [ident]
    out_words: list[tuple[int, ...]] = [()]
    frontier = np.stack([ident])
    frontier_words: list[tuple[int, ...]] = [()]
    while len(frontier_words):
        products = [frontier @ g for g in gens]
        nxt_mats = []
        nxt_words = []
        for f, word in enumerate(frontier_words):
            for i in range(r):
                cand = products[i][f]
                key = cand.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                nxt_mats.append(cand)
                nxt_words.append(word + (i + 1,))
                if len(seen) > max_size:
                    raise WeylGroupTooLarge(rs.name, len(seen), max_size)
        out_mats.extend(nxt_mats)
        out_words.extend(nxt_words)
        frontier = np.stack(nxt_mats) if nxt_mats else np.empty((0, r, r), dtype=np.int64)
        frontier_words = nxt_words
    return [WeylElement(_as_tuple(m), w) for m, w in zip(out_mats, out_words)]


def stack(elements: Sequence[WeylElement]) -> np.ndarray:
    """(|W|, r, r) integer array of the element matrices."""
    return np.stack([e.array for e in elements])


def act(w: WeylElement, v: Sequence) -> tuple[Fraction, ...]:
    r = len(w.matrix)
    if len(v) != r:
        raise ValueError(f"dimension mismatch: element acts on length {r}, got {len(v)}")
    return tuple(Fraction(sum(w.matrix[i][j] * v[j] for j in range(r) if w.matrix[i][j])) for i in range(r))


def inverse(w: WeylElement) -> WeylElement:
    # inverse of an integer matrix of determinant +-1 is integral
    inv = np.rint(np.linalg.inv(w.array)).astype(np.int64)
    if not np.array_equal(inv @ w.array, np.eye(len(w.matrix), dtype=np.int64)):
        raise ArithmeticError("Weyl matrix is not unimodular")
    return WeylElement(_as_tuple(inv), tuple(reversed(w.word)))


def inversion_count(rs: RootSystem, w: WeylElement) -> int:
    """|{alpha > 0 : w alpha < 0}|, which equals |Phi+ cap w^-1 Phi-|."""
    images = w.array @ rs.roots_array
    return int(np.sum(np.any(images < 0, axis=0)))


def inversion_counts(rs: RootSystem, elements: Sequence[WeylElement]) -> np.ndarray:
    images = stack(elements) @ rs.roots_array
    return np.sum(np.any(images < 0, axis=1), axis=1)


def preserves_form(rs: RootSystem, w: WeylElement) -> bool:
    """Exact check of M^T gram M = gram."""
    r = rs.rank
    cols = [tuple(w.matrix[i][j] for i in range(r)) for j in range(r)]
    return all(
        inner_product(rs, cols[a], cols[b]) == rs.gram[a][b] for a in range(r) for b in range(r)
    )


def longest_element(elements: Sequence[WeylElement]) -> WeylElement:
    return max(elements, key=lambda e: e.length)


# -- cache file -------------------------------------------------------------


def cache_filename(rs: RootSystem) -> str:
    return f"weyl_{rs.name}_v{CACHE_VERSION}_{__version__}.jsonl"


def dumps_cache(rs: RootSystem, elements: Sequence[WeylElement]) -> str:
    """Serialize an enumeration: a JSON header line, then one JSON record per element."""
    header = {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "code_version": __version__,
        "type": rs.type_letter,
        "rank": rs.rank,
        "order": len(elements),
        "record": {"word": "reduced word, 1-based simple indices", "matrix": "row-major p/q"},
    }
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for e in elements:
        rec = {"word": list(e.word), "matrix": [fraction_str(Fraction(x)) for row in e.matrix for x in row]}
        lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def loads_cache(text: str, rs: RootSystem | None = None) -> list[WeylElement]:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty Weyl cache")
    header = json.loads(lines[0])
    if header.get("format") != CACHE_FORMAT or header.get("version") != CACHE_VERSION:
        raise ValueError(f"unrecognized Weyl cache header {header!r}")
    if rs is not None and (header["type"], header["rank"]) != (rs.type_letter, rs.rank):
        raise ValueError(f"cache is for {header['type']}{header['rank']}, not {rs.name}")
    r = header["rank"]
    out = []
    for line in lines[1:]:
        rec = json.loads(line)
        vals = [Fraction(s) for s in rec["matrix"]]
        if any(v.denominator != 1 for v in vals) or len(vals) != r * r:
            raise ValueError(f"malformed Weyl cache record {rec!r}")
        mat = tuple(tuple(int(vals[i * r + j]) for j in range(r)) for i in range(r))
        out.append(WeylElement(mat, tuple(rec["word"])))
    if len(out) != header["order"]:
        raise ValueError(f"Weyl cache truncated: {len(out)} of {header['order']} records")
    return out


def load_or_enumerate(
    rs: RootSystem, cache_dir: str | Path | None = None, max_size: int = DEFAULT_MAX_SIZE
) -> tuple[list[WeylElement], bool]:
    """Enumerate W, going through the on-disk cache when a directory is given.

    Returns (elements, cache_hit).
    """
    if cache_dir is None:
        return enumerate_weyl(rs, max_size), False
    path = Path(cache_dir) / cache_filename(rs)
    if path.exists():
        return loads_cache(path.read_text(), rs), True
    elements = enumerate_weyl(rs, max_size)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(dumps_cache(rs, elements))
    tmp.replace(path)
    return elements, False
