"""Concrete solutions: finite tables and exact-rational maps."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from .engine import FiniteMap, PointMap


class GroupError(ValueError):
    pass


def transposition(q: int) -> FiniteMap:
    """P(a, b) = (b, a)."""
    return FiniteMap.from_function(q, 2, 2, lambda a, b: (b, a))


def total_inversion(q: int) -> FiniteMap:
    """(a, b, c) -> (c, b, a)."""
    return FiniteMap.from_function(q, 3, 3, lambda a, b, c: (c, b, a))


def _check_group(table: Sequence[Sequence[int]]) -> tuple[int, list[int]]:
    """Validate a multiplication table; return the identity and the inverses."""
    q = len(table)
    if q == 0 or any(len(row) != q for row in table):
        raise GroupError("group table must be square and non-empty")
    if any(not 0 <= v < q for row in table for v in row):
        raise GroupError("group table entries must lie in 0..q-1")
    for a, b, c in product(range(q), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise GroupError(f"not associative at ({a},{b},{c})")
    units = [e for e in range(q) if all(table[e][x] == x == table[x][e] for x in range(q))]
    if not units:
        raise GroupError("no identity element")
    e = units[0]
    inv = []
    for a in range(q):
        found = [b for b in range(q) if table[a][b] == e == table[b][a]]
        if not found:
            raise GroupError(f"element {a} has no inverse")
        inv.append(found[0])
    return e, inv


def cyclic_group(q: int) -> list[list[int]]:
    return [[(a + b) % q for b in range(q)] for a in range(q)]


def group_pentagon_right(table: Sequence[Sequence[int]]) -> FiniteMap:
    """T(a, b) = (b, a b)."""
    _check_group(table)
    return FiniteMap.from_function(len(table), 2, 2, lambda a, b: (b, table[a][b]))


def group_pentagon_inverse(table: Sequence[Sequence[int]]) -> FiniteMap:
    """T(a, b) = (a^-1 b, a)."""
    _, inv = _check_group(table)
    return FiniteMap.from_function(len(table), 2, 2, lambda a, b: (table[inv[a]][b], a))


def idempotent_trigons(q: int) -> list[FiniteMap]:
    """Every idempotent self-map of {0..q-1}, in table order."""
    out = []
    for f in product(range(q), repeat=q):
        if all(f[f[x]] == f[x] for x in range(q)):
            out.append(FiniteMap(q, 1, 1, tuple((v,) for v in f)))
    return out


def open_unit(x: Fraction) -> bool:
    return 0 < x < 1


def _star(a: Fraction, b: Fraction) -> Fraction:
    return (1 - a) * b / (1 - a * b)


def projective_pentagon() -> PointMap:
    """T(a, b) = ((1-a) b / (1-ab), ab) on the open unit square."""
    return PointMap(2, 2, lambda a, b: (_star(a, b), a * b), open_unit, "projective-pentagon")


def dilog_dual_hexagon() -> PointMap:
    """(a, b) -> ((1-a) b/(1-ab), ab, a (1-b)/(1-ab)); the third part is b * a."""
    return PointMap(2, 3, lambda a, b: (_star(a, b), a * b, _star(b, a)), open_unit,
                    "dilog-dual-hexagon")


# name -> (builder taking q, equations it solves as (N, dual))
FINITE: dict[str, tuple[Callable[[int], FiniteMap], tuple[tuple[int, bool], ...]]] = {
    "transposition": (transposition, ((5, False), (5, True))),
    "total-inversion": (total_inversion, ((7, False), (7, True))),
    "cyclic-pentagon-right": (lambda q: group_pentagon_right(cyclic_group(q)), ((5, False),)),
    "cyclic-pentagon-inverse": (lambda q: group_pentagon_inverse(cyclic_group(q)), ((5, False),)),
}

RATIONAL: dict[str, tuple[Callable[[], PointMap], tuple[int, bool]]] = {
    "projective-pentagon": (projective_pentagon, (5, False)),
    "dilog-dual-hexagon": (dilog_dual_hexagon, (6, True)),
}


def names() -> list[str]:
    return sorted(FINITE) + sorted(RATIONAL)


def emit(name: str, q: int) -> FiniteMap:
    if name in RATIONAL:
        raise ValueError(f"{name} acts on rationals and has no finite table")
    if name not in FINITE:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(names())}")
    return FINITE[name][0](q)


def rational_samples(count: int, seed: int, arity: int, max_den: int = 1000) -> list[tuple[Fraction, ...]]:
    """Seeded random points of the open unit cube with small denominators."""
    import numpy as np

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        point = []
        for _ in range(arity):
            den = int(rng.integers(2, max_den + 1))
            point.append(Fraction(int(rng.integers(1, den)), den))
        out.append(tuple(point))
    return out
