"""Subset and packet combinatorics.

Labels are sorted subsets of ``[N] = {1, ..., N}``.  A label of size ``N - 2``
names one slot of a polygon equation, a label of size ``N - 1`` names one map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence


@dataclass(frozen=True, order=True)
class Label:
    """A strictly increasing subset of ``1..n``."""

    n: int
    elems: tuple[int, ...]
    mask: int = field(default=0, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        elems = tuple(self.elems)
        if any(b <= a for a, b in zip(elems, elems[1:])):
            raise ValueError(f"label elements must be strictly increasing: {elems}")
        if elems and (elems[0] < 1 or elems[-1] > self.n):
            raise ValueError(f"label {elems} not inside [1..{self.n}]")
        object.__setattr__(self, "elems", elems)
        m = 0
        for e in elems:
            m |= 1 << (e - 1)
        object.__setattr__(self, "mask", m)

    @classmethod
    def of(cls, n: int, elems: Iterable[int]) -> "Label":
        return cls(n, tuple(sorted(elems)))

    @classmethod
    def hat(cls, n: int, k: int) -> "Label":
        """The complement ``[n] \\ {k}``."""
        return cls(n, tuple(i for i in range(1, n + 1) if i != k))

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __contains__(self, x: object) -> bool:
        return x in self.elems

    def without(self, x: int) -> "Label":
        return Label(self.n, tuple(e for e in self.elems if e != x))

    def union(self, other: "Label") -> "Label":
        return Label.of(self.n, set(self.elems) | set(other.elems))

    def missing(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.n + 1) if i not in self.elems)

    def text(self) -> str:
        if self.n < 10:
            return "".join(str(e) for e in self.elems)
        return ",".join(str(e) for e in self.elems)

    def __str__(self) -> str:
        return self.text()


LabelSequence = tuple[Label, ...]


def subsets(n: int, size: int) -> LabelSequence:
    """All ``size``-subsets of ``[n]`` in lexicographic order."""
    return tuple(Label(n, c) for c in combinations(range(1, n + 1), size))


def packet(m: Label) -> LabelSequence:
    """The packet of ``m`` (its codimension-one subsets) in lexicographic order."""
    if len(m) < 2:
        raise ValueError(f"packet needs a label with at least 2 elements, got {m.elems}")
    # dropping later elements yields lexicographically smaller subsets
    return tuple(m.without(x) for x in reversed(m.elems))


def half_packets(k: Label) -> tuple[LabelSequence, LabelSequence]:
    """Split ``packet(k)`` into its odd- and even-position halves (1-based)."""
    p = packet(k)
    return p[0::2], p[1::2]


def commutes(j: Label, j2: Label) -> bool:
    """True iff no ``(N-1)``-subset contains both slot labels."""
    n = j.n
    if j2.n != n or len(j) != n - 2 or len(j2) != n - 2:
        raise ValueError("commutes expects two labels of size N-2 over the same [N]")
    if j == j2:
        raise ValueError("commutes expects distinct labels")
    return (j.mask | j2.mask) == (1 << n) - 1


def _check_n(n: int) -> None:
    if n < 3:
        raise ValueError(f"N must be at least 3, got {n}")


def _position_parities(j: Label) -> list[int]:
    # For K = J + {x}: J = K \ {k_i} sits at lex position |K| - i + 1 of packet(K).
    parities = []
    for x in j.missing():
        kk = Label.of(j.n, j.elems + (x,))
        i = kk.elems.index(x) + 1
        parities.append((len(kk) - i + 1) % 2)
    return parities


def is_blue_in_lex(j: Label) -> bool:
    """Slot label lies in the odd half-packet of both maps that contain it."""
    return all(p == 1 for p in _position_parities(j))


def is_blue_in_revlex(j: Label) -> bool:
    """Slot label lies in the even half-packet of both maps that contain it."""
    return all(p == 0 for p in _position_parities(j))


def blue_alpha(n: int) -> LabelSequence:
    _check_n(n)
    return tuple(j for j in subsets(n, n - 2) if is_blue_in_lex(j))


def blue_omega(n: int) -> LabelSequence:
    _check_n(n)
    return tuple(j for j in reversed(subsets(n, n - 2)) if is_blue_in_revlex(j))


def red_alpha(n: int) -> LabelSequence:
    return tuple(reversed(blue_omega(n)))


def red_omega(n: int) -> LabelSequence:
    return tuple(reversed(blue_alpha(n)))


def parse_label(n: int, text: str | Sequence[int]) -> Label:
    """Parse ``"134"`` or ``[1, 3, 4]`` into a label of ``[n]``."""
    if isinstance(text, str):
        parts = text.split(",") if "," in text else list(text)
        return Label.of(n, (int(p) for p in parts))
    return Label.of(n, text)
