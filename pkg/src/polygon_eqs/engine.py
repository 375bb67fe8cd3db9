"""Map tables, exact-rational point maps and program evaluation.

Rows of a map table are indexed big-endian: the first argument is the most
significant digit, so row order is the lexicographic order of input tuples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np

from .combinat import Label
from .eqcompiler import Apply, Program, Swap, consumed, emitted, map_arity


class ArityError(ValueError):
    pass


class CarrierError(ValueError):
    pass


class DomainError(ValueError):
    def __init__(self, message: str, value: tuple = ()):
        super().__init__(message)
        self.value = value


def encode(values: Sequence[int], q: int) -> int:
    idx = 0
    for v in values:
        idx = idx * q + v
    return idx


def decode(idx: int, q: int, k: int) -> tuple[int, ...]:
    out = [0] * k
    for i in range(k - 1, -1, -1):
        idx, out[i] = divmod(idx, q)
    return tuple(out)


def encode_mixed(values: Sequence[int], sizes: Sequence[int]) -> int:
    idx = 0
    for v, s in zip(values, sizes):
        idx = idx * s + v
    return idx


def decode_mixed(idx: int, sizes: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(sizes)
    for i in range(len(sizes) - 1, -1, -1):
        idx, out[i] = divmod(idx, sizes[i])
    return tuple(out)


@dataclass(frozen=True)
class FiniteMap:
    """A total map ``U^k_in -> U^k_out`` on ``U = {0, ..., q-1}``."""

    q: int
    k_in: int
    k_out: int
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        if self.q < 1 or self.k_in < 0 or self.k_out < 0:
            raise ValueError("need q >= 1 and non-negative arities")
        if len(table) != self.q ** self.k_in:
            raise ValueError(f"table has {len(table)} rows, expected {self.q ** self.k_in}")
        for row in table:
            if len(row) != self.k_out:
                raise ValueError(f"table row {row} does not have {self.k_out} entries")
            if any(not 0 <= v < self.q for v in row):
                raise ValueError(f"table row {row} leaves the carrier 0..{self.q - 1}")

    @classmethod
    def from_function(cls, q: int, k_in: int, k_out: int, fn: Callable[..., Sequence[int]]) -> "FiniteMap":
        rows = []
        for args in product(range(q), repeat=k_in):
            out = fn(*args)
            if isinstance(out, int):
                out = (out,)
            rows.append(tuple(out))
        return cls(q, k_in, k_out, tuple(rows))

    @classmethod
    def from_array(cls, q: int, k_in: int, arr: np.ndarray) -> "FiniteMap":
        arr = np.asarray(arr)
        return cls(q, k_in, int(arr.shape[1]), tuple(map(tuple, arr.tolist())))

    def __call__(self, *args: int) -> tuple[int, ...]:
        return self.table[encode(args, self.q)]

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.int64).reshape(self.q ** self.k_in, self.k_out)

    def key(self) -> bytes:
        """Stable byte key for deterministic ordering."""
        return bytes(v for row in self.table for v in row) if self.q <= 256 else repr(self.table).encode()

    def component(self, i: int) -> "FiniteMap":
        return FiniteMap(self.q, self.k_in, 1, tuple((row[i],) for row in self.table))

    def to_json(self) -> dict:
        return {"q": self.q, "k_in": self.k_in, "k_out": self.k_out, "table": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteMap":
        try:
            return cls(int(data["q"]), int(data["k_in"]), int(data["k_out"]),
                       tuple(tuple(r) for r in data["table"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed map JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class SortedMap:
    """A map between products of carriers of possibly different sizes."""

    in_sizes: tuple[int, ...]
    out_sizes: tuple[int, ...]
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        rows = int(np.prod(self.in_sizes, dtype=np.int64)) if self.in_sizes else 1
        if len(self.table) != rows:
            raise CarrierError(f"table has {len(self.table)} rows, expected {rows}")
        for row in self.table:
            if len(row) != len(self.out_sizes) or any(not 0 <= v < s for v, s in zip(row, self.out_sizes)):
                raise CarrierError(f"row {row} does not fit output sizes {self.out_sizes}")

    @classmethod
    def from_function(cls, in_sizes, out_sizes, fn) -> "SortedMap":
        rows = tuple(tuple(fn(*args)) for args in product(*(range(s) for s in in_sizes)))
        return cls(tuple(in_sizes), tuple(out_sizes), rows)

    @classmethod
    def from_finite(cls, t: FiniteMap) -> "SortedMap":
        return cls((t.q,) * t.k_in, (t.q,) * t.k_out, t.table)

    def __call__(self, *args: int) -> tuple[int, ...]:
        return self.table[encode_mixed(args, self.in_sizes)]


@dataclass(frozen=True)
class LabeledSystem:
    """Per-slot carriers plus one map per (N-1)-subset ``K``."""

    n: int
    dual: bool
    carrier: Mapping[Label, int]
    maps: Mapping[Label, SortedMap]

    def validate(self) -> None:
        for k, t in self.maps.items():
            want_in = tuple(self.carrier[j] for j in consumed(k, self.dual))
            want_out = tuple(self.carrier[j] for j in emitted(k, self.dual))
            if t.in_sizes != want_in or t.out_sizes != want_out:
                raise CarrierError(
                    f"map {k} has sizes {t.in_sizes}->{t.out_sizes}, expected {want_in}->{want_out}")
        want_maps = {Label.hat(self.n, i) for i in range(1, self.n + 1)}
        if set(self.maps) != want_maps:
            raise CarrierError("system must provide exactly one map per (N-1)-subset")

    @classmethod
    def uniform(cls, n: int, dual: bool, t: FiniteMap) -> "LabeledSystem":
        from .combinat import subsets
        carrier = {j: t.q for j in subsets(n, n - 2)}
        sm = SortedMap.from_finite(t)
        maps = {k: sm for k in subsets(n, n - 1)}
        return cls(n, dual, carrier, maps)


@dataclass(frozen=True)
class PointMap:
    """A map on tuples of exact rationals with a per-tuple domain predicate."""

    k_in: int
    k_out: int
    rule: Callable[..., tuple]
    domain: Callable[[Fraction], bool] = field(default=lambda x: True)
    name: str = ""

    def in_domain(self, values: Sequence[Fraction]) -> bool:
        return all(self.domain(v) for v in values)

    def __call__(self, *args) -> tuple[Fraction, ...]:
        args = tuple(Fraction(a) for a in args)
        if len(args) != self.k_in:
            raise ArityError(f"{self.name or 'map'} takes {self.k_in} arguments")
        if not self.in_domain(args):
            raise DomainError(f"argument {args} outside the domain", args)
        out = tuple(Fraction(v) for v in self.rule(*args))
        if len(out) != self.k_out or not self.in_domain(out):
            raise DomainError(f"value {out} at {args} outside the domain", out)
        return out


def _check_arity(p: Program, k_in: int, k_out: int) -> None:
    if (k_in, k_out) != map_arity(p.n, p.dual):
        raise ArityError(f"map arity ({k_in},{k_out}) does not fit the "
                         f"{'dual ' if p.dual else ''}{p.n}-gon, which needs {map_arity(p.n, p.dual)}")


def compose_tuple(t: Callable[..., tuple], pos: int, state: tuple, k_in: int) -> tuple:
    """Apply ``t`` to slots ``pos .. pos+k_in-1`` (1-based) of ``state``."""
    i = pos - 1
    if i < 0 or i + k_in > len(state):
        raise IndexError(f"apply at position {pos} runs past a state of length {len(state)}")
    return state[:i] + tuple(t(*state[i:i + k_in])) + state[i + k_in:]


def _swap(state: tuple, pos: int) -> tuple:
    i = pos - 1
    if i < 0 or i + 1 >= len(state):
        raise IndexError(f"swap position {pos} out of range for length {len(state)}")
    return state[:i] + (state[i + 1], state[i]) + state[i + 2:]


def run(p: Program, apply: Callable[[Apply, tuple], tuple], state: tuple, k_in: int) -> tuple:
    for s in p.steps:
        if isinstance(s, Swap):
            state = _swap(state, s.pos)
        else:
            state = compose_tuple(lambda *xs: apply(s, xs), s.pos, state, k_in)
    return state


def eval_single(p: Program, t: FiniteMap, inp: Sequence[int]) -> tuple[int, ...]:
    """Run a program with every Apply using the one map ``t``."""
    _check_arity(p, t.k_in, t.k_out)
    inp = tuple(inp)
    if len(inp) != len(p.inputs):
        raise ArityError(f"program takes {len(p.inputs)} inputs, got {len(inp)}")
    if any(not 0 <= v < t.q for v in inp):
        raise CarrierError(f"input {inp} leaves the carrier")
    return run(p, lambda s, xs: t(*xs), inp, t.k_in)


def eval_labeled(p: Program, system: LabeledSystem, inp: Sequence[int]) -> tuple[int, ...]:
    """Run a labeled program, each Apply using the map of its index."""
    if any(s.k is None for s in p.applies()):
        raise ValueError("labeled evaluation needs a program with map indices")
    inp = tuple(inp)
    for v, j in zip(inp, p.inputs):
        if not 0 <= v < system.carrier[j]:
            raise CarrierError(f"value {v} outside carrier of slot {j}")
    if len(inp) != len(p.inputs):
        raise ArityError(f"program takes {len(p.inputs)} inputs, got {len(inp)}")
    k_in = map_arity(p.n, p.dual)[0]
    return run(p, lambda s, xs: system.maps[s.k](*xs), inp, k_in)


def eval_point(p: Program, t: PointMap, inp: Sequence) -> tuple[Fraction, ...]:
    """Exact-rational execution; domain violations name the offending tuple."""
    _check_arity(p, t.k_in, t.k_out)
    state = tuple(Fraction(v) for v in inp)
    if len(state) != len(p.inputs):
        raise ArityError(f"program takes {len(p.inputs)} inputs, got {len(state)}")
    if not t.in_domain(state):
        raise DomainError(f"input {state} outside the domain", state)
    return run(p, lambda s, xs: t(*xs), state, t.k_in)


def random_map(q: int, k_in: int, k_out: int, seed: int) -> FiniteMap:
    if q < 1:
        raise ValueError("q must be at least 1")
    rng = np.random.default_rng(seed)
    arr = rng.integers(0, q, size=(q ** k_in, k_out))
    return FiniteMap(q, k_in, k_out, tuple(map(tuple, arr.tolist())))


def random_tables(q: int, k_in: int, k_out: int, count: int, seed: int) -> np.ndarray:
    """``count`` random tables as an array of shape (count, q**k_in, k_out)."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, q, size=(count, q ** k_in, k_out), dtype=np.int64)


def all_tables(q: int, k_in: int, k_out: int) -> np.ndarray:
    """Every table, ordered by the big-endian code of its rows."""
    rows, opts = q ** k_in, q ** k_out
    total = opts ** rows
    codes = np.arange(total, dtype=np.int64)
    out = np.empty((total, rows, k_out), dtype=np.int64)
    for r in range(rows - 1, -1, -1):
        codes, cell = np.divmod(codes, opts)
        for c in range(k_out - 1, -1, -1):
            cell, out[:, r, c] = np.divmod(cell, q)
    return out


def all_inputs(sizes: Sequence[int]) -> np.ndarray:
    """Every input tuple in lexicographic order, shape (count, len(sizes))."""
    if not sizes:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(tuple(sizes)).reshape(len(sizes), -1)
    return grids.T.astype(np.int64)


def run_batch(p: Program, tables: np.ndarray, q: int, inputs: np.ndarray) -> np.ndarray:
    """Evaluate a single-map program for many maps on many inputs at once.

    ``tables`` has shape (M, q**k_in, k_out) and ``inputs`` shape (I, L); the
    result has shape (M, I, len(p.outputs)).
    """
    m = tables.shape[0]
    k_in, k_out = map_arity(p.n, p.dual)
    if tables.shape[1:] != (q ** k_in, k_out):
        raise ArityError(f"tables of shape {tables.shape[1:]} do not fit the program")
    cols = [np.broadcast_to(inputs[:, j], (m, inputs.shape[0])) for j in range(inputs.shape[1])]
    weights = [q ** (k_in - 1 - j) for j in range(k_in)]
    for s in p.steps:
        i = s.pos - 1
        if isinstance(s, Swap):
            cols[i], cols[i + 1] = cols[i + 1], cols[i]
            continue
        idx = np.zeros(cols[0].shape if cols else (m, inputs.shape[0]), dtype=np.int64)
        for j in range(k_in):
            idx = idx + cols[i + j] * weights[j]
        out = np.take_along_axis(tables, idx[:, :, None], axis=1) if k_out else None
        new = [out[:, :, c] for c in range(k_out)] if k_out else []
        cols[i:i + k_in] = new
    return np.stack(cols, axis=-1) if cols else np.zeros((m, inputs.shape[0], 0), dtype=np.int64)
