"""Decide whether a map solves a (dual) N-gon equation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .combinat import red_alpha, red_omega
from .engine import (
    ArityError,
    FiniteMap,
    LabeledSystem,
    PointMap,
    all_inputs,
    eval_labeled,
    eval_point,
    eval_single,
    run_batch,
)
from .eqcompiler import Apply, Program, Swap, compile_pair, map_arity, specialize_single


@dataclass(frozen=True)
class Counterexample:
    input: tuple
    lhs: tuple
    rhs: tuple

    def to_json(self) -> dict:
        conv = lambda t: [str(v) if isinstance(v, Fraction) else int(v) for v in t]
        return {"input": conv(self.input), "lhs": conv(self.lhs), "rhs": conv(self.rhs)}


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: Optional[Counterexample]
    inputs_checked: int

    def __post_init__(self) -> None:
        if self.holds != (self.counterexample is None):
            raise ValueError("a verdict has a counterexample exactly when it fails")

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "counterexample": self.counterexample.to_json() if self.counterexample else None,
            "inputs_checked": self.inputs_checked,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Verdict":
        cx = data.get("counterexample")
        if cx is not None:
            cx = Counterexample(tuple(cx["input"]), tuple(cx["lhs"]), tuple(cx["rhs"]))
        return cls(bool(data["holds"]), cx, int(data["inputs_checked"]))


@lru_cache(maxsize=None)
def single_programs(n: int, dual: bool) -> tuple[Program, Program]:
    lhs, rhs = compile_pair(n, dual)
    return specialize_single(lhs), specialize_single(rhs)


def _check_arity(n: int, dual: bool, k_in: int, k_out: int) -> None:
    if (k_in, k_out) != map_arity(n, dual):
        raise ArityError(f"map arity ({k_in},{k_out}) does not fit the "
                         f"{'dual ' if dual else ''}{n}-gon, which needs {map_arity(n, dual)}")


def _first_mismatch(lhs: Program, rhs: Program, t: FiniteMap, chunk: int = 1 << 14) -> Verdict:
    ins = all_inputs([t.q] * len(lhs.inputs))
    tab = t.array[None]
    for start in range(0, len(ins), chunk):
        part = ins[start:start + chunk]
        a = run_batch(lhs, tab, t.q, part)[0]
        b = run_batch(rhs, tab, t.q, part)[0]
        bad = np.flatnonzero(np.any(a != b, axis=1))
        if bad.size:
            i = int(bad[0])
            cx = Counterexample(tuple(int(v) for v in part[i]), tuple(int(v) for v in a[i]),
                                tuple(int(v) for v in b[i]))
            return Verdict(False, cx, start + i + 1)
    return Verdict(True, None, len(ins))


def check_single(n: int, dual: bool, t: FiniteMap) -> Verdict:
    """Exhaustive check over all inputs, in lexicographic order."""
    _check_arity(n, dual, t.k_in, t.k_out)
    lhs, rhs = single_programs(n, dual)
    return _first_mismatch(lhs, rhs, t)


def check_samples(n: int, dual: bool, t: FiniteMap, samples: Sequence[Sequence[int]]) -> Verdict:
    """Check only the given inputs (an explicit, non-exhaustive choice by the caller)."""
    _check_arity(n, dual, t.k_in, t.k_out)
    lhs, rhs = single_programs(n, dual)
    count = 0
    for x in samples:
        x = tuple(int(v) for v in x)
        count += 1
        a, b = eval_single(lhs, t, x), eval_single(rhs, t, x)
        if a != b:
            return Verdict(False, Counterexample(x, a, b), count)
    return Verdict(True, None, count)


def check_programs(lhs: Program, rhs: Program, t: FiniteMap) -> Verdict:
    """Exhaustive comparison of two single-map programs."""
    return _first_mismatch(lhs, rhs, t)


def check_many(n: int, dual: bool, tables: np.ndarray, q: int, chunk: int = 1 << 18) -> np.ndarray:
    """Boolean mask of the tables (shape (M, rows, k_out)) that solve the equation."""
    _check_arity(n, dual, *map_arity(n, dual))
    lhs, rhs = single_programs(n, dual)
    return programs_agree_many(lhs, rhs, tables, q, chunk)


def programs_agree_many(lhs: Program, rhs: Program, tables: np.ndarray, q: int,
                        chunk: int = 1 << 18) -> np.ndarray:
    ins = all_inputs([q] * len(lhs.inputs))
    per = max(1, chunk // len(ins))
    out = np.empty(len(tables), dtype=bool)
    for s in range(0, len(tables), per):
        part = tables[s:s + per]
        a = run_batch(lhs, part, q, ins)
        b = run_batch(rhs, part, q, ins)
        out[s:s + per] = np.all(a == b, axis=(1, 2))
    return out


def check_labeled(n: int, dual: bool, system: LabeledSystem) -> Verdict:
    """Exhaustive check of a multi-sorted system over the product of slot carriers."""
    if system.n != n or system.dual != dual:
        raise ValueError("system does not belong to this equation")
    system.validate()
    lhs, rhs = compile_pair(n, dual)
    count = 0
    for x in product(*(range(system.carrier[j]) for j in lhs.inputs)):
        count += 1
        a, b = eval_labeled(lhs, system, x), eval_labeled(rhs, system, x)
        if a != b:
            return Verdict(False, Counterexample(x, a, b), count)
    return Verdict(True, None, count)


def check_point(n: int, dual: bool, t: PointMap, samples: Sequence[Sequence]) -> Verdict:
    """Exact comparison of both sides on each sample."""
    _check_arity(n, dual, t.k_in, t.k_out)
    lhs, rhs = single_programs(n, dual)
    count = 0
    for x in samples:
        x = tuple(Fraction(v) for v in x)
        count += 1
        a, b = eval_point(lhs, t, x), eval_point(rhs, t, x)
        if a != b:
            return Verdict(False, Counterexample(x, a, b), count)
    return Verdict(True, None, count)


@lru_cache(maxsize=None)
def kashaev_programs() -> tuple[Program, Program]:
    """Both sides of the dual hexagon in the Q = T~ P form, for a single T~.

    Read right to left: (QP)_1 Q_2 P_1 Q_2 and P_3 (QP)_4 Q_2 P_3 Q_1, where
    Q_i is a swap at i followed by T~ at i, and (QP)_i is T~ at i.
    """
    q_at = lambda i: (Swap(i), Apply(None, i, True))
    lhs = (*q_at(2), Swap(1), *q_at(2), Apply(None, 1, True))
    rhs = (*q_at(1), Swap(3), *q_at(2), Apply(None, 4, True), Swap(3))
    ins, outs = red_alpha(6), red_omega(6)
    return (Program(6, True, "lhs", lhs, ins, outs, single=True),
            Program(6, True, "rhs", rhs, ins, outs, single=True))


def check_kashaev_form(t: FiniteMap) -> bool:
    if (t.k_in, t.k_out) != (2, 3):
        raise ArityError(f"the Q-form needs a map of arity (2,3), got ({t.k_in},{t.k_out})")
    lhs, rhs = kashaev_programs()
    return _first_mismatch(lhs, rhs, t).holds


def replay(n: int, dual: bool, t: FiniteMap, verdict: Verdict) -> bool:
    """True iff the stored counterexample still shows a mismatch."""
    if verdict.counterexample is None:
        return False
    lhs, rhs = single_programs(n, dual)
    x = verdict.counterexample.input
    return eval_single(lhs, t, x) != eval_single(rhs, t, x)
