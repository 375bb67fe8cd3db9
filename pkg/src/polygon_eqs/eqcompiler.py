"""Compile (dual) N-gon equations into straight-line programs.

A program is a list of steps in *execution* order.  ``Swap(pos)`` exchanges
slots ``pos`` and ``pos + 1``; ``Apply(k, pos)`` feeds the slots starting at
``pos`` to the map indexed by ``k``.  Positions are 1-based throughout, as in
the position-index notation.  Rendering reverses the steps to obtain the usual
right-to-left composition.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Union

from .combinat import (
    Label,
    LabelSequence,
    blue_alpha,
    blue_omega,
    commutes,
    half_packets,
    red_alpha,
    red_omega,
)

HAT = "̂"
TILDE = "̃"


class RoutingError(RuntimeError):
    """Raised when a required slot arrangement cannot be reached by legal swaps."""

    def __init__(self, message: str, state: LabelSequence = ()):
        super().__init__(message + (f"; stuck at ({', '.join(map(str, state))})" if state else ""))
        self.state = tuple(state)


@dataclass(frozen=True)
class Swap:
    pos: int


@dataclass(frozen=True)
class Apply:
    k: Optional[Label]
    pos: int
    dual: bool = False


Step = Union[Swap, Apply]


@dataclass(frozen=True)
class Program:
    n: int
    dual: bool
    side: str
    steps: tuple[Step, ...]
    inputs: LabelSequence
    outputs: LabelSequence
    single: bool = field(default=False)

    def applies(self) -> list[Apply]:
        return [s for s in self.steps if isinstance(s, Apply)]

    def to_json(self) -> dict:
        steps = []
        for s in self.steps:
            if isinstance(s, Swap):
                steps.append({"swap": s.pos})
            else:
                k = list(s.k.elems) if s.k is not None else None
                steps.append({"apply": {"k": k, "pos": s.pos}})
        return {
            "n": self.n,
            "dual": self.dual,
            "side": self.side,
            "steps": steps,
            "inputs": [list(j.elems) for j in self.inputs],
            "outputs": [list(j.elems) for j in self.outputs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Program":
        n = int(data["n"])
        dual = bool(data["dual"])
        steps: list[Step] = []
        single = False
        for s in data["steps"]:
            if "swap" in s:
                steps.append(Swap(int(s["swap"])))
            else:
                a = s["apply"]
                k = None if a.get("k") is None else Label.of(n, a["k"])
                single = single or k is None
                steps.append(Apply(k, int(a["pos"]), dual))
        return cls(
            n=n,
            dual=dual,
            side=data["side"],
            steps=tuple(steps),
            inputs=tuple(Label.of(n, j) for j in data["inputs"]),
            outputs=tuple(Label.of(n, j) for j in data["outputs"]),
            single=single,
        )


def map_arity(n: int, dual: bool = False) -> tuple[int, int]:
    """(inputs, outputs) of the maps of the (dual) n-gon equation."""
    if n < 3:
        raise ValueError(f"N must be at least 3, got {n}")
    odd, even = n // 2, (n - 1) // 2  # ceil((n-1)/2), floor((n-1)/2)
    return (even, odd) if dual else (odd, even)


def consumed(k: Label, dual: bool) -> LabelSequence:
    """Slot labels a map reads, in the order it reads them."""
    odd, even = half_packets(k)
    return even if dual else odd


def emitted(k: Label, dual: bool) -> LabelSequence:
    """Slot labels a map writes, in the order it writes them (reverse lex)."""
    odd, even = half_packets(k)
    return tuple(reversed(odd if dual else even))


def _swap_into(state: list[Label], target: list[Label], lo: int, steps: list[Step]) -> None:
    """Bubble ``state`` into ``target`` with adjacent swaps, checking legality."""
    for i in range(lo, len(target)):
        j = state.index(target[i], i)
        while j > i:
            a, b = state[j - 1], state[j]
            if not commutes(a, b):
                raise RoutingError(f"illegal swap of {a} and {b}", tuple(state))
            state[j - 1], state[j] = b, a
            steps.append(Swap(j))  # swap of 0-based j-1, j is position j
            j -= 1


def route_window(state: list[Label], window: LabelSequence, steps: list[Step]) -> int:
    """Make ``window`` contiguous (in order) inside ``state``; return its 0-based start.

    Reachable arrangements are exactly the orderings that keep the relative
    order of every non-commuting pair, so the interval spanned by the window
    is split into labels that must precede it and labels that must follow.
    """
    try:
        pos = [state.index(w) for w in window]
    except ValueError:
        raise RoutingError(f"window ({', '.join(map(str, window))}) not present", tuple(state))
    if pos != sorted(pos):
        raise RoutingError(f"window ({', '.join(map(str, window))}) out of order", tuple(state))
    lo, hi = pos[0], pos[-1]
    span = state[lo:hi + 1]
    wset = set(window)
    m = len(span)
    before = [False] * m  # must precede some window label
    for i in range(m - 1, -1, -1):
        x = span[i]
        if x in wset:
            continue
        for y_i in range(i + 1, m):
            y = span[y_i]
            if not commutes(x, y) and (y in wset or before[y_i]):
                before[i] = True
                break
    after = [False] * m  # must follow some window label
    for i in range(m):
        x = span[i]
        if x in wset:
            continue
        for y_i in range(i):
            y = span[y_i]
            if not commutes(y, x) and (y in wset or after[y_i]):
                after[i] = True
                break
    left, right = [], []
    for i, x in enumerate(span):
        if x in wset:
            continue
        if before[i] and after[i]:
            raise RoutingError(f"label {x} is trapped inside window", tuple(state))
        (right if after[i] else left).append(x)
    target = state[:lo] + left + list(window) + right + state[hi + 1:]
    _swap_into(state, target, lo, steps)
    return lo + len(left)


def _build(n: int, dual: bool, side: str, order: list[Label],
           inputs: LabelSequence, outputs: LabelSequence) -> Program:
    state = list(inputs)
    steps: list[Step] = []
    for k in order:
        start = route_window(state, consumed(k, dual), steps)
        k_in = len(consumed(k, dual))
        steps.append(Apply(k, start + 1, dual))
        state[start:start + k_in] = emitted(k, dual)
    if sorted(state) != sorted(outputs):
        raise RoutingError("final slots differ from the expected output labels", tuple(state))
    _swap_into(state, list(outputs), 0, steps)
    return Program(n, dual, side, tuple(steps), tuple(inputs), tuple(outputs))


@lru_cache(maxsize=None)
def compile_gon(n: int) -> tuple[Program, Program]:
    """Both sides of the n-gon equation.

    The left side applies the maps of the odd half-packet of ``[n]`` in
    lexicographic order, the right side those of the even half in reverse
    lexicographic order.
    """
    if n < 3:
        raise ValueError(f"N must be at least 3, got {n}")
    odd, even = half_packets(Label(n, tuple(range(1, n + 1))))
    a, w = blue_alpha(n), blue_omega(n)
    lhs = _build(n, False, "lhs", list(odd), a, w)
    rhs = _build(n, False, "rhs", list(reversed(even)), a, w)
    return lhs, rhs


@lru_cache(maxsize=None)
def compile_dual_gon(n: int) -> tuple[Program, Program]:
    """Both sides of the dual n-gon equation.

    Sides follow the explicit low-N displays: the left side applies the odd
    half-packet of ``[n]`` in reverse lexicographic order, the right side the
    even half in lexicographic order.
    """
    if n < 3:
        raise ValueError(f"N must be at least 3, got {n}")
    odd, even = half_packets(Label(n, tuple(range(1, n + 1))))
    a, w = red_alpha(n), red_omega(n)
    lhs = _build(n, True, "lhs", list(reversed(odd)), a, w)
    rhs = _build(n, True, "rhs", list(even), a, w)
    return lhs, rhs


def compile_pair(n: int, dual: bool) -> tuple[Program, Program]:
    return compile_dual_gon(n) if dual else compile_gon(n)


def specialize_single(p: Program) -> Program:
    """Forget the map indices; every Apply then refers to the single map."""
    steps = tuple(Apply(None, s.pos, s.dual) if isinstance(s, Apply) else s for s in p.steps)
    return replace(p, steps=steps, single=True)


def simulate(p: Program, check: bool = True) -> LabelSequence:
    """Track slot labels through a labeled program, validating every step."""
    state = list(p.inputs)
    for s in p.steps:
        if isinstance(s, Swap):
            i = s.pos - 1
            if not 0 <= i < len(state) - 1:
                raise RoutingError(f"swap position {s.pos} out of range", tuple(state))
            if check and not commutes(state[i], state[i + 1]):
                raise RoutingError(f"illegal swap at {s.pos}", tuple(state))
            state[i], state[i + 1] = state[i + 1], state[i]
        else:
            if s.k is None:
                raise ValueError("cannot track labels through a single-map program")
            want = consumed(s.k, s.dual)
            i = s.pos - 1
            got = tuple(state[i:i + len(want)])
            if check and got != want:
                raise RoutingError(
                    f"apply {s.k} at {s.pos} expects ({', '.join(map(str, want))})", tuple(state))
            state[i:i + len(want)] = emitted(s.k, s.dual)
    return tuple(state)


# Position-index pipelines as displayed, written left to right in composition
# order (so execution runs right to left).  ``T^k@p`` is the map indexed by
# [N] minus {k} acting at position p; ``T[ijk]@p`` spells the index out;
# ``Pp`` is a transposition at positions p, p+1.
_REFERENCE: dict[tuple[int, bool], tuple[str, str]] = {
    (4, False): ("T[134]@1 T[123]@1", "T[124]@1 T[234]@2"),
    (5, False): ("T^1@1 T^3@2 T^5@1", "T^4@2 P1 T^2@2"),
    (6, False): ("T^2@1 P3 T^4@2 T^6@1 P3", "T^5@2 P1 T^3@2 T^1@4"),
    (7, False): ("T^1@1 T^3@3 P5 P2 T^5@3 T^7@1 P3",
                 "P3 T^6@4 P3 P2 P1 T^4@3 P2 P3 T^2@4"),
    (8, False): ("T^2@1 P4 P5 P6 T^4@3 P6 P5 P2 T^6@3 P6 T^8@1 P4 P5 P6 P3",
                 "P3 T^7@4 P3 P2 P1 T^5@3 P6 P2 P3 T^3@4 T^1@7"),
    (4, True): ("T[123]@2 T[134]@1", "T[234]@1 T[124]@1"),
    (5, True): ("T^5@2 T^3@1 T^1@2", "T^2@1 P2 T^4@1"),
    # printed with the two sides' indices interchanged; positions kept as printed
    (6, True): ("T^1@1 T^3@2 P3 T^5@1", "P3 T^6@4 T^4@2 P1 T^2@2"),
    (7, True): ("P3 T^7@4 T^5@2 P4 P1 T^3@2 T^1@4",
                "T^2@1 P3 P4 T^4@2 P5 P4 P3 T^6@1 P3"),
    (8, True): ("P4 P7 P5 P6 T^8@7 P3 T^6@4 P6 P3 P2 T^4@3 P1 P2 P3 T^2@4",
                "T^1@1 T^3@3 P5 P6 P2 T^5@3 P6 P5 P4 T^7@1 P3"),
}

# Which half-packet of [N] the printed left-hand side realizes.
_LEFT_HALF = {key: "odd" for key in _REFERENCE}
_LEFT_HALF[(6, True)] = "even"

_TOKEN = re.compile(r"^(?:P(\d+)|T\^(\d+)@(\d+)|T\[(\d+)\]@(\d+))$")


def _parse_display(n: int, dual: bool, text: str) -> tuple[Step, ...]:
    steps: list[Step] = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if m is None:
            raise ValueError(f"bad token {tok!r}")
        if m.group(1):
            steps.append(Swap(int(m.group(1))))
        elif m.group(2):
            steps.append(Apply(Label.hat(n, int(m.group(2))), int(m.group(3)), dual))
        else:
            steps.append(Apply(Label.of(n, map(int, m.group(4))), int(m.group(5)), dual))
    return tuple(reversed(steps))


def reference_program_labeled(n: int, dual: bool, side: str) -> Program:
    """The displayed pipeline with its combinatorial indices kept."""
    if (n, dual) not in _REFERENCE:
        raise ValueError(f"no reference pipeline for N={n} (4..8 only)")
    lhs, rhs = _REFERENCE[(n, dual)]
    text = {"lhs": lhs, "rhs": rhs}[side]
    a, w = (red_alpha(n), red_omega(n)) if dual else (blue_alpha(n), blue_omega(n))
    return Program(n, dual, side, _parse_display(n, dual, text), a, w)


def reference_program(n: int, dual: bool, side: str) -> Program:
    """The hand-transcribed single-map pipeline (golden oracle)."""
    return specialize_single(reference_program_labeled(n, dual, side))


def reference_half(n: int, dual: bool, side: str) -> str:
    """``"odd"`` or ``"even"``: which maps the printed side composes."""
    left = _LEFT_HALF[(n, dual)]
    return left if side == "lhs" else ("even" if left == "odd" else "odd")


def compiled_side_for_half(n: int, dual: bool, half: str) -> Program:
    """The compiled side composing the maps of the given half-packet of [N]."""
    lhs, rhs = compile_pair(n, dual)
    return lhs if half == "odd" else rhs


def _apply_text(s: Apply, n: int, single: bool) -> str:
    head = "T" + (TILDE if s.dual else "")
    if single or s.k is None:
        return f"{head}_{s.pos}"
    if n <= 4:
        idx = s.k.text()
    else:
        idx = f"{s.k.missing()[0]}{HAT}"
    return f"{head}_{{{idx},{s.pos}}}"


def render_text(p: Program) -> str:
    """Composition notation, rightmost factor applied first."""
    parts = []
    for s in reversed(p.steps):
        if isinstance(s, Swap):
            parts.append(f"P_{s.pos}")
        else:
            parts.append(_apply_text(s, p.n, p.single))
    return " ".join(parts) if parts else "id"


def render_equation(lhs: Program, rhs: Program) -> str:
    return f"{render_text(lhs)} = {render_text(rhs)}"


def programs_to_json(lhs: Program, rhs: Program) -> str:
    return json.dumps([lhs.to_json(), rhs.to_json()])
