"""Unpacked operation identities for single-map (dual) 4..8-gon equations.

Each case splits the map into its component operations and states the
equation as a list of identities over a fixed number of carrier variables.
The identities are written once as plain functions of the operations, so the
same code runs on numpy arrays (batch oracle) and on scalar lookups that may
raise ``Blocked`` (incremental pruning in the search).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .engine import ArityError, FiniteMap, all_inputs
from .eqcompiler import map_arity

Identity = Callable[..., tuple]


@dataclass(frozen=True)
class ConditionSystem:
    n: int
    dual: bool
    op_names: tuple[str, ...]
    variables: tuple[str, ...]
    identities: tuple[Identity, ...]

    @property
    def arity(self) -> tuple[int, int]:
        return map_arity(self.n, self.dual)


# Every case returns one thunk per identity; shared subterms are thunks too, so
# evaluating one identity touches only the table rows it actually reads.

# pentagon, T(a,b) = (a*b, a.b)
def _pent(s, p, a, b, c):
    return [
        lambda: (s(s(a, b), s(p(a, b), c)), s(b, c)),
        lambda: (p(s(a, b), s(p(a, b), c)), s(a, p(b, c))),
        lambda: (p(p(a, b), c), p(a, p(b, c))),
    ]


# hexagon, T(a,b,c) = (<a,b,c>, [a,b,c])
def _hex(ang, sq, a, b, c, d, e, f):
    mid = lambda: ang(sq(a, b, d), c, e)
    bcd = lambda: sq(b, c, ang(d, e, f))
    return [
        lambda: (ang(ang(a, b, d), mid(), f), ang(b, c, ang(d, e, f))),
        lambda: (sq(ang(a, b, d), mid(), f), ang(a, bcd(), sq(d, e, f))),
        lambda: (sq(sq(a, b, d), c, e), sq(a, bcd(), sq(d, e, f))),
    ]


# heptagon identities beyond the hexagon ones, T = ({}, <>, [])
def _hept_extra(br, ang, sq, a, b, c, d, e, f):
    xyz = lambda: (br(a, b, d), br(sq(a, b, d), c, e),
                   br(ang(a, b, d), ang(sq(a, b, d), c, e), f))
    return [
        lambda: (br(*xyz()), br(d, e, f)),
        lambda: (ang(*xyz()), br(b, c, ang(d, e, f))),
        lambda: (sq(*xyz()), br(a, sq(b, c, ang(d, e, f)), sq(d, e, f))),
    ]


def _hept(br, ang, sq, a, b, c, d, e, f):
    return _hex(ang, sq, a, b, c, d, e, f) + _hept_extra(br, ang, sq, a, b, c, d, e, f)


# octagon, three quaternary operations ({}, <>, []) on a,b,c,d,e,f,g,h,k,l
def _oct(br, ang, sq, a, b, c, d, e, f, g, h, k, l):
    mid = lambda: (ang(a, b, d, g), ang(sq(a, b, d, g), c, e, h), f, k)
    xyzl = lambda: (br(a, b, d, g), br(sq(a, b, d, g), c, e, h), br(*mid()), l)
    defg = lambda: (d, e, f, br(g, h, k, l))
    bc = lambda: sq(b, c, ang(*defg()), ang(g, h, k, l))
    return [
        lambda: (br(*xyzl()), br(*defg())),
        lambda: (ang(*xyzl()), br(b, c, ang(*defg()), ang(g, h, k, l))),
        lambda: (sq(*xyzl()), br(a, bc(), sq(*defg()), sq(g, h, k, l))),
        # the last argument here is <g,h,k,l>; the bracketed form fails on true solutions
        lambda: (ang(*mid()), ang(b, c, ang(*defg()), ang(g, h, k, l))),
        lambda: (sq(*mid()), ang(a, bc(), sq(*defg()), sq(g, h, k, l))),
        lambda: (sq(a, bc(), sq(*defg()), sq(g, h, k, l)), sq(sq(a, b, d, g), c, e, h)),
    ]


# dual tetragon, T(a) = (t1(a), t2(a))
def _dual4(t1, t2, a):
    return [
        lambda: (t1(t1(a)), t1(a)),
        lambda: (t2(t2(a)), t2(a)),
        lambda: (t1(t2(a)), t2(t1(a))),
    ]


# dual pentagon, T(a,b) = (a.b, a*b)
def _dual5(p, s, a, b, c):
    return [
        lambda: (p(a, p(b, c)), p(p(a, b), c)),
        lambda: (p(s(a, p(b, c)), s(b, c)), s(p(a, b), c)),
        lambda: (s(s(a, p(b, c)), s(b, c)), s(a, b)),
    ]


# dual hexagon, T(a,b) = (a*b, a.b, a<>b)
def _dual6(s, p, dm, a, b, c):
    left = lambda: dm(a, p(b, c))
    return _pent(s, p, a, b, c) + [
        lambda: (s(left(), dm(b, c)), dm(s(a, b), s(p(a, b), c))),
        lambda: (p(left(), dm(b, c)), dm(p(a, b), c)),
        lambda: (dm(left(), dm(b, c)), dm(a, b)),
    ]


# dual heptagon, T = ({}, <>, [])
def _dual7(br, ang, sq, a, b, c, d, e, f):
    bcd_a = lambda: ang(b, c, br(d, e, f))
    uvw = lambda: (sq(a, bcd_a(), ang(d, e, f)), sq(b, c, br(d, e, f)), sq(d, e, f))
    rhs_args = lambda: (br(a, b, d), br(ang(a, b, d), c, e), f)
    return [
        lambda: (br(b, c, br(d, e, f)), br(*rhs_args())),
        lambda: (br(a, bcd_a(), ang(d, e, f)), ang(*rhs_args())),
        lambda: (ang(a, bcd_a(), ang(d, e, f)), ang(ang(a, b, d), c, e)),
        lambda: (br(*uvw()), sq(*rhs_args())),
        lambda: (ang(*uvw()), sq(ang(a, b, d), c, e)),
        lambda: (sq(*uvw()), sq(a, b, d)),
    ]


# dual octagon, T = ({}, <>, [], ||)
def _dual8(br, ang, sq, bar, a, b, c, d, e, f):
    uvw = lambda: (bar(a, sq(b, c, ang(d, e, f)), sq(d, e, f)), bar(b, c, ang(d, e, f)), bar(d, e, f))
    mid = lambda: ang(sq(a, b, d), c, e)
    return _hept(br, ang, sq, a, b, c, d, e, f) + [
        lambda: (br(*uvw()), bar(br(a, b, d), br(sq(a, b, d), c, e), br(ang(a, b, d), mid(), f))),
        lambda: (ang(*uvw()), bar(ang(a, b, d), mid(), f)),
        lambda: (sq(*uvw()), bar(sq(a, b, d), c, e)),
        lambda: (bar(*uvw()), bar(a, b, d)),
    ]


def _assoc(p, a, b, c):
    return [lambda: (p(p(a, b), c), p(a, p(b, c)))]


def _split(fn, count):
    # one callable per identity, so the search can evaluate them separately
    return tuple((lambda i: lambda *args: fn(*args)[i]())(i) for i in range(count))


_ABC = ("a", "b", "c")
_A_F = ("a", "b", "c", "d", "e", "f")

SYSTEMS: dict[tuple[int, bool], ConditionSystem] = {
    (4, False): ConditionSystem(4, False, ("dot",), _ABC, _split(_assoc, 1)),
    (5, False): ConditionSystem(5, False, ("star", "dot"), _ABC, _split(_pent, 3)),
    (6, False): ConditionSystem(6, False, ("angle", "square"), _A_F, _split(_hex, 3)),
    (7, False): ConditionSystem(7, False, ("brace", "angle", "square"), _A_F, _split(_hept, 6)),
    (8, False): ConditionSystem(8, False, ("brace", "angle", "square"),
                                ("a", "b", "c", "d", "e", "f", "g", "h", "k", "l"), _split(_oct, 6)),
    (4, True): ConditionSystem(4, True, ("first", "second"), ("a",), _split(_dual4, 3)),
    (5, True): ConditionSystem(5, True, ("dot", "star"), _ABC, _split(_dual5, 3)),
    (6, True): ConditionSystem(6, True, ("star", "dot", "diamond"), _ABC, _split(_dual6, 6)),
    (7, True): ConditionSystem(7, True, ("brace", "angle", "square"), _A_F, _split(_dual7, 6)),
    (8, True): ConditionSystem(8, True, ("brace", "angle", "square", "bar"), _A_F, _split(_dual8, 10)),
}


def system(n: int, dual: bool) -> ConditionSystem:
    try:
        return SYSTEMS[(n, dual)]
    except KeyError:
        raise ValueError(f"no condition system for {'dual ' if dual else ''}N={n}; only 4..8") from None


def ops_of(t: FiniteMap, n: int, dual: bool) -> dict[str, Callable[..., int]]:
    """Named scalar component operations of ``t`` for the (dual) N-gon."""
    sysm = system(n, dual)
    if sysm.arity != (t.k_in, t.k_out):
        raise ArityError(f"map arity ({t.k_in},{t.k_out}) does not fit {'dual ' if dual else ''}N={n}")
    return {name: (lambda i: lambda *args: t(*args)[i])(i) for i, name in enumerate(sysm.op_names)}


def _array_ops(tables: np.ndarray, q: int, k_in: int, k_out: int) -> list[Callable]:
    m = tables.shape[0]
    weights = [q ** (k_in - 1 - j) for j in range(k_in)]

    def make(i: int):
        col = tables[:, :, i]

        def op(*args):
            idx = args[0] * weights[0]
            for w, x in zip(weights[1:], args[1:]):
                idx = idx + x * w
            idx = np.broadcast_to(idx, (m, idx.shape[-1]))
            return np.take_along_axis(col, idx, axis=1)
        return op

    return [make(i) for i in range(k_out)]


def check_many(n: int, dual: bool, tables: np.ndarray, q: int, chunk: int = 1 << 16) -> np.ndarray:
    """Boolean array: which of the (M, q**k_in, k_out) tables satisfy every identity.

    All variable tuples are checked; they are processed in chunks to bound memory.
    """
    sysm = system(n, dual)
    k_in, k_out = sysm.arity
    if tables.shape[1:] != (q ** k_in, k_out):
        raise ArityError(f"tables of shape {tables.shape[1:]} do not fit arity {(k_in, k_out)}")
    ops = _array_ops(tables, q, k_in, k_out)
    ok = np.ones(tables.shape[0], dtype=bool)
    tuples = all_inputs([q] * len(sysm.variables))
    step = max(1, chunk // max(1, tables.shape[0]))
    for start in range(0, len(tuples), step):
        part = tuples[start:start + step]
        vars_ = [part[None, :, j] for j in range(part.shape[1])]
        for ident in sysm.identities:
            lhs, rhs = ident(*ops, *vars_)
            ok &= np.all(np.broadcast_to(lhs == rhs, (tables.shape[0], part.shape[0])), axis=1)
        if not ok.any():
            break
    return ok


def check(n: int, dual: bool, t: FiniteMap) -> bool:
    """True iff ``t`` satisfies the full identity system of the (dual) N-gon."""
    if (t.k_in, t.k_out) != map_arity(n, dual):
        raise ArityError(f"map arity ({t.k_in},{t.k_out}) does not fit {'dual ' if dual else ''}N={n}")
    system(n, dual)
    return bool(check_many(n, dual, t.array[None], t.q)[0])


def scalar_identities(n: int, dual: bool, lookup: Callable[[int, Sequence[int]], int]):
    """Identities bound to a scalar ``lookup(component, args)``; for the search."""
    sysm = system(n, dual)
    k_out = sysm.arity[1]
    ops = [(lambda i: lambda *args: lookup(i, args))(i) for i in range(k_out)]
    return sysm, [(lambda f: lambda *vs: f(*ops, *vs))(f) for f in sysm.identities]
