"""Exhaustive search for single-map solutions over a small carrier.

Rows of the table are assigned in ascending row order.  Every condition
instance (one identity at one tuple of carrier values, or one pipeline input
for N without an identity system) is evaluated as soon as it can be: an
evaluation that needs an unassigned row raises ``Blocked`` and the instance
waits on that row's watch list until the row gets a value.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional, Sequence

from .conditions import SYSTEMS, scalar_identities
from .engine import FiniteMap, decode, encode, run
from .eqcompiler import map_arity
from .verifier import check_single, single_programs

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 9
FILTERS = ("surjective", "involutive-after-P")  # plus degenerate-<i>


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget: int):
        super().__init__(f"search space of {estimate} tables exceeds the budget of {budget}")
        self.estimate = estimate
        self.budget = budget


class Blocked(Exception):
    __slots__ = ("row",)

    def __init__(self, row: int):
        self.row = row


@dataclass(frozen=True)
class SearchSpec:
    n: int
    dual: bool
    q: int
    limit: Optional[int] = None
    mode: str = "collect"
    filters: tuple[str, ...] = ()
    budget: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if self.q < 1 or self.n < 3:
            raise ValueError("need q >= 1 and N >= 3")
        if self.mode not in ("count", "collect"):
            raise ValueError(f"unknown mode {self.mode!r}")
        k_in = map_arity(self.n, self.dual)[0]
        for f in self.filters:
            if f in FILTERS:
                continue
            i = degenerate_arg(f)
            if i is None or not 1 <= i <= k_in:
                raise ValueError(f"unknown filter {f!r}; use degenerate-<1..{k_in}> or one of {FILTERS}")

    def to_json(self) -> dict:
        return {"n": self.n, "dual": self.dual, "q": self.q, "limit": self.limit,
                "mode": self.mode, "filters": list(self.filters), "budget": self.budget}


@dataclass
class SolutionSet:
    spec: SearchSpec
    solutions: list[FiniteMap] = field(default_factory=list)
    count: int = 0
    elapsed: float = 0.0
    nodes_visited: int = 0
    complete: bool = True

    def to_json(self, timing: bool = True) -> dict:
        # wall time is the one field that differs between identical runs
        out = {
            "spec": self.spec.to_json(),
            "count": self.count,
            "complete": self.complete,
            "nodes_visited": self.nodes_visited,
            "elapsed": round(self.elapsed, 3),
            "solutions": [t.to_json() for t in self.solutions],
        }
        if not timing:
            del out["elapsed"]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SolutionSet":
        s = data["spec"]
        spec = SearchSpec(s["n"], s["dual"], s["q"], s.get("limit"), s.get("mode", "collect"),
                          tuple(s.get("filters", ())), s.get("budget", DEFAULT_BUDGET))
        return cls(spec, [FiniteMap.from_json(t) for t in data["solutions"]], data["count"],
                   data.get("elapsed", 0.0), data.get("nodes_visited", 0), data.get("complete", True))


def degenerate_arg(name: str) -> Optional[int]:
    if name.startswith("degenerate-"):
        try:
            return int(name.split("-", 1)[1])
        except ValueError:
            return None
    return None


def is_degenerate_in(t: FiniteMap, i: int) -> bool:
    """True iff the table does not depend on argument ``i`` (1-based)."""
    for args in product(range(t.q), repeat=t.k_in):
        base = args[:i - 1] + (0,) + args[i:]
        if t(*args) != t(*base):
            return False
    return True


def is_surjective(t: FiniteMap) -> bool:
    return len(set(t.table)) == t.q ** t.k_out


def is_involutive_after_reversal(t: FiniteMap) -> bool:
    """``x -> T(reversed x)`` is an involution (for two arguments: T P squares to 1)."""
    if t.k_in != t.k_out:
        return False
    r = lambda x: t(*reversed(x))
    return all(r(r(x)) == x for x in product(range(t.q), repeat=t.k_in))


def _post_filters(spec: SearchSpec) -> list[Callable[[FiniteMap], bool]]:
    out = []
    if "surjective" in spec.filters:
        out.append(is_surjective)
    if "involutive-after-P" in spec.filters:
        out.append(is_involutive_after_reversal)
    return out


def _tied_rows(spec: SearchSpec) -> dict[int, int]:
    """Rows whose value is forced equal to a smaller row by degeneracy filters."""
    k_in = map_arity(spec.n, spec.dual)[0]
    args_of = [decode(r, spec.q, k_in) for r in range(spec.q ** k_in)]
    degs = sorted({degenerate_arg(f) for f in spec.filters if degenerate_arg(f)})
    tied = {}
    for r, args in enumerate(args_of):
        base = list(args)
        for i in degs:
            base[i - 1] = 0
        b = encode(base, spec.q)
        if b != r:
            tied[r] = b
    return tied


def estimate(spec: SearchSpec) -> int:
    k_in, k_out = map_arity(spec.n, spec.dual)
    free = spec.q ** k_in - len(_tied_rows(spec))
    return (spec.q ** k_out) ** free


def _instances(spec: SearchSpec, table: list) -> list[Callable[[], bool]]:
    q = spec.q
    k_in, k_out = map_arity(spec.n, spec.dual)

    if (spec.n, spec.dual) in SYSTEMS:
        def lookup(i, args):
            r = 0
            for a in args:
                r = r * q + a
            v = table[r]
            if v is None:
                raise Blocked(r)
            return v[i]

        sysm, idents = scalar_identities(spec.n, spec.dual, lookup)
        out = []
        for vs in product(range(q), repeat=len(sysm.variables)):
            for f in idents:
                out.append((lambda f, vs: lambda: _eq(f(*vs)))(f, vs))
        return out

    # no identity system: compare both compiled sides per input tuple
    lhs, rhs = single_programs(spec.n, spec.dual)

    def apply(_step, xs):
        r = 0
        for a in xs:
            r = r * q + a
        v = table[r]
        if v is None:
            raise Blocked(r)
        return v

    return [(lambda x: lambda: run(lhs, apply, x, k_in) == run(rhs, apply, x, k_in))(x)
            for x in product(range(q), repeat=len(lhs.inputs))]


def _eq(pair) -> bool:
    return pair[0] == pair[1]


class _Stop(Exception):
    pass


def _dfs(spec: SearchSpec, first_values: Optional[Sequence[int]] = None) -> SolutionSet:
    start = time.perf_counter()
    q = spec.q
    k_in, k_out = map_arity(spec.n, spec.dual)
    rows = q ** k_in
    values = [decode(v, q, k_out) for v in range(q ** k_out)]
    tied = _tied_rows(spec)
    table: list = [None] * rows
    watches: list[list] = [[] for _ in range(rows + 1)]
    post = _post_filters(spec)
    result = SolutionSet(spec)

    def place(inst) -> bool:
        """Evaluate; False on violation, otherwise queue it if blocked."""
        try:
            return inst()
        except Blocked as b:
            watches[b.row].append(inst)
            return True

    for inst in _instances(spec, table):
        if not place(inst):
            result.elapsed = time.perf_counter() - start
            return result
    if rows == 0:  # k_in == 0 cannot occur for N >= 3
        return result

    def emit() -> None:
        t = FiniteMap(q, k_in, k_out, tuple(table))
        if all(f(t) for f in post):
            result.count += 1
            if spec.mode == "collect":
                result.solutions.append(t)
            if spec.limit is not None and result.count >= spec.limit:
                result.complete = False
                raise _Stop

    def descend(r: int) -> None:
        if r == rows:
            emit()
            return
        choices = [table[tied[r]]] if r in tied else values
        if r == 0 and first_values is not None:
            choices = [values[v] for v in first_values]
        pending = watches[r]
        for v in choices:
            result.nodes_visited += 1
            table[r] = v
            marks = [len(w) for w in watches]
            ok = True
            for inst in list(pending):
                if not place(inst):
                    ok = False
                    break
            if ok:
                descend(r + 1)
            for w, m in zip(watches, marks):
                del w[m:]
            table[r] = None

    try:
        descend(0)
    except _Stop:
        pass
    result.elapsed = time.perf_counter() - start
    return result


def enumerate_solutions(spec: SearchSpec, jobs: int = 1, verify: bool = True) -> SolutionSet:
    """All tables solving the equation, in ascending table order.

    Raises ``BudgetExceeded`` before doing any work when the space is too big.
    """
    est = estimate(spec)
    if est > spec.budget:
        raise BudgetExceeded(est, spec.budget)
    log.info("searching %s N=%d q=%d, %d candidate tables", "dual" if spec.dual else "non-dual",
             spec.n, spec.q, est)
    if jobs <= 1 or spec.limit is not None:
        result = _dfs(spec)
    else:
        k_out = map_arity(spec.n, spec.dual)[1]
        branches = [[v] for v in range(spec.q ** k_out)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_dfs, [spec] * len(branches), branches))
        result = SolutionSet(spec)
        for p in parts:
            result.solutions.extend(p.solutions)
            result.count += p.count
            result.nodes_visited += p.nodes_visited
            result.elapsed = max(result.elapsed, p.elapsed)
        result.solutions.sort(key=lambda t: t.key())
    if verify:
        for t in result.solutions:
            v = check_single(spec.n, spec.dual, t)
            if not v.holds:
                raise AssertionError(f"search emitted a non-solution {t.table}: {v.to_json()}")
    return result


def naive_count(n: int, dual: bool, q: int, chunk: int = 1 << 12) -> int:
    """Count solutions by checking every table with the batch pipeline (oracle)."""
    import numpy as np

    from .engine import all_tables
    from .verifier import check_many

    k_in, k_out = map_arity(n, dual)
    rows, opts = q ** k_in, q ** k_out
    total = opts ** rows
    count = 0
    for s in range(0, total, chunk):
        codes = np.arange(s, min(total, s + chunk), dtype=np.int64)
        tabs = np.empty((len(codes), rows, k_out), dtype=np.int64)
        for r in range(rows - 1, -1, -1):
            codes, cell = np.divmod(codes, opts)
            for c in range(k_out - 1, -1, -1):
                cell, tabs[:, r, c] = np.divmod(cell, q)
        count += int(check_many(n, dual, tabs, q).sum())
    return count


def count_pentagon_like(q: int, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> dict[str, int]:
    """Solution counts for N = 5, 6, 7, plain and dual."""
    out = {}
    for n in (5, 6, 7):
        for dual in (False, True):
            spec = SearchSpec(n, dual, q, mode="count", budget=budget)
            out[f"{'dual-' if dual else ''}{n}"] = enumerate_solutions(spec, jobs=jobs, verify=False).count
    return out
