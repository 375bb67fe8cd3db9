from functools import lru_cache

import numpy as np
import pytest

from oracles import exhaustive, tables_to_maps
from polygon_eqs import reductions as R
from polygon_eqs.catalog import idempotent_trigons, total_inversion, transposition
from polygon_eqs.combinat import subsets
from polygon_eqs.engine import ArityError, FiniteMap, LabeledSystem, SortedMap
from polygon_eqs.eqcompiler import map_arity
from polygon_eqs.search import SearchSpec, enumerate_solutions
from polygon_eqs.verifier import check_labeled, check_many, check_single

AND = FiniteMap.from_function(2, 2, 1, lambda a, b: a & b)


@lru_cache(maxsize=None)
def sols(n, dual):
    return tuple(enumerate_solutions(SearchSpec(n, dual, 2), verify=False).solutions)


def all_pass(n, dual, maps):
    if not maps:
        return True
    return bool(check_many(n, dual, np.stack([m.array for m in maps]), 2).all())


# projections

def test_cut_last_examples():
    dual_pent = FiniteMap.from_function(2, 2, 2, lambda a, b: (a & b, a))
    assert R.project_cut_last_codomain(dual_pent, 4) == AND
    one = FiniteMap(1, 3, 2, ((0, 0),))
    assert R.project_cut_last_codomain(FiniteMap(1, 2, 3, ((0, 0, 0),)), 5) == FiniteMap(1, 2, 2, ((0, 0),))
    with pytest.raises(ArityError):
        R.project_cut_last_codomain(one, 5)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_cut_last_on_populations(n):
    assert all_pass(n, False, [R.project_cut_last_codomain(t, n) for t in sols(n + 1, True)])


def test_cut_first_examples():
    pent = transposition(2)
    assert R.project_cut_first_codomain(pent, 4, False).table == ((0,), (0,), (1,), (1,))
    hexa = R.project_cut_first_codomain(total_inversion(2), 6, False)
    assert check_single(6, False, hexa).holds
    assert R.project_cut_first_codomain(FiniteMap(1, 2, 2, ((0, 0),)), 4, False).table == ((0,),)
    with pytest.raises(R.ParityError):
        R.project_cut_first_codomain(pent, 5, False)
    with pytest.raises(R.ParityError):
        R.project_cut_first_codomain(FiniteMap(1, 2, 3, ((0, 0, 0),)), 6, True)


@pytest.mark.parametrize("n,dual", [(4, False), (6, False), (3, True), (5, True)])
def test_cut_first_on_populations(n, dual):
    assert all_pass(n, dual, [R.project_cut_first_codomain(t, n, dual) for t in sols(n + 1, dual)])


def test_cut_first_pentagon_gives_associative_dot():
    for t in sols(5, False):
        assert check_single(4, False, R.project_cut_first_codomain(t, 4, False)).holds


# degenerate extensions

EXT_SOURCES = {
    "odd-to-even": [(3, False), (5, False), (7, False)],
    "dual-odd-to-even": [(3, True), (5, True), (7, True)],
    "dual-even-to-odd": [(4, True), (6, True)],
    "dual-even-to-dual-odd": [(4, True), (6, True)],
}


@pytest.mark.parametrize("kind", sorted(R.EXTENSIONS))
def test_extension_round_trip(kind):
    for n, dual in EXT_SOURCES[kind]:
        assert R.extension_source(kind, n + 1) == (n, dual)
        tn, tdual = R.extension_target(kind, map_arity(n, dual)[0])
        assert tn == n + 1
        ext = [R.extend_degenerate(t, kind, n + 1) for t in sols(n, dual)]
        assert all_pass(tn, tdual, ext)
        assert [R.restrict_degenerate(e, kind) for e in ext] == list(sols(n, dual))


def test_extension_examples():
    p = transposition(2)
    h = R.extend_degenerate(p, "7.4")
    assert all(h(a, b, c) == p(a, b) for a in range(2) for b in range(2) for c in range(2))
    d = R.extend_degenerate(p, "7.5")
    assert all(d(a, b, c) == p(b, c) for a in range(2) for b in range(2) for c in range(2))
    with pytest.raises(R.ParityError):
        R.extend_degenerate(p, "odd-to-even", 7)
    with pytest.raises(ArityError):
        R.extend_degenerate(AND, "odd-to-even")
    depends_on_c = FiniteMap.from_function(2, 3, 2, lambda a, b, c: (c, a))
    with pytest.raises(R.DegeneracyError):
        R.restrict_degenerate(depends_on_c, "7.4")
    with pytest.raises(ValueError):
        R.extend_degenerate(p, "7.9")


# degenerate solutions both ways at N=5/6 (pr_1 and pr_{N+1} cases)

@pytest.mark.parametrize("kind,src", [("odd-to-even", (5, False)), ("dual-odd-to-even", (5, True))])
def test_degenerate_maps_both_directions(kind, src):
    # every map ignoring the relevant argument: hexagon solution iff restriction solves the source
    sources = tables_to_maps(2, 2, exhaustive(*src))
    ext = [R.add_ignored_arg(t, R.EXTENSIONS[kind][3]) for t in sources]
    hexa = check_many(6, False, np.stack([e.array for e in ext]), 2)
    src_ok = check_many(*src, np.stack([t.array for t in sources]), 2)
    assert np.array_equal(hexa, src_ok)
    degenerate = [t for t in sols(6, False) if R.ignores(t, 2 if kind == "odd-to-even" else 0)]
    assert sorted(R.restrict_degenerate(t, kind).table for t in degenerate) == sorted(t.table for t in sols(*src))


# constructors

def _population(src):
    n, dual = src
    if n == 4 and not dual:
        return sols(4, False)
    return sols(n, dual)


@pytest.mark.parametrize("name", sorted(R.CONSTRUCTORS))
def test_constructors_on_populations(name):
    src, tgt, fn, const = R.CONSTRUCTORS[name]
    pop = _population(src)
    assert pop
    if not const:
        assert all_pass(*tgt, [fn(t) for t in pop])
        return
    for t in pop:
        for u in range(2):
            fixed = t(*([u] * t.k_in)) == tuple([u] * t.k_out)
            if fixed:
                assert check_single(*tgt, fn(t, u)).holds
            else:
                with pytest.raises(R.FixedPointError):
                    fn(t, u)
                # the converse: without the fixed point the target equation fails
                assert not check_single(*tgt, fn(t, u, check=False)).holds


def test_constructor_examples():
    ident = FiniteMap(2, 1, 1, ((0,), (1,)))
    c0 = FiniteMap(2, 1, 1, ((0,), (0,)))
    c1 = FiniteMap(2, 1, 1, ((1,), (1,)))
    assert check_single(4, True, R.dual_tetragon_from_pair(ident, c0)).holds
    with pytest.raises(R.NonCommutingError):
        R.dual_tetragon_from_pair(c0, c1)
    pent = R.construct("pentagon_from_tetragon_last", AND)
    assert pent == FiniteMap.from_function(2, 2, 2, lambda a, b: (b, a & b))
    assert check_single(5, False, pent).holds
    assert check_single(5, False, R.construct("pentagon_from_tetragon_const", AND, 1)).holds
    assert check_single(5, False, R.construct("pentagon_from_tetragon_const", AND, 0)).holds
    nor = FiniteMap.from_function(2, 2, 1, lambda a, b: 1 - (a | b))
    with pytest.raises(R.FixedPointError):
        R.construct("pentagon_from_tetragon_const", nor, 1)
    with pytest.raises(ArityError):
        R.construct("dual_hexagon_from_pentagon", AND)
    with pytest.raises(ValueError):
        R.construct("no_such_thing", AND)


def test_dual_tetragon_pairs_exhaustive():
    # pairs of idempotent commuting trigon maps are exactly the dual tetragon solutions
    built = []
    for a in idempotent_trigons(2):
        for b in idempotent_trigons(2):
            try:
                built.append(R.dual_tetragon_from_pair(a, b))
            except R.NonCommutingError:
                pass
    assert sorted(t.table for t in built) == sorted(t.table for t in sols(4, True))


# labeled systems

@pytest.mark.parametrize("n,dual,k", [(5, False, "first"), (3, False, "first"), (4, True, "first"),
                                      (5, True, "last"), (4, True, "last")])
@pytest.mark.parametrize("size", [1, 2])
def test_labeled_extend_reduce_round_trip(n, dual, k, size):
    for t in sols(n, dual)[:6]:
        sysm = LabeledSystem.uniform(n, dual, t)
        big = R.labeled_extend(sysm, k, new_size=size)
        target_dual = dual if k == "first" else False
        assert big.dual == target_dual and check_labeled(n + 1, target_dual, big).holds
        back = R.labeled_reduce(big, 1 if k == "first" else n + 1)
        assert back == sysm


def test_labeled_reduce_singletons():
    t = FiniteMap(1, 3, 2, ((0, 0),))
    red = R.labeled_reduce(LabeledSystem.uniform(6, False, t), 1)
    assert set(red.carrier.values()) == {1} and check_labeled(5, False, red).holds


@pytest.mark.parametrize("big,dual,k", [(6, True, 1), (6, True, 6), (6, False, 6), (7, False, 1),
                                        (5, True, 5), (7, True, 7), (4, True, 1)])
def test_labeled_reduce_matches_table_projection(big, dual, k):
    n = big - 1
    for t in sols(big, dual)[:10]:
        try:
            red = R.labeled_reduce(LabeledSystem.uniform(big, dual, t), k)
        except R.DegeneracyError:
            continue
        assert check_labeled(n, red.dual, red).holds
        maps = set(red.maps.values())
        assert len(maps) == 1
        m = maps.pop()
        if m.in_sizes == (2,) * t.k_in:
            # an output was cut
            proj = (R.project_cut_first_codomain(t, n, dual) if k == 1
                    else R.project_cut_last_codomain(t, n))
            assert m == SortedMap.from_finite(proj)


def test_labeled_reduce_degenerate_hexagon_to_dual_pentagon():
    for t in sols(5, True):
        hexa = R.extend_degenerate(t, "dual-odd-to-even")
        red = R.labeled_reduce(LabeledSystem.uniform(6, False, hexa), 6)
        assert red.dual and check_labeled(5, True, red).holds
        assert set(red.maps.values()) == {SortedMap.from_finite(t)}


def test_labeled_reduce_rejects_dependence():
    with pytest.raises(R.DegeneracyError):
        R.labeled_reduce(LabeledSystem.uniform(6, False, FiniteMap.from_function(
            2, 3, 2, lambda a, b, c: (c, a))), 6)
    with pytest.raises(ValueError):
        R.labeled_reduce(LabeledSystem.uniform(5, False, transposition(2)), 3)


# conjectures

def test_conjecture_examples():
    r = R.run_conjecture(1, 2, 2, proven=True)
    assert (r.passed, r.failed) == (8, 0) and r.source == (4, False) and r.target == (5, False)
    r = R.run_conjecture(3, 2, 2, proven=True)
    assert r.passed == 24 and r.failed == 0 and r.target == (6, True)
    r = R.run_conjecture(2, 2, 2, proven=True)
    assert r.failed == 0 and r.reverse_failed == 0
    assert r.constructor_errors == r.reverse_passed > 0


def test_conjecture_report_json():
    r = R.run_conjecture(4, 1, 2, proven=True)
    data = r.to_json()
    assert data["conjecture"] == 4 and data["source"] == {"n": 3, "dual": False}
    assert data["first_failure"] is None and data["proven_case"] is True


@pytest.mark.slow
def test_proven_instances_pass():
    reports = R.check_conjectures(2, 8)
    assert {(r.conjecture, r.n) for r in reports} == {(c, n) for c in R.PROVEN for n in R.PROVEN[c]}
    assert not R.any_counterexample(reports)
    assert all(r.passed > 0 and not r.error for r in reports)
