import json
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest

from oracles import exhaustive, tables_to_maps
from polygon_eqs.catalog import dilog_dual_hexagon, projective_pentagon, rational_samples, transposition
from polygon_eqs.combinat import Label, subsets
from polygon_eqs.engine import ArityError, FiniteMap, LabeledSystem, PointMap, SortedMap, random_map
from polygon_eqs.eqcompiler import map_arity
from polygon_eqs.verifier import (
    Counterexample,
    Verdict,
    check_kashaev_form,
    check_labeled,
    check_many,
    check_point,
    check_samples,
    check_single,
    replay,
)

AND = FiniteMap.from_function(2, 2, 1, lambda a, b: a & b)
NAND = FiniteMap.from_function(2, 2, 1, lambda a, b: 1 - (a & b))


def test_transposition_solves_pentagon_and_dual():
    assert check_single(5, False, transposition(2)).holds
    assert check_single(5, True, transposition(2)).holds


def test_and_nand():
    assert check_single(4, False, AND).holds
    v = check_single(4, False, NAND)
    assert not v.holds
    # first failing triple in lex order: (0 nand 0) nand 1 = 0, 0 nand (0 nand 1) = 1
    assert v.counterexample == Counterexample((0, 0, 1), (0,), (1,))
    assert v.inputs_checked == 2
    assert replay(4, False, NAND, v)


def test_check_single_counts_all_inputs():
    v = check_single(6, False, random_map(2, 3, 2, 0))
    if v.holds:
        assert v.inputs_checked == 2 ** 6
    else:
        assert replay(6, False, random_map(2, 3, 2, 0), v)


def test_arity_mismatch():
    with pytest.raises(ArityError):
        check_single(5, False, AND)
    with pytest.raises(ArityError):
        check_point(5, False, dilog_dual_hexagon(), [(F(1, 2),) * 3])


def test_verdict_invariant_and_json():
    with pytest.raises(ValueError):
        Verdict(True, Counterexample((0,), (0,), (1,)), 1)
    with pytest.raises(ValueError):
        Verdict(False, None, 1)
    v = check_single(4, False, NAND)
    data = json.loads(json.dumps(v.to_json()))
    assert data == {"holds": False, "counterexample": {"input": [0, 0, 1], "lhs": [0], "rhs": [1]},
                    "inputs_checked": 2}
    assert Verdict.from_json(data) == v


def test_labeled_examples():
    ident = SortedMap.from_function((2,), (2,), lambda u: (u,))
    sysm = LabeledSystem(3, False, {j: 2 for j in subsets(3, 1)}, {k: ident for k in subsets(3, 2)})
    assert check_labeled(3, False, sysm).holds
    one = SortedMap((1, 1), (1,), ((0,),))
    sysm = LabeledSystem(4, False, {j: 1 for j in subsets(4, 2)}, {k: one for k in subsets(4, 3)})
    v = check_labeled(4, False, sysm)
    assert v.holds and v.inputs_checked == 1


def test_labeled_mixed_carriers_detects_failure():
    # tetragon with a non-associative map on one slot
    q = 3
    sub = lambda x, y: ((x - y) % q,)
    maps = {k: SortedMap.from_function((q, q), (q,), sub) for k in subsets(4, 3)}
    sysm = LabeledSystem(4, False, {j: q for j in subsets(4, 2)}, maps)
    v = check_labeled(4, False, sysm)
    assert not v.holds
    with pytest.raises(ValueError):
        check_labeled(5, False, sysm)


def test_point_examples():
    for t, n, dual in ((projective_pentagon(), 5, False), (dilog_dual_hexagon(), 6, True)):
        samples = rational_samples(100, seed=0, arity=3)
        v = check_point(n, dual, t, samples)
        assert v.holds and v.inputs_checked == 100


def test_point_failure_on_rationals():
    # (a, b) -> (b, a - b): the second component is not associative
    t = PointMap(2, 2, lambda a, b: (b, a - b))
    v = check_point(5, False, t, [(F(1), F(2), F(3))])
    assert not v.holds
    assert v.counterexample.lhs != v.counterexample.rhs


def test_group_right_on_rationals_holds():
    # (b, a + b) is the group construction for (Q, +)
    t = PointMap(2, 2, lambda a, b: (b, a + b))
    samples = [tuple(F(x) for x in s) for s in product(range(-2, 3), repeat=3)]
    assert check_point(5, False, t, samples).holds


def test_check_samples():
    v = check_samples(4, False, NAND, [(0, 0, 0), (0, 0, 1)])
    assert not v.holds and v.inputs_checked == 2
    assert check_samples(4, False, NAND, [(0, 0, 0)]).holds


def test_kashaev_examples():
    trivial = FiniteMap(1, 2, 3, ((0, 0, 0),))
    assert check_kashaev_form(trivial)
    with pytest.raises(ArityError):
        check_kashaev_form(transposition(2))


def test_kashaev_equivalence_exhaustive():
    tabs = exhaustive(6, True)
    dual6 = check_many(6, True, tabs, 2)
    kas = np.array([check_kashaev_form(t) for t in tables_to_maps(2, 2, tabs)])
    assert dual6.sum() == 62
    assert np.array_equal(dual6, kas)


def test_check_many_agrees_with_check_single():
    tabs = exhaustive(5, False)
    mask = check_many(5, False, tabs, 2)
    singles = [check_single(5, False, t).holds for t in tables_to_maps(2, 2, tabs)]
    assert mask.tolist() == singles
