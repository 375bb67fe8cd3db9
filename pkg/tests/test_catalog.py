from fractions import Fraction as F

import pytest

from polygon_eqs import catalog
from polygon_eqs.catalog import (
    GroupError,
    cyclic_group,
    dilog_dual_hexagon,
    group_pentagon_inverse,
    group_pentagon_right,
    idempotent_trigons,
    projective_pentagon,
    rational_samples,
    total_inversion,
    transposition,
)
from polygon_eqs.engine import DomainError
from polygon_eqs.verifier import check_point, check_single


@pytest.mark.parametrize("q", [1, 2, 3])
def test_transposition(q):
    t = transposition(q)
    assert check_single(5, False, t).holds and check_single(5, True, t).holds


def test_total_inversion():
    assert total_inversion(3)(0, 1, 2) == (2, 1, 0)
    assert total_inversion(1).table == ((0, 0, 0),)
    for dual in (False, True):
        assert check_single(7, dual, total_inversion(2)).holds


def test_group_maps():
    assert group_pentagon_right(cyclic_group(3))(1, 2) == (2, 0)
    assert group_pentagon_inverse(cyclic_group(2))(1, 1) == (0, 1)
    for q in (1, 2, 3):
        assert check_single(5, False, group_pentagon_right(cyclic_group(q))).holds
        assert check_single(5, False, group_pentagon_inverse(cyclic_group(q))).holds


def test_nonabelian_group():
    # S3 as permutation composition
    from itertools import permutations
    perms = list(permutations(range(3)))
    mul = [[perms.index(tuple(p[x] for x in r)) for r in perms] for p in perms]
    assert check_single(5, False, group_pentagon_right(mul)).holds
    assert check_single(5, False, group_pentagon_inverse(mul)).holds


@pytest.mark.parametrize("table", [
    [[0, 1], [1, 1]],              # no inverse for 1
    [[1, 0], [0, 0]],              # no identity
    [[0, 1], [1]],                 # ragged
    [[0, 2], [2, 0]],              # entry out of range
])
def test_group_validation(table):
    with pytest.raises(GroupError):
        group_pentagon_right(table)


def test_idempotent_trigons():
    assert [len(idempotent_trigons(q)) for q in (1, 2, 3)] == [1, 3, 10]
    assert all(check_single(3, False, t).holds for t in idempotent_trigons(3))


def test_rational_entries():
    p, d = projective_pentagon(), dilog_dual_hexagon()
    assert p(F(1, 2), F(1, 3)) == (F(1, 5), F(1, 6))
    assert p(F(1, 2), F(1, 2)) == (F(1, 3), F(1, 4))
    assert d(F(1, 2), F(1, 3)) == (F(1, 5), F(1, 6), F(2, 5))
    for a, b in rational_samples(100, seed=3, arity=2):
        pa, da = p(a, b), d(a, b)
        assert all(0 < v < 1 for v in pa)
        assert da[:2] == pa
        assert da[2] == p(b, a)[0]  # third component is b * a
    with pytest.raises(DomainError):
        p(F(1), F(1, 2))


def test_rational_entries_solve_their_equations():
    for name, (build, (n, dual)) in catalog.RATIONAL.items():
        assert check_point(n, dual, build(), rational_samples(100, seed=0, arity=3)).holds, name


@pytest.mark.parametrize("q", [2, 3])
def test_finite_entries_solve_their_equations(q):
    for name in catalog.FINITE:
        t = catalog.emit(name, q)
        for n, dual in catalog.FINITE[name][1]:
            assert check_single(n, dual, t).holds, (name, n, dual)


def test_names_and_emit_errors():
    assert catalog.names() == ["cyclic-pentagon-inverse", "cyclic-pentagon-right", "total-inversion",
                               "transposition", "dilog-dual-hexagon", "projective-pentagon"]
    with pytest.raises(ValueError):
        catalog.emit("projective-pentagon", 2)
    with pytest.raises(KeyError):
        catalog.emit("nope", 2)


def test_samples_are_seeded():
    assert rational_samples(5, 1, 3) == rational_samples(5, 1, 3)
    assert rational_samples(5, 1, 3) != rational_samples(5, 2, 3)
