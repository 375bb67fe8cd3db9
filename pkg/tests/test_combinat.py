from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polygon_eqs.combinat import (
    Label,
    blue_alpha,
    blue_omega,
    commutes,
    half_packets,
    packet,
    parse_label,
    red_alpha,
    red_omega,
    subsets,
)


def texts(seq):
    return tuple(j.text() for j in seq)


def L(n, s):
    return parse_label(n, s)


def test_packet_examples():
    assert texts(packet(L(4, "1234"))) == ("123", "124", "134", "234")
    assert texts(packet(L(2, "12"))) == ("1", "2")
    assert texts(packet(L(5, "235"))) == ("23", "25", "35")


@pytest.mark.parametrize("elems", [(), (3,)])
def test_packet_rejects_small(elems):
    with pytest.raises(ValueError):
        packet(Label(5, elems))


def test_half_packets_examples():
    odd, even = half_packets(L(4, "1234"))
    assert texts(odd) == ("123", "134") and texts(even) == ("124", "234")
    odd, even = half_packets(L(2, "12"))
    assert texts(odd) == ("1",) and texts(even) == ("2",)
    odd, even = half_packets(L(5, "1245"))
    assert texts(odd) == ("124", "145") and texts(even) == ("125", "245")


def test_commutes_examples():
    assert commutes(L(5, "123"), L(5, "345"))
    assert not commutes(L(5, "123"), L(5, "134"))
    assert commutes(L(7, "12345"), L(7, "34567"))


def test_commutes_errors():
    with pytest.raises(ValueError):
        commutes(L(5, "12"), L(5, "345"))
    with pytest.raises(ValueError):
        commutes(L(5, "123"), L(5, "123"))


def test_boundary_examples():
    assert texts(blue_alpha(4)) == ("12", "23", "34")
    assert texts(blue_alpha(5)) == ("123", "134", "145")
    assert texts(blue_alpha(6)) == ("1234", "1245", "1256", "2345", "2356", "3456")
    assert texts(blue_omega(4)) == ("14",)
    assert texts(blue_omega(5)) == ("345", "235", "125")
    assert texts(blue_omega(6)) == ("1456", "1346", "1236")
    assert texts(red_alpha(5)) == ("125", "235", "345")
    assert texts(red_omega(4)) == ("34", "23", "12")
    assert texts(red_alpha(6)) == ("1236", "1346", "1456")


@pytest.mark.parametrize("f", [blue_alpha, blue_omega, red_alpha, red_omega])
def test_boundary_rejects_small_n(f):
    with pytest.raises(ValueError):
        f(2)


@pytest.mark.parametrize("n", range(3, 11))
def test_commutes_three_ways(n):
    slots = subsets(n, n - 2)
    maps = subsets(n, n - 1)
    full = set(range(1, n + 1))
    for j, j2 in combinations(slots, 2):
        by_union = set(j.elems) | set(j2.elems) == full
        by_packet = not any(set(j.elems) <= set(k.elems) and set(j2.elems) <= set(k.elems) for k in maps)
        assert commutes(j, j2) == by_union == by_packet


@pytest.mark.parametrize("n", range(3, 11))
def test_blue_and_red_disjoint(n):
    assert not set(blue_alpha(n)) & set(red_alpha(n))
    assert not set(blue_omega(n)) & set(red_omega(n))


def test_boundary_lengths_match_arities():
    # lengths of the displayed Cartesian products for N = 4..8
    assert [len(blue_alpha(n)) for n in range(4, 9)] == [3, 3, 6, 6, 10]
    assert [len(blue_omega(n)) for n in range(4, 9)] == [1, 3, 3, 6, 6]


@settings(max_examples=200, deadline=None)
@given(st.sets(st.integers(1, 12), min_size=2, max_size=9))
def test_half_packet_sizes_and_union(elems):
    k = Label.of(12, elems)
    odd, even = half_packets(k)
    # K of size N-1 has N-1 codimension-one subsets
    assert len(odd) == (len(k) + 1) // 2 and len(even) == len(k) // 2
    assert tuple(sorted(odd + even)) == packet(k)
    assert list(packet(k)) == sorted(packet(k))


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(1, 9), max_size=9))
def test_label_mask_mirrors_elems(elems):
    j = Label.of(9, elems)
    assert j.mask == sum(1 << (e - 1) for e in elems)
    assert parse_label(9, list(j.elems)) == j


def test_label_validation():
    with pytest.raises(ValueError):
        Label(4, (2, 1))
    with pytest.raises(ValueError):
        Label(4, (1, 5))
