from __future__ import annotations

import random
import threading

import pytest
from hypothesis import given, strategies as st

from recurbench.cantor import SubshiftPoint
from recurbench.errors import RelationError
from recurbench.flows import (FIBONACCI, THUE_MORSE, build_finite_action, build_odometer, build_one_dot_subshift,
                              build_substitution_subshift, catalog, export_sequence, orbit_closure_cells, product,
                              random_finite_action, return_times)
from recurbench.groups import free_abelian, free_group, integers

from recurbench import oracle

ODO2 = build_odometer(2)
ONE = build_one_dot_subshift()
TM = build_substitution_subshift(THUE_MORSE, "thue-morse")


# ------------------------------------------------------------- frozen values
def test_odometer_returns_frozen():
    rs = return_times(ODO2, 0, ODO2.space.cylinder(0, 2), 10)
    assert sorted(rs.elements) == [-8, -4, 0, 4, 8] and rs.exact
    assert all(ODO2.cell(ODO2.act(8, x), 3) == ODO2.cell(x, 3) for x in range(40))


def test_one_dot_returns_frozen():
    rs = return_times(ONE, ONE.MARK, ONE.space.cylinder(ONE.MARK, 1), 100)
    assert rs.elements == (0,) and rs.exact


def test_thue_morse_return_gap_frozen():
    x = TM.base_points[0]
    rs = return_times(TM, x, TM.space.cylinder(x, 1), 1 << 12)
    gaps = [b - a for a, b in zip(sorted(rs.elements), sorted(rs.elements)[1:])]
    assert max(gaps) == 8


def test_orbit_closure_cells_frozen():
    assert len(orbit_closure_cells(ONE, ONE.MARK, 1, 10).cells) == 4
    tm = orbit_closure_cells(TM, TM.base_points[0], 1, 1 << 10)
    assert len(tm.cells) == 6 and tm.exact
    assert len(orbit_closure_cells(ODO2, 5, 2, 4).cells) == 4


def test_substitution_acceptance_frozen():
    assert len(TM.space.cell_ids(1)) == 6
    build_substitution_subshift(FIBONACCI, "fibonacci")
    with pytest.raises(ValueError, match="primitive"):
        build_substitution_subshift({"0": "01", "1": "1"})


def test_one_dot_points_and_ap_frozen():
    for k in (1, 2, 3):
        assert len(ONE.space.cell_ids(k)) == 2 * k + 2
    assert ONE.exact_returns(ONE.MARK, 1).kind == "finite"
    assert ONE.exact_returns(ONE.ZERO, 1).syndetic


def test_one_dot_pair_enters_diagonal_frozen():
    P = product(ONE)
    k = 2
    D = P.diagonal(k)
    for n in range(-3 * k, 3 * k + 1):
        assert (P.act(n, (ONE.MARK, ONE.ZERO)) in D) == (abs(n) >= k + 1)


def test_export_sequence():
    x = TM.base_points[0]
    text = export_sequence(TM, x, -8, 8)
    assert text == "".join(oracle.thue_morse(i) for i in range(-8, 9))
    with pytest.raises(ValueError):
        export_sequence(ODO2, 0, 0, 3)


# ---------------------------------------------------------------- invariants
def _points(system, seed):
    return system.sample_points(random.Random(seed), 4)


@pytest.mark.parametrize("name", list(catalog(0)))
@given(seed=st.integers(0, 1000), a=st.integers(-40, 40), b=st.integers(-40, 40))
def test_action_axioms(systems, name, seed, a, b):
    s = systems[name]
    rng = random.Random(seed)
    elems = list(s.group.closed_ball(3))
    g, h = rng.choice(elems), rng.choice(elems)
    if s.group.kind == "Z":
        g, h = a, b
    for x in _points(s, seed):
        assert s.act(s.group.identity, x) == x
        assert s.act(s.group.mul(g, h), x) == s.act(g, s.act(h, x))
        assert s.space.cell_id(s.act(g, x), 2) in s.space.cell_ids(2)


@given(st.integers(1, 6), st.sampled_from([2, 3]))
def test_odometer_return_closed_form(k, b):
    s = build_odometer(b)
    R = 3 * b ** k
    for x in (0, 1, b + 1):
        got = return_times(s, x, s.space.cylinder(x, k), R).elements
        assert sorted(got) == [t for t in range(-R, R + 1) if t % b ** k == 0]


def test_finite_action_relations():
    Z2 = free_abelian(2)
    with pytest.raises(RelationError):
        build_finite_action(Z2, [(1, 2, 0), (1, 0, 2)])
    s = build_finite_action(free_group(2), [(1, 0, 2, 3), (0, 1, 3, 2)])
    assert sorted(map(sorted, s.orbits)) == [[0, 1], [2, 3]]
    with pytest.raises(ValueError):
        build_finite_action(integers(), [(0, 0, 1)])


@given(st.integers(0, 10_000))
def test_random_finite_transport(seed):
    s = random_finite_action(free_group(2), 8, random.Random(seed))
    for x in range(8):
        for z, g in s.transport_map(x).items():
            assert s.act(g, x) == z


def test_fixed_point_cache_is_thread_safe():
    fresh = build_substitution_subshift(THUE_MORSE, "thue-morse")
    x = fresh.base_points[0]
    out = []

    def worker(lo):
        out.append(export_sequence(fresh, x, lo, lo + 300))

    threads = [threading.Thread(target=worker, args=(lo,)) for lo in range(-2000, 2000, 400)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    expected = {"".join(oracle.thue_morse(i) for i in range(lo, lo + 301)) for lo in range(-2000, 2000, 400)}
    assert set(out) == expected


def test_one_dot_shift_points():
    y = ONE.act(5, ONE.MARK)
    assert y == SubshiftPoint("mark", 5) and ONE.mark_position(y) == -5
    assert ONE.act(7, ONE.ZERO) == ONE.ZERO
