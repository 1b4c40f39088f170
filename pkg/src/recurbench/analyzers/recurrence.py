"""Point-level checks: almost periodicity, recurrence of types I and II,
regular almost periodicity."""
from __future__ import annotations

import threading

from ..errors import BudgetError
from ..flows import ExactReturns, FlowSystem
from ..groups import (DEFAULT_BATTERY, ConeApprox, FinitelyGeneratedGroup, battery_sequence, cone_approx,
                      in_k_set, is_syndetic_window)
from ..verdict import Verdict
from .common import CONE_ELEMENTS, exact_pattern, in_cell, scan_radius

_CONE_CACHE: dict = {}
_CONE_LOCK = threading.Lock()


def _far_element(group: FinitelyGeneratedGroup, n: int):
    """An element of length n (a power of an infinite-order generator)."""
    if group.kind == "Z" and group.is_standard:
        return n
    return battery_sequence(group, "forward", n, 1)[0]


def _syndetic_cover(system: FlowSystem, x, pat: ExactReturns):
    """A finite F with F·N = G for an exactly known syndetic return set N."""
    g = system.group
    if pat.kind == "stabilizer":
        orbit = system.orbit_of(x)
        F = sorted({system.transport(x, y) for y in orbit}, key=g.sort_key)
        return tuple(F), {"transversal_of_index": len(F)}
    m = pat.subgroup_witness()["modulus"]
    return tuple(g.closed_ball(m)), {"F_ball_radius": m}


def check_ap(system: FlowSystem, x, k: int, R: int) -> Verdict:
    """Is N(x, cell_k(x)) syndetic?"""
    g = system.group
    budget = {"level": k, "radius": R}
    pat = exact_pattern(system, x, k)
    if pat is not None:
        if pat.syndetic:
            F, desc = _syndetic_cover(system, x, pat)
            Rw = scan_radius(g, min(R, 256), 120)
            for t in g.closed_ball(Rw):
                if not any(pat.contains(g.mul(g.inv(f), t)) for f in F):
                    raise AssertionError(f"exact cover fails at {t!r}")
            return Verdict.true({"kind": "syndetic-returns", "returns": pat.describe(), "F": F, **desc},
                                exact=True, budget=budget)
        M = max(g.word_length(t) for t in pat.members)
        Rw = scan_radius(g, max(R, M + 4))
        v = is_syndetic_window(g, pat.contains, 1, Rw, complement_thick=lambda m: _far_element(g, M + m + 1))
        return Verdict.false({"kind": "finite-returns", "returns": sorted(pat.members, key=g.sort_key),
                              **v.witness}, exact=True, budget=budget)
    pred = in_cell(system, x, k)
    if system.is_z_system:
        returns = [t for t in range(-R, R + 1) if pred(t)]
        if len(returns) < 2:
            return Verdict.unknown({"returns_in_window": returns}, budget=budget)
        gap = max(b - a for a, b in zip(returns, returns[1:]))
        if 2 * gap > R:
            return Verdict.unknown({"gap_bound": gap}, budget=budget)
        v = is_syndetic_window(g, pred, gap, R - gap)
        if v.is_true:
            return Verdict.true({"kind": "gap-scan", "gap_bound": gap, "F": v.witness["F"]}, budget=budget)
        return Verdict.unknown({"gap_bound": gap, **v.witness}, budget=budget)
    Rs = scan_radius(g, R)
    for n in range(1, min(4, Rs // 2) + 1):
        v = is_syndetic_window(g, pred, n, Rs - n)
        if v.is_true:
            return Verdict.true({"kind": "window-cover", **v.witness}, budget={**budget, "scan_radius": Rs})
    return Verdict.unknown({"scan_radius": Rs}, budget=budget)


# --------------------------------------------------------------- type I
def _levels(system: FlowSystem, k: int) -> range:
    # every level k >= 1 of a finite space is the same discrete partition
    return range(1, 2) if system.capabilities.finite else range(1, k + 1)


def _first_return(pat: ExactReturns, lo: int, sign: int):
    """Least i ≥ lo with sign·i in the return set (Z patterns), or None."""
    if pat.kind == "subgroup":
        m = pat.modulus
        return sign * m * max(1, -(-lo // m))
    if pat.kind == "cofinite":
        i = lo
        while sign * i in pat.members:
            i += 1
        return sign * i
    hits = [t for t in pat.members if sign * t >= lo]
    return min(hits, key=abs) if hits else None


def _bidirectional(system: FlowSystem, x, k: int, R: int) -> Verdict:
    budget = {"level": k, "radius": R, "method": "bidirectional"}
    exact = True
    levels = {}
    for j in _levels(system, k):
        pat = exact_pattern(system, x, j)
        if pat is not None:
            pos, neg = _first_return(pat, j, +1), _first_return(pat, j, -1)
            if pos is None or neg is None:
                return Verdict.false({"kind": "one-sided-returns", "level": j, "returns": pat.describe(),
                                      "missing": "+" if pos is None else "-"}, exact=True, budget=budget)
        else:
            exact = False
            pred = in_cell(system, x, j)
            pos = next((i for i in range(max(j, 1), R + 1) if pred(i)), None)
            neg = next((-i for i in range(max(j, 1), R + 1) if pred(-i)), None)
            if pos is None or neg is None:
                return Verdict.unknown({"level": j, "positive": pos, "negative": neg}, budget=budget)
        levels[j] = (pos, neg)
    return Verdict.true({"kind": "bidirectional-returns", "returns": levels}, exact=exact, budget=budget)


def battery_cones(group: FinitelyGeneratedGroup, battery=DEFAULT_BATTERY, R: int = 32, seed: int = 0,
                  punctured: bool = True) -> list:
    """Cone approximations of the battery sequences (cached; independent of the flow)."""
    key = (group, tuple(battery), R, seed, punctured)
    with _CONE_LOCK:
        if key in _CONE_CACHE:
            return _CONE_CACHE[key]
    out = []
    for name in battery:
        try:
            seq = battery_sequence(group, name, 2 * R + 1, 4, seed)
        except ValueError:
            continue
        try:
            out.append((name, cone_approx(group, seq, R, punctured)))
        except BudgetError:
            continue
    with _CONE_LOCK:
        _CONE_CACHE[key] = out
    return out


def _cone_sign(group: FinitelyGeneratedGroup, cone: ConeApprox) -> int | None:
    """For standard Z, a stabilized cone window {1..R} or {-R..-1} is ℕ or -ℕ."""
    if not (group.kind == "Z" and group.is_standard):
        return None
    R = cone.radius
    if cone.lower == frozenset(range(1, R + 1)):
        return +1
    if cone.lower == frozenset(range(-R, 0)):
        return -1
    return None


def _cone_path(system: FlowSystem, x, k: int, R: int, battery, seed: int) -> Verdict:
    g = system.group
    budget = {"level": k, "radius": R, "method": "cone"}
    if g.is_finite:
        # no length-divergent sequences: there are no cones to test
        return Verdict.true({"kind": "no-cones", "reason": "finite group"}, exact=True, budget=budget)
    Rc = min(R, 64) if (g.kind == "Z" and g.is_standard) else scan_radius(g, R, CONE_ELEMENTS)
    cones = battery_cones(g, battery, Rc, seed)
    stabilized = [(name, c) for name, c in cones if c.stabilized and c.lower]
    budget["cone_radius"] = Rc
    budget["skipped_unstabilized"] = sorted(name for name, c in cones if not c.stabilized)
    if not stabilized:
        return Verdict.unknown({"reason": "no stabilized cone in battery"}, budget=budget)
    hits: dict = {}
    exact = True
    unresolved = None
    patterns = {j: exact_pattern(system, x, j) for j in _levels(system, k)}
    for name, cone in stabilized:
        sign = _cone_sign(g, cone)
        members = sorted(cone.lower, key=g.sort_key)
        for j in patterns:
            pat = patterns[j]
            test = pat.contains if pat is not None else in_cell(system, x, j)
            hit = next((c for c in members if test(c)), None)
            if hit is None and pat is not None:
                if sign is not None:
                    hit = _first_return(pat, 1, sign)
                    if hit is None:
                        return Verdict.false({"kind": "cone-misses-returns", "sequence": name, "level": j,
                                              "returns": pat.describe()}, exact=True, budget=budget)
                elif pat.kind == "finite" and all(g.word_length(t) <= Rc for t in pat.members):
                    return Verdict.false({"kind": "cone-misses-returns", "sequence": name, "level": j,
                                          "returns": pat.describe()}, exact=True, budget=budget)
            if hit is None:
                unresolved = unresolved or {"sequence": name, "level": j}
                continue
            hits[(name, j)] = hit
            if pat is None or not (pat.syndetic or sign is not None):
                exact = False
    if unresolved is not None:
        if all(p is not None and p.syndetic for p in patterns.values()):
            # a.p. implies type I for every cone
            return Verdict.true({"kind": "implied-by-ap", "unresolved": unresolved}, exact=True, budget=budget)
        return Verdict.unknown(unresolved, budget=budget)
    return Verdict.true({"kind": "cone-hits", "hits": hits}, exact=exact, budget=budget)


def check_recurrence_type1(system: FlowSystem, x, k: int, R: int, method: str = "auto",
                           battery=DEFAULT_BATTERY, seed: int = 0) -> Verdict:
    """Type I recurrence at x up to level k.

    ``method`` is ``bidirectional`` (Z only: positive and negative returns at
    each level), ``cone`` (stabilized battery cones) or ``auto``.
    """
    if method not in ("auto", "bidirectional", "cone"):
        raise ValueError(f"unknown method {method!r}")
    if method == "bidirectional" or (method == "auto" and system.is_z_system):
        if not system.is_z_system:
            raise ValueError("the bidirectional criterion applies to Z with generator 1")
        return _bidirectional(system, x, k, R)
    return _cone_path(system, x, k, R, battery, seed)


# --------------------------------------------------------------- type II
def check_recurrence_type2(system: FlowSystem, x, k: int, R: int, battery=DEFAULT_BATTERY,
                           seed: int = 0, punctured: bool = True) -> Verdict:
    """Battery-relative type II recurrence: along each battery sequence, some
    c in K(g) of bounded length returns x to cell_k(x)."""
    if not battery:
        raise ValueError("empty sequence battery")
    g = system.group
    budget = {"level": k, "radius": R, "battery": list(battery)}
    if g.is_finite:
        return Verdict.true({"kind": "no-divergent-sequences", "reason": "finite group"}, exact=True,
                            budget=budget)
    pat = exact_pattern(system, x, k)
    if pat is not None and pat.kind == "finite" and pat.members == frozenset([g.identity]):
        return Verdict.false({"kind": "identity-only-returns", "sequence": battery[0],
                              "returns": [g.identity], "reason": "e never lies in K(g)"},
                             exact=True, budget=budget)
    if pat is not None and pat.syndetic and not (g.kind == "Z" and g.is_standard):
        return Verdict.true({"kind": "implied-by-ap", "returns": pat.describe()}, exact=True, budget=budget)
    test = pat.contains if pat is not None else in_cell(system, x, k)
    Rs = scan_radius(g, R)
    window = g.closed_ball(Rs).elements
    bounds: dict = {}
    unresolved = None
    for name in battery:
        try:
            seq = battery_sequence(g, name, Rs + 1, 4, seed)
        except ValueError:
            continue
        worst = 0
        for h in seq:
            c = next((c for c in window if in_k_set(g, c, h, punctured) and test(c)), None)
            if c is None:
                unresolved = unresolved or {"sequence": name, "element": h}
                break
            worst = max(worst, g.word_length(c))
        else:
            bounds[name] = worst
    if pat is not None and pat.syndetic:
        return Verdict.true({"kind": "implied-by-ap", "returns": pat.describe(), "bounds": bounds},
                            exact=True, budget=budget)
    if unresolved is None and bounds:
        return Verdict.true({"kind": "battery-bounds", "bounds": bounds}, budget=budget)
    return Verdict.unknown(unresolved or {}, budget=budget)


# --------------------------------------------------------------- regular a.p.
def check_regularly_ap(system: FlowSystem, x, k: int, R: int = 4096, max_modulus: int = 64) -> Verdict:
    """Does the return set to cell_k(x) contain a finite-index subgroup?"""
    budget = {"level": k, "radius": R}
    pat = exact_pattern(system, x, k)
    if pat is not None:
        w = pat.subgroup_witness()
        if w is not None:
            return Verdict.true({"kind": "subgroup", **w}, exact=True, budget=budget)
        return Verdict.false({"kind": "no-subgroup", "returns": pat.describe()}, exact=True, budget=budget)
    if not system.is_z_system:
        return Verdict.unknown({"reason": "no exact return oracle"}, budget=budget)
    pred = in_cell(system, x, k)
    for m in range(1, max_modulus + 1):
        if all(pred(t) for t in range(m, R + 1, m)) and all(pred(-t) for t in range(m, R + 1, m)):
            return Verdict.true({"kind": "subgroup-in-window", "modulus": m}, budget=budget)
    return Verdict.unknown({"searched_moduli": max_modulus}, budget=budget)
