"""System-level checks: minimal decomposition, closedness of the orbit-closure
relation, U*, upper semi-continuity, local weak almost periodicity,
equicontinuity, distality, and the quotient by orbit closures."""
from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass, field

from ..cantor import ClopenSet, agreement_depth, separation_level
from ..errors import HypothesisError
from ..flows import FlowSystem, orbit_closure_cells, product
from ..verdict import Verdict
from .common import exact_pattern, scan_radius

_NEAR_LEVELS = 8


# --------------------------------------------------------------- minimality
def check_minimal_decomposition(system: FlowSystem, k: int, R: int, sample) -> Verdict:
    """Is X a union of minimal sets?"""
    budget = {"level": k, "radius": R, "samples": len(sample)}
    if system.capabilities.finite:
        return Verdict.true({"kind": "orbit-partition", "minimal_sets": system.orbits}, exact=True, budget=budget)
    Rs = scan_radius(system.group, R)
    sampled = {x: orbit_closure_cells(system, x, k, Rs).cells for x in sample}
    if system.minimal() is True:
        full = frozenset(system.space.cell_ids(k))
        agree = all(c == full for c in sampled.values())
        return Verdict.true({"kind": "single-minimal-set", "samples_agree": agree},
                            exact=system.capabilities.exact_language, budget=budget)
    reps = system.class_representatives()
    if reps is not None and system.closure_cells(reps[0], k) is not None:
        for a, b in itertools.permutations(reps, 2):
            if system.in_closure(a, b) and not system.in_closure(b, a):
                extra = system.closure_cells(a, k) - system.closure_cells(b, k)
                return Verdict.false({"kind": "non-minimal-closure", "point": a, "contains_closure_of": b,
                                      "extra_cells": extra}, exact=True, budget=budget)
        return Verdict.true({"kind": "minimal-classes", "classes": reps}, exact=True, budget=budget)
    for x, y in itertools.permutations(sampled, 2):
        if sampled[y] < sampled[x]:
            return Verdict.unknown({"strict_inclusion": (x, y)}, budget=budget)
    return Verdict.true({"kind": "sampled-closures-incomparable"}, budget=budget)


# ----------------------------------------------------------------- R_o
@dataclass(frozen=True)
class RoWitness:
    """(x_n, y_n) ∈ R_o converging to (x, y) with y outside cl(Gx)."""

    pairs: tuple
    elements: tuple
    limit: tuple
    evidence: dict

    def to_dict(self) -> dict:
        return {"pairs": self.pairs, "elements": self.elements, "limit": self.limit, "evidence": self.evidence}


def check_ro_closed(system: FlowSystem, k: int, R: int, terms: int = 6) -> Verdict:
    """Is the orbit-closure relation closed in X × X?"""
    budget = {"level": k, "radius": R}
    if system.capabilities.finite:
        return Verdict.true({"kind": "finite-space"}, exact=True, budget=budget)
    if system.minimal() is True:
        return Verdict.true({"kind": "minimal", "relation": "X x X"}, exact=True, budget=budget)
    reps = system.class_representatives()
    if reps is None:
        return Verdict.unknown({"reason": "no closure oracle"}, budget=budget)
    space = system.space
    for x, z in itertools.permutations(reps, 2):
        if not (system.in_closure(x, z) and not system.in_closure(z, x)):
            continue
        rule = system.approach(x, z)
        if rule is None:
            continue
        pairs, elems, depths = [], [], []
        for n in range(terms):
            g = rule(n)
            xn = system.act(g, x)
            if system.act(system.group.inv(g), xn) != x:
                raise AssertionError("approach element does not invert")
            pairs.append((xn, x))
            elems.append(g)
            depths.append(agreement_depth(space, xn, z, space.max_depth))
        if any(b <= a for a, b in zip(depths, depths[1:])) and depths[-1] < space.max_depth:
            continue
        outside = system.cell(x, k) not in system.closure_cells(z, k)
        if not outside:
            continue
        w = RoWitness(tuple(pairs), tuple(elems), (z, x),
                      {"agreement_depths": depths, "level": k, "cell_of_y": system.cell(x, k),
                       "closure_cells_of_x": system.closure_cells(z, k)})
        return Verdict.false({"kind": "ro-witness", "ro": w}, exact=True, budget=budget)
    return Verdict.true({"kind": "classes-closed", "classes": reps}, exact=True, budget=budget)


# ----------------------------------------------------------------- U*
@dataclass
class UStarResult:
    """U* = {x : cl(Gx) ⊆ U}: an over-approximating clopen set, the exact
    answer when oracles give it, and the openness verdicts."""

    approx: ClopenSet
    exact: ClopenSet | None
    classes: tuple | None
    openness: Verdict
    dichotomy: Verdict

    @property
    def set(self) -> ClopenSet:
        return self.exact if self.exact is not None else self.approx

    def __iter__(self):
        return iter((self.set, self.openness))


def _finite_ustar(system, U: ClopenSet):
    Uk = U if U.level >= 1 else U.refine(1)
    S = {x for x in range(system.m) if x in Uk}
    changed = True
    while changed:
        changed = False
        for x in sorted(S):
            if any(p[x] not in S for p in system._gen_perm.values()):
                S.discard(x)
                changed = True
    return ClopenSet(system.space, Uk.level, S)


def _approx_ustar(system: FlowSystem, Uk: ClopenSet, R: int) -> ClopenSet:
    """{y : ball(r)·y ⊆ U} computed cell by cell at a finer level."""
    space, k = system.space, Uk.level
    if system.capabilities.level_equivariant:
        L = k
        r = min(R, len(space.cell_ids(k)))
    else:
        r = max(0, min(R, space.max_depth - k))
        L = k + r
    ball = system.group.closed_ball(min(r, scan_radius(system.group, r))).elements
    kept = []
    for c in space.cell_ids(L):
        images = [system.cell_image(c, L, t, k) for t in ball]
        if all(im is not None and im in Uk.cells for im in images):
            kept.append(c)
    return ClopenSet(space, L, kept)


def compute_u_star(system: FlowSystem, U, R: int) -> UStarResult:
    if not isinstance(U, ClopenSet) or U.space is not system.space:
        raise ValueError("U must be a clopen set of the system's space")
    budget = {"level": U.level, "radius": R}
    if system.capabilities.finite:
        S = _finite_ustar(system, U)
        ok = Verdict.true({"kind": "finite-space", "ustar": sorted(S.cells)}, exact=True, budget=budget)
        return UStarResult(S, S, None, ok, Verdict.true({"kind": "invariant-union-of-orbits"}, exact=True,
                                                         budget=budget))
    Uk = U if U.level >= 1 else U.refine(1)
    k = Uk.level
    approx = _approx_ustar(system, Uk, R)
    reps = system.class_representatives()
    if reps is None or system.closure_cells(reps[0], k) is None:
        unk = Verdict.unknown({"reason": "no closure oracle"}, budget=budget)
        return UStarResult(approx, None, None, unk, unk)
    inside = tuple(z for z in reps if system.closure_cells(z, k) <= Uk.cells)
    outside = tuple(z for z in reps if z not in inside)
    meets = [(a, z) for a in outside for z in inside if system.in_closure(a, z)]
    dichotomy = (Verdict.false({"kind": "outside-closure-meets", "pairs": meets}, exact=True, budget=budget)
                 if meets else Verdict.true({"kind": "no-outside-closure-meets"}, exact=True, budget=budget))
    exact_set = None
    if not inside:
        exact_set = system.space.empty()
    elif not outside:
        exact_set = system.space.full()
    if exact_set is not None:
        openness = Verdict.true({"kind": "clopen", "ustar": "empty" if not inside else "X"}, exact=True,
                                budget=budget)
        return UStarResult(approx, exact_set, inside, openness, dichotomy)
    # cell analysis: does some cell around each class stay inside U*?
    for z in inside:
        escapes = []
        for L in range(k, system.space.max_depth + 1):
            esc = next((y for y in system.points_near(z, L, R) if system.class_of(y) not in inside), None)
            if esc is None:
                break
            escapes.append((L, esc))
        else:
            openness = Verdict.false({"kind": "accumulating-outside-points", "point": z, "escapes": escapes},
                                     exact=system.capabilities.exact_return_sets, budget=budget)
            return UStarResult(approx, None, inside, openness, dichotomy)
    openness = Verdict.true({"kind": "cells-inside"}, budget=budget)
    return UStarResult(approx, None, inside, openness, dichotomy)


# ------------------------------------------------------------- u.s.c.
def check_orbit_map_usc(system: FlowSystem, x, k: int, R: int) -> Verdict:
    """Upper semi-continuity of y ↦ cl(Gy) at x, against the level-k cell
    neighbourhood V of cl(Gx)."""
    budget = {"level": k, "radius": R}
    if system.capabilities.finite:
        return Verdict.true({"kind": "finite-space"}, exact=True, budget=budget)
    oracle = system.closure_cells(x, k)
    Rs = scan_radius(system.group, R)
    V = oracle if oracle is not None else orbit_closure_cells(system, x, k, Rs).cells
    if V == frozenset(system.space.cell_ids(k)):
        return Verdict.true({"kind": "neighbourhood-is-X"}, exact=oracle is not None, budget=budget)
    ball = system.group.closed_ball(Rs).elements
    escapes = []
    for kp in range(k, min(system.space.max_depth, k + _NEAR_LEVELS) + 1):
        found = None
        for y in system.points_near(x, kp, Rs):
            g = next((t for t in ball if system.cell(system.act(t, y), k) not in V), None)
            if g is not None:
                found = (kp, y, g)
                break
        if found is None:
            return Verdict.true({"kind": "orbits-stay-in-V", "level": kp, "V": V}, budget=budget)
        escapes.append(found)
    return Verdict.false({"kind": "orbit-escapes-V", "point": x, "V": V, "escapes": escapes},
                         exact=oracle is not None and system.capabilities.exact_return_sets, budget=budget)


# ---------------------------------------------------- local weak a.p.
def check_locally_weakly_ap(system: FlowSystem, k: int, R: int, sample) -> Verdict:
    budget = {"level": k, "radius": R, "samples": len(sample)}
    if system.capabilities.finite:
        g = system.group
        F = set()
        for y in range(system.m):
            for z, h in system.transport_map(y).items():
                F.add(g.inv(h))  # h·y = z, so h⁻¹·z = y
        for y in range(system.m):
            for z in system.orbit_of(y):
                if not any(system.act(f, z) == y for f in F):
                    raise AssertionError("transport set fails")
        return Verdict.true({"kind": "transport-set", "F": sorted(F, key=g.sort_key)}, exact=True, budget=budget)
    patterns = {x: exact_pattern(system, x, k) for x in sample}
    for x, pat in patterns.items():
        if pat is not None and not pat.syndetic:
            return Verdict.false({"kind": "point-not-ap", "point": x, "returns": pat.describe()}, exact=True,
                                 budget=budget)
    if (system.is_z_system and system.capabilities.level_equivariant
            and all(p is not None and p.kind == "subgroup" for p in patterns.values())):
        m = max(p.modulus for p in patterns.values())
        F = range(-m, m + 1)
        for y in sample:
            target = system.cell(y, k)
            for t in range(-2 * m, 2 * m + 1):
                if not any(system.cell(system.act(f + t, y), k) == target for f in F):
                    raise AssertionError("uniform ball fails")
        return Verdict.true({"kind": "uniform-ball", "F_ball_radius": m}, exact=True, budget=budget)
    Rt = min(scan_radius(system.group, R), 128)
    ts = system.group.closed_ball(Rt).elements
    worst = 0
    for x in sample:
        ys = [x] + system.points_near(x, k, Rt)[:3]
        for n in range(1, 33):
            F = system.group.closed_ball(n).elements
            if all(any(system.cell(system.act(f, system.act(t, y)), k) == system.cell(y, k) for f in F)
                   for y in ys for t in ts):
                worst = max(worst, n)
                break
        else:
            return Verdict.unknown({"point": x, "searched_F_radius": 32}, budget=budget)
    return Verdict.true({"kind": "sampled-ball", "F_ball_radius": worst}, budget=budget)


# ----------------------------------------------- equicontinuity, distality
def _asymptotic_probes(system: FlowSystem, pair, depth: int) -> list:
    g = system.group
    probes = []
    for j in range(1, depth + 1):
        t = pair.start + j if pair.side > 0 else pair.start - j
        a, b = system.act(t, pair.u), system.act(t, pair.v)
        back = g.inv(t)
        probes.append({"depth": j, "shift": t, "a": a, "b": b, "g": back,
                       "agreement": agreement_depth(system.space, a, b, depth + 1),
                       "separation_after_g": separation_level(system.space, system.act(back, a),
                                                              system.act(back, b), depth + 1)})
    return probes


def check_equicontinuous(system: FlowSystem, k_target: int, R: int, sample=(), probe_depth: int | None = None
                         ) -> Verdict:
    budget = {"level": k_target, "radius": R}
    space = system.space
    if system.capabilities.level_equivariant:
        return Verdict.true({"kind": "level-equivariant", "reason": "the action permutes level cells"},
                            exact=True, budget=budget)
    depth = probe_depth or min(space.max_depth - 1, k_target + 6)
    for pair in system.asymptotic_pairs():
        if separation_level(space, pair.u, pair.v, k_target) is None:
            continue
        probes = _asymptotic_probes(system, pair, depth)
        if all(p["agreement"] >= p["depth"] and p["separation_after_g"] is not None
               and p["separation_after_g"] <= k_target for p in probes):
            return Verdict.false({"kind": "asymptotic-pair", "pair": (pair.u, pair.v), "side": pair.side,
                                  "probes": probes}, exact=True, budget=budget)
    Rs = scan_radius(system.group, R)
    ball = system.group.closed_ball(Rs).elements
    for x in sample:
        for kp in range(k_target + 1, min(space.max_depth, k_target + 4) + 1):
            for y in system.points_near(x, kp, Rs):
                t = next((t for t in ball
                          if separation_level(space, system.act(t, x), system.act(t, y), k_target) is not None),
                         None)
                if t is not None:
                    return Verdict.false({"kind": "sampled-pair", "pair": (x, y), "agreement_level": kp, "g": t},
                                         budget=budget)
    return Verdict.unknown({"searched": len(sample)}, budget=budget)


def check_distal(system: FlowSystem, k: int, R: int, sample=()) -> Verdict:
    budget = {"level": k, "radius": R}
    if system.capabilities.level_equivariant:
        return Verdict.true({"kind": "level-equivariant", "reason": "separation levels are preserved"},
                            exact=True, budget=budget)
    pairs = system.asymptotic_pairs()
    if not pairs:
        return Verdict.unknown({"reason": "no asymptotic-pair oracle"}, budget=budget)
    P = product(system)
    diagonal = P.diagonal(k)
    Rs = scan_radius(system.group, R)
    for pair in pairs:
        g = next((t for t in system.group.closed_ball(Rs) if P.act(t, (pair.u, pair.v)) in diagonal), None)
        if g is None:
            continue
        probes = _asymptotic_probes(system, pair, k + 4)
        depths = [p["agreement"] for p in probes]
        if all(b > a for a, b in zip(depths, depths[1:])):
            return Verdict.false({"kind": "proximal-pair", "pair": (pair.u, pair.v), "g": g,
                                  "agreement_depths": depths}, exact=True, budget=budget)
    return Verdict.unknown({"reason": "no confirmed proximal pair"}, budget=budget)


# ----------------------------------------------------------- quotient
@dataclass
class QuotientSystem:
    base: FlowSystem
    points: tuple
    projection: Callable
    fibers: dict
    checks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"base": self.base.name, "points": self.points, "fibers": self.fibers, "checks": self.checks}


def quotient_by_orbit_closure(system: FlowSystem) -> QuotientSystem:
    """Y = X / R_o, built only when pointwise almost periodicity is certified."""
    if system.capabilities.finite:
        reps = system.class_representatives()
        fibers = {r: system.orbit_of(r) for r in reps}
        rho = system.class_of
        gens = system.group.gamma
        checks = {
            "zero_dimensional": True,  # a finite discrete space
            "trivial_action": all(rho(system.act(s, x)) == rho(x) for s in gens for x in range(system.m)),
            "minimal_fibers": all(set(system.orbit_of(y)) == set(f) for f in fibers.values() for y in f),
            "partition": sorted(itertools.chain.from_iterable(fibers.values())) == list(range(system.m)),
        }
        return QuotientSystem(system, reps, rho, fibers, checks)
    if system.minimal() is True:
        rep = system.base_points[0]
        rho = lambda x: rep  # noqa: E731
        checks = {"zero_dimensional": True, "trivial_action": True, "minimal_fibers": True, "partition": True}
        return QuotientSystem(system, (rep,), rho, {rep: "X"}, checks)
    reason = "pointwise almost periodicity is not certified"
    for x in system.base_points:
        pat = exact_pattern(system, x, 1)
        if pat is not None and not pat.syndetic:
            reason = f"{x} is not almost periodic (returns to its level-1 cell: {pat.describe()})"
            break
    raise HypothesisError(f"cannot form X/R_o for {system.name}: {reason}")
