"""Run the nine equivalent conditions on one system and demand that no
certified True meets a certified False, plus the one-way implications."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from ..cantor import ClopenSet
from ..errors import EquivalenceViolation
from ..flows import FlowSystem
from ..verdict import Verdict, to_jsonable
from .common import Budget, Trace, aggregate, exact_pattern, sample_points
from .recurrence import check_ap, check_recurrence_type1, check_recurrence_type2, check_regularly_ap
from .structure import (check_distal, check_equicontinuous, check_locally_weakly_ap, check_minimal_decomposition,
                        check_orbit_map_usc, check_ro_closed, compute_u_star)

CONDITIONS = {
    1: "recurrence type I",
    2: "recurrence type II",
    3: "pointwise almost periodic",
    4: "union of minimal sets",
    5: "orbit-closure relation closed",
    6: "orbit-closure map continuous",
    7: "orbit-closure map upper semi-continuous",
    8: "U* compact open for every clopen U",
    9: "locally weakly almost periodic",
}

MAX_BATTERY_CELLS = 64


@dataclass
class EquivalenceReport:
    system: str
    budget: Budget
    conditions: dict
    consistent: bool
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    @property
    def certified_true(self) -> list:
        return [i for i, v in self.conditions.items() if v.is_true]

    @property
    def certified_false(self) -> list:
        return [i for i, v in self.conditions.items() if v.is_false]

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "budget": self.budget.to_dict(),
            "consistent": self.consistent,
            "conditions": [{"condition": i, "name": CONDITIONS[i], **v.to_dict()}
                           for i, v in sorted(self.conditions.items())],
            "checks": to_jsonable(self.checks),
            "violations": self.violations,
            "trace": self.trace,
        }


def clopen_battery(system: FlowSystem, budget: Budget) -> list:
    """All cells at levels ≤ clopen_levels (capped), seeded random unions,
    the full space, and the system's designated sets; deduplicated."""
    space = system.space
    rng = random.Random(budget.seed)
    out: list = [space.full()]
    for level in range(1, budget.clopen_levels + 1):
        ids = list(space.cell_ids(level))
        if len(ids) > MAX_BATTERY_CELLS:
            ids = rng.sample(ids, MAX_BATTERY_CELLS)
        out.extend(ClopenSet(space, level, [c]) for c in ids)
        for _ in range(budget.clopen_random):
            size = rng.randrange(1, len(ids) + 1)
            out.append(ClopenSet(space, level, rng.sample(ids, size)))
    out.extend(system.designated_clopens(budget.level))
    seen, unique = set(), []
    for U in out:
        if U not in seen:
            seen.add(U)
            unique.append(U)
    return unique


def _finite_continuity(system) -> bool:
    """⌜Continuity⌝ and closedness of R_o recomputed by exhaustion on a finite
    action, without the system's orbit cache."""
    m = system.m
    perms = [system._gen_perm[s] for s in system.group.gamma]
    reach = []
    for x in range(m):
        seen, stack = {x}, [x]
        while stack:
            y = stack.pop()
            for p in perms:
                if p[y] not in seen:
                    seen.add(p[y])
                    stack.append(p[y])
        reach.append(frozenset(seen))
    # the level-1 partition is discrete: every subset of X × X is closed, and a
    # net converges only when eventually constant.  Continuity in the sense of
    # set convergence then asks that closures be constant on each closure.
    closed = True
    continuous = all(reach[y] == reach[x] for x in range(m) for y in reach[x])
    return closed and continuous


def cross_check_equivalences(system: FlowSystem, budget: Budget | None = None, strict: bool = True
                             ) -> EquivalenceReport:
    budget = budget or Budget()
    k, R = budget.level, budget.radius
    trace = Trace()
    pts = sample_points(system, budget)
    exact_scope = system.capabilities.finite or system.minimal() is True
    trace(f"{system.name}: {len(pts)} points, level {k}, radius {R}")

    ap = {x: check_ap(system, x, k, R) for x in pts}
    t2 = {x: check_recurrence_type2(system, x, k, R, budget.battery, budget.seed) for x in pts}
    t1 = {x: check_recurrence_type1(system, x, k, R, "auto", budget.battery, budget.seed) for x in pts}
    usc = {x: check_orbit_map_usc(system, x, k, R) for x in pts}

    cond: dict = {}
    cond[1] = aggregate(list(t1.values()), exact_scope)
    cond[2] = aggregate(list(t2.values()), exact_scope)
    cond[3] = aggregate(list(ap.values()), exact_scope)
    cond[4] = check_minimal_decomposition(system, k, R, pts)
    cond[5] = check_ro_closed(system, k, R)
    v5 = cond[5]
    cond[6] = Verdict(v5.outcome, {"derived_from": 5}, v5.exact, v5.budget)
    cond[7] = aggregate(list(usc.values()), exact_scope)

    checks: dict = {}
    violations: list = []

    ustar_verdicts = []
    dichotomy_bad = []
    for U in clopen_battery(system, budget):
        res = compute_u_star(system, U, R)
        ustar_verdicts.append(res.openness)
        o, d = res.openness, res.dichotomy
        if o.certified and d.certified and o.outcome != d.outcome:
            dichotomy_bad.append(repr(U))
    falses = [v for v in ustar_verdicts if v.is_false]
    if falses:
        first = next((v for v in falses if v.exact), falses[0])
        cond[8] = Verdict.false(first.witness, exact=first.exact, budget=first.budget)
    elif all(v.is_true for v in ustar_verdicts):
        cond[8] = Verdict.true({"clopen_sets": len(ustar_verdicts)}, exact=all(v.exact for v in ustar_verdicts),
                               budget={"level": k, "radius": R})
    else:
        cond[8] = Verdict.unknown({"clopen_sets": len(ustar_verdicts)}, budget={"level": k, "radius": R})
    checks["dichotomy"] = {"sets": len(ustar_verdicts), "disagreements": dichotomy_bad}
    if dichotomy_bad:
        violations.append(f"openness of U* disagrees with the V_inf dichotomy on {dichotomy_bad[0]}")

    cond[9] = check_locally_weakly_ap(system, k, R, pts)

    # the nine conditions are pairwise equivalent
    for i, j in itertools.combinations(sorted(cond), 2):
        a, b = cond[i], cond[j]
        if {a.outcome, b.outcome} == {Verdict.true().outcome, Verdict.false().outcome}:
            violations.append(f"condition ({i}) is {a.outcome.value} but ({j}) is {b.outcome.value}")

    # a.p. => type II => type I, pointwise
    chain_bad = []
    for x in pts:
        if ap[x].is_true and t2[x].is_false:
            chain_bad.append((x, "ap", "type2"))
        if t2[x].is_true and t1[x].is_false:
            chain_bad.append((x, "type2", "type1"))
    checks["implication_chain"] = {"points": len(pts), "violations": chain_bad}
    violations += [f"{x}: {a} true but {b} false" for x, a, b in chain_bad]

    # bidirectional and cone criteria agree on Z-systems with exact returns
    if system.is_z_system and system.capabilities.exact_return_sets:
        bad = []
        for x in pts:
            cone = check_recurrence_type1(system, x, k, R, "cone", budget.battery, budget.seed)
            if cone.outcome != t1[x].outcome:
                bad.append(x)
        checks["bidirectional_vs_cone"] = {"points": len(pts), "disagreements": bad}
        violations += [f"{x}: cone and bidirectional type I disagree" for x in bad]

    # equicontinuity certified False excludes distality certified True
    eq = check_equicontinuous(system, k, R, pts)
    di = check_distal(system, k, R, pts)
    checks["equicontinuous"] = eq.to_dict()
    checks["distal"] = di.to_dict()
    if eq.is_false and di.is_true:
        violations.append("equicontinuity is false but distality is true")

    # pointwise regular a.p. on an exact system forces equicontinuity
    if system.capabilities.exact_return_sets and exact_scope:
        reg = [check_regularly_ap(system, x, k, R) for x in pts]
        if all(v.is_true and v.exact for v in reg) and eq.is_false:
            violations.append("pointwise regularly a.p. but equicontinuity is false")
        checks["regular_ap"] = [v.outcome.value for v in reg]

    if system.capabilities.finite:
        ok = _finite_continuity(system)
        checks["continuity_audit"] = {"exhaustive": ok, "ro_closed": v5.is_true}
        if ok != v5.is_true:
            violations.append("exhaustive continuity disagrees with closedness of R_o")

    for i, v in sorted(cond.items()):
        trace(f"({i}) {CONDITIONS[i]}: {v.outcome.value}{' exact' if v.exact else ''}")
    report = EquivalenceReport(system.name, budget, cond, not violations, checks, violations, trace.lines)
    if violations and strict:
        raise EquivalenceViolation("; ".join(violations), report)
    return report
