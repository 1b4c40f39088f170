"""Budgets and helpers shared by the analyzers."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..flows import ExactReturns, FlowSystem
from ..groups import DEFAULT_BATTERY, FinitelyGeneratedGroup

# Largest closed ball the analyzers enumerate in one scan (free groups grow fast).
SCAN_ELEMENTS = 20_000
CONE_ELEMENTS = 2_000


@dataclass(frozen=True)
class Budget:
    level: int = 2
    radius: int = 64
    samples: int = 6
    battery: tuple = DEFAULT_BATTERY
    clopen_levels: int = 3
    clopen_random: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.level < 1 or self.radius < 1 or self.samples < 1:
            raise ValueError("budget level, radius and samples must be positive")

    def to_dict(self) -> dict:
        return {"level": self.level, "radius": self.radius, "samples": self.samples,
                "battery": list(self.battery), "clopen_levels": self.clopen_levels,
                "clopen_random": self.clopen_random, "seed": self.seed}


def scan_radius(group: FinitelyGeneratedGroup, R: int, elements: int = SCAN_ELEMENTS) -> int:
    """R, reduced so that the closed ball stays enumerable."""
    return max(1, group.max_radius(R, elements))


def exact_pattern(system: FlowSystem, x, k: int) -> ExactReturns | None:
    if not system.capabilities.exact_return_sets:
        return None
    return system.exact_returns(x, k)


def in_cell(system: FlowSystem, x, k: int):
    """Membership predicate t ↦ [t·x ∈ cell_k(x)], memoized."""
    target = system.cell(x, k)
    memo: dict = {}

    def pred(t):
        v = memo.get(t)
        if v is None:
            v = memo[t] = system.cell(system.act(t, x), k) == target
        return v

    return pred


def sample_points(system: FlowSystem, budget: Budget) -> list:
    return system.sample_points(random.Random(budget.seed), budget.samples)


def aggregate(verdicts: list, exact_scope: bool):
    """Combine per-point verdicts for a universally quantified condition.

    Any False decides the condition; all True gives True, exact only when
    every point verdict is exact and ``exact_scope`` says the sample covers
    the relevant points.
    """
    from ..verdict import Verdict

    falses = [v for v in verdicts if v.is_false]
    if falses:
        exact = any(v.exact for v in falses)
        first = next((v for v in falses if v.exact), falses[0])
        return Verdict.false(first.witness, exact=exact, budget=first.budget)
    if verdicts and all(v.is_true for v in verdicts):
        exact = exact_scope and all(v.exact for v in verdicts)
        return Verdict.true({"points": len(verdicts), "first": verdicts[0].witness}, exact=exact,
                            budget=verdicts[0].budget)
    unknown = next((v for v in verdicts if not v.certified), None)
    return Verdict.unknown(unknown.witness if unknown else {}, budget=unknown.budget if unknown else {})


@dataclass
class Trace:
    lines: list = field(default_factory=list)

    def __call__(self, msg: str) -> None:
        self.lines.append(msg)
