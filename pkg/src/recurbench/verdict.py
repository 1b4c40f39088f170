"""Tri-state verdicts with witnesses."""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Any


class Outcome(str, enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a budgeted check.

    ``exact`` is set only when the producing system has oracles that turn the
    finite computation into a proof (for levels up to the one in ``budget``).
    True and False always carry a witness that can be replayed.
    """

    outcome: Outcome
    witness: dict = field(default_factory=dict)
    exact: bool = False
    budget: dict = field(default_factory=dict)

    @classmethod
    def true(cls, witness=None, exact=False, budget=None):
        return cls(Outcome.TRUE, dict(witness or {}), exact, dict(budget or {}))

    @classmethod
    def false(cls, witness=None, exact=False, budget=None):
        return cls(Outcome.FALSE, dict(witness or {}), exact, dict(budget or {}))

    @classmethod
    def unknown(cls, witness=None, budget=None):
        return cls(Outcome.UNKNOWN, dict(witness or {}), False, dict(budget or {}))

    @property
    def is_true(self) -> bool:
        return self.outcome is Outcome.TRUE

    @property
    def is_false(self) -> bool:
        return self.outcome is Outcome.FALSE

    @property
    def certified(self) -> bool:
        return self.outcome is not Outcome.UNKNOWN

    def with_budget(self, **budget) -> "Verdict":
        return dataclasses.replace(self, budget={**self.budget, **budget})

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "exact": self.exact,
            "witness": to_jsonable(self.witness),
            "budget": to_jsonable(self.budget),
        }


def to_jsonable(obj: Any) -> Any:
    """Convert witnesses (tuples, frozensets, dataclasses, enums) into JSON data."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        return sorted(items, key=lambda v: (str(type(v)), repr(v)))
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj))
    return str(obj)
