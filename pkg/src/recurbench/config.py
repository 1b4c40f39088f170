"""Analysis configuration: YAML documents validated against a JSON schema."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import jsonschema
import yaml

from .analyzers import Budget
from .errors import ResourceError
from .flows import (FlowSystem, build_finite_action, build_odometer, build_one_dot_subshift,
                    build_substitution_subshift, product, random_finite_action)
from .groups import DEFAULT_BATTERY, group_from_descriptor

POINT_ANALYZERS = ("ap", "type1", "type2", "regular_ap", "usc")
GLOBAL_ANALYZERS = ("minimal_decomposition", "ro_closed", "u_star", "lwap", "equicontinuous", "distal",
                    "quotient", "equivalence")
ANALYZERS = POINT_ANALYZERS + GLOBAL_ANALYZERS

# Caps beyond which a run is refused with a resource error rather than attempted.
CAPS = {"level": 16, "radius": 1 << 16, "samples": 256, "points": 4096}

_GROUP = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["Z", "Zd", "free", "table", "cyclic", "product"]},
        "rank": {"type": "integer", "minimum": 1},
        "order": {"type": "integer", "minimum": 1},
        "generators": {"type": "array"},
        "table": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "factors": {"type": "array", "items": {"$ref": "#/$defs/group"}, "minItems": 1},
    },
    "additionalProperties": False,
}

_SYSTEM = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["odometer", "substitution", "one-dot", "finite-action", "product"]},
        "name": {"type": "string"},
        "base": {"type": "integer", "minimum": 2},
        "rules": {"type": "object", "additionalProperties": {"type": "string", "minLength": 1},
                  "minProperties": 1},
        "group": {"$ref": "#/$defs/group"},
        "points": {"type": "integer", "minimum": 1},
        "permutations": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "factor": {"$ref": "#/$defs/system"},
    },
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"kind": {"const": "substitution"}}}, "then": {"required": ["rules"]}},
        {"if": {"properties": {"kind": {"const": "finite-action"}}}, "then": {"required": ["group", "points"]}},
        {"if": {"properties": {"kind": {"const": "product"}}}, "then": {"required": ["factor"]}},
    ],
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "recurbench analysis configuration",
    "type": "object",
    "required": ["system"],
    "properties": {
        "system": {"$ref": "#/$defs/system"},
        "analyzers": {"type": "array", "items": {"enum": list(ANALYZERS)}, "uniqueItems": True},
        "budget": {
            "type": "object",
            "properties": {
                "level": {"type": "integer", "minimum": 1},
                "radius": {"type": "integer", "minimum": 1},
                "samples": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "battery": {
            "type": "object",
            "properties": {
                "sequences": {"type": "array", "items": {"enum": list(DEFAULT_BATTERY)}, "minItems": 1,
                              "uniqueItems": True},
                "clopen": {
                    "type": "object",
                    "properties": {
                        "levels": {"type": "integer", "minimum": 1},
                        "random": {"type": "integer", "minimum": 0},
                    },
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "format": {"enum": ["json", "text"]},
        "seed": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
    "$defs": {"group": _GROUP, "system": _SYSTEM},
}


class ConfigError(ValueError):
    """The configuration does not validate against the schema."""


@dataclass(frozen=True)
class AnalysisConfig:
    system: dict
    analyzers: tuple = ANALYZERS
    budget: Budget = field(default_factory=Budget)
    format: str = "json"
    seed: int = 0

    def echo(self) -> dict:
        return {"system": self.system, "analyzers": list(self.analyzers), "budget": self.budget.to_dict(),
                "format": self.format, "seed": self.seed}


def validate(doc) -> None:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None


def from_mapping(doc, seed: int | None = None) -> AnalysisConfig:
    """Validate a parsed document and apply defaults; ``seed`` overrides the file."""
    validate(doc)
    seed = doc.get("seed", 0) if seed is None else seed
    b, bat = doc.get("budget", {}), doc.get("battery", {})
    clopen = bat.get("clopen", {})
    budget = Budget(level=b.get("level", 2), radius=b.get("radius", 64), samples=b.get("samples", 6),
                    battery=tuple(bat.get("sequences", DEFAULT_BATTERY)),
                    clopen_levels=clopen.get("levels", 3), clopen_random=clopen.get("random", 4), seed=seed)
    for key in ("level", "radius", "samples"):
        if getattr(budget, key) > CAPS[key]:
            raise ResourceError(f"budget.{key} = {getattr(budget, key)} exceeds the cap {CAPS[key]}")
    analyzers = tuple(a for a in ANALYZERS if a in doc.get("analyzers", ANALYZERS))
    return AnalysisConfig(doc["system"], analyzers, budget, doc.get("format", "json"), seed)


def load(path, seed: int | None = None) -> AnalysisConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"not valid YAML: {exc}") from None
    return from_mapping(doc, seed)


def build_system(desc: dict, seed: int = 0, depth: int = 16) -> FlowSystem:
    """Construct the flow described by a ``system`` mapping."""
    kind = desc["kind"]
    if kind == "odometer":
        return build_odometer(desc.get("base", 2), depth)
    if kind == "substitution":
        return build_substitution_subshift(desc["rules"], desc.get("name"), depth)
    if kind == "one-dot":
        return build_one_dot_subshift(depth)
    if kind == "finite-action":
        m = desc["points"]
        if m > CAPS["points"]:
            raise ResourceError(f"finite action on {m} points exceeds the cap {CAPS['points']}")
        group = group_from_descriptor(desc["group"])
        if "permutations" in desc:
            return build_finite_action(group, [tuple(p) for p in desc["permutations"]], m, desc.get("name"))
        return random_finite_action(group, m, random.Random(seed), desc.get("name"))
    return product(build_system(desc["factor"], seed, depth))
