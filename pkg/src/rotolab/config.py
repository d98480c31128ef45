"""Run configuration: TOML files checked against a fixed schema.

Every section and key is declared below with its type and default.  Unknown
keys are rejected with their dotted path so a typo never silently falls back
to a default.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib as tomli
except ImportError:  # Python 3.10
    import tomli

from .errors import ConfigError

VERBS = ("rotation", "attractor", "horseshoe", "entropy", "chains", "pipeline")
MAP_FAMILIES = ("twist", "boundary", "standard", "synthetic", "f1", "f2", "f", "dissipative")

# type tags: "int", "float", "bool", "str", "pair" (two floats), "list[float]",
# "list[int]", "rows" (list of float lists), "pair|none", "float|none"
SCHEMA: dict = {
    "": {"command": ("str", None), "seed": ("int", 0), "threads": ("int", 1),
         "band": ("pair", [0.0, 1.0])},
    "map": {"family": ("str|none", None), "slope": ("float|none", None), "width": ("float", 0.3),
            "exterior_rate": ("float", 0.5), "strips": ("rows", [[0.2, 0.8, 0.1, 0.0, 0.3]]),
            "contraction": ("float", 0.5), "n": ("int", 16)},
    "rotation": {"n": ("int", 1000), "samples": ("int", 2000), "tol": ("float", 0.02),
                 "depth": ("int", 6), "on_attractor": ("bool", False),
                 "witnesses": ("rows", []), "check_band": ("bool", True)},
    "attractor": {"depth_start": ("int", 4), "depth": ("int", 8), "trap": ("pair", [-1.0, 2.0]),
                  "max_boxes": ("int", 4_000_000), "lipschitz_margin": ("float", 1.0)},
    "entropy": {"n": ("int", 64), "samples": ("int", 10000), "depth": ("int", 6),
                "on_attractor": ("bool", False), "separated_n": ("list[int]", []),
                "separated_eps": ("list[float]", []), "cloud": ("int", 4000)},
    "horseshoe": {"model": ("str", "synthetic"), "n": ("int", 1), "j": ("int", 1),
                  "depth": ("int", 7), "itinerary_depth": ("int", 10), "samples": ("int", 2_000_000),
                  "check": ("int", 1000), "robustness": ("bool", False), "eta_max": ("float", 0.25),
                  "n_max": ("int", 64)},
    "chains": {"strip": ("pair", [0.3, 0.4]), "eps": ("float|none", None), "depth": ("int", 7),
               "pairs": ("int", 20), "steps": ("int", 1000), "candidates": ("int", 1000),
               "no_jump": ("bool", False), "expect": ("str", "reachable"), "z": ("pair|none", None), "w": ("pair|none", None)},
    "pipeline": {"variant": ("str", "B"), "params": ("table", {})},
    "output": {"report": ("str|none", None), "svg": ("str|none", None)},
}


def _check(path: str, tag: str, value: Any):
    def fail(what):
        raise ConfigError(f"{path}: expected {what}, got {value!r}")

    def num(v):
        return isinstance(v, (int, float)) and not isinstance(v, bool)

    if tag.endswith("|none"):
        if value is None:
            return None
        tag = tag[:-5]
    if tag == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            fail("an integer")
        return value
    if tag == "float":
        if not num(value):
            fail("a number")
        return float(value)
    if tag == "bool":
        if not isinstance(value, bool):
            fail("true or false")
        return value
    if tag == "str":
        if not isinstance(value, str):
            fail("a string")
        return value
    if tag == "pair":
        if not (isinstance(value, list) and len(value) == 2 and all(num(v) for v in value)):
            fail("a pair of numbers")
        return [float(v) for v in value]
    if tag in ("list[float]", "list[int]"):
        if not isinstance(value, list) or not all(num(v) for v in value):
            fail("a list of numbers")
        if tag == "list[int]":
            if not all(isinstance(v, int) for v in value):
                fail("a list of integers")
            return list(value)
        return [float(v) for v in value]
    if tag == "rows":
        if not isinstance(value, list) or not all(isinstance(r, list) and all(num(v) for v in r)
                                                  for r in value):
            fail("a list of number lists")
        return [[float(v) for v in r] for r in value]
    if tag == "table":
        if not isinstance(value, dict):
            fail("a table")
        return dict(value)
    raise AssertionError(tag)


@dataclass
class RunConfig:
    """A validated configuration; ``sections`` maps section name to its keys."""

    sections: dict = field(default_factory=dict)
    source: Optional[str] = None

    def __getitem__(self, name: str) -> dict:
        return self.sections[name]

    @property
    def command(self) -> Optional[str]:
        return self.sections[""]["command"]

    @property
    def seed(self) -> int:
        return self.sections[""]["seed"]

    @property
    def band(self) -> list:
        return self.sections[""]["band"]

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.sections[""].items()}
        for name, values in self.sections.items():
            if name:
                out[name] = copy.deepcopy(values)
        return out


def defaults() -> dict:
    return {sec: {k: copy.deepcopy(d) for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}


def validate(raw: dict, source: Optional[str] = None) -> RunConfig:
    """Merge ``raw`` over the defaults, rejecting unknown or mistyped keys."""
    sections = defaults()
    for key, value in raw.items():
        if key in SCHEMA and key:
            if not isinstance(value, dict):
                raise ConfigError(f"{key}: expected a table")
            for sub, v in value.items():
                if sub not in SCHEMA[key]:
                    allowed = ", ".join(sorted(SCHEMA[key]))
                    raise ConfigError(f"unknown key '{key}.{sub}' (allowed: {allowed})")
                sections[key][sub] = _check(f"{key}.{sub}", SCHEMA[key][sub][0], v)
        elif key in SCHEMA[""]:
            sections[""][key] = _check(key, SCHEMA[""][key][0], value)
        else:
            allowed = ", ".join(sorted(set(SCHEMA[""]) | set(SCHEMA) - {""}))
            raise ConfigError(f"unknown key '{key}' (allowed: {allowed})")
    cfg = RunConfig(sections, source)
    _semantic_checks(cfg)
    return cfg


def _semantic_checks(cfg: RunConfig):
    top = cfg[""]
    if top["command"] is not None and top["command"] not in VERBS:
        raise ConfigError(f"command: unknown verb '{top['command']}' (verbs: {', '.join(VERBS)})")
    lo, hi = top["band"]
    if not lo < hi:
        raise ConfigError("band: lower bound must be below the upper bound")
    if top["threads"] < 1:
        raise ConfigError("threads: must be at least 1")
    if cfg["map"]["family"] is not None and cfg["map"]["family"] not in MAP_FAMILIES:
        raise ConfigError(f"map.family: unknown family '{cfg['map']['family']}' "
                          f"(families: {', '.join(MAP_FAMILIES)})")
    for row in cfg["map"]["strips"]:
        if len(row) not in (3, 4, 5):
            raise ConfigError("map.strips: rows are [lo, hi, kick] with optional phase and ramp")
    for row in cfg["rotation"]["witnesses"]:
        if len(row) != 2 or any(v != int(v) for v in row) or row[1] < 1:
            raise ConfigError("rotation.witnesses: rows are [p, q] with integer p and q >= 1")
    if cfg["pipeline"]["variant"] not in ("B", "D"):
        raise ConfigError("pipeline.variant: expected 'B' or 'D'")
    if cfg["chains"]["expect"] not in ("reachable", "unreachable"):
        raise ConfigError("chains.expect: expected 'reachable' or 'unreachable'")
    if cfg["horseshoe"]["model"] not in ("synthetic", "stable"):
        raise ConfigError("horseshoe.model: expected 'synthetic' or 'stable'")
    from .theorem_b import PipelineParams
    known = set(PipelineParams.__dataclass_fields__)
    for key in cfg["pipeline"]["params"]:
        if key not in known:
            raise ConfigError(f"unknown key 'pipeline.params.{key}' (allowed: {', '.join(sorted(known))})")
    for name in ("rotation", "entropy"):
        if cfg[name]["n"] < 1:
            raise ConfigError(f"{name}.n: must be positive")


def load(path) -> RunConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomli.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: not valid TOML ({exc})") from None
    return validate(raw, str(path))
