"""Scenario and sweep configuration files.

The format is flat ``key = value`` text. ``#`` starts a comment and ``[section]``
headers are accepted but carry no meaning, so a file may group keys freely.
Scenario keys are the :class:`ScenarioConfig` field names; sweep keys are
``selfish_fractions``, ``pause_times``, ``seeds`` and ``strategies``.
"""
from __future__ import annotations

import dataclasses
import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ConfigError
from .model import FusionVariant, ScenarioConfig, check_coeffs
from .sim.forwarding import Strategy

DEFAULT_FRACTIONS = (0.04, 0.10, 0.25, 0.50, 0.75, 0.90)
DEFAULT_PAUSES = tuple(float(p) for p in range(0, 17, 2))
DEFAULT_SEEDS = tuple(range(10))
DEFAULT_STRATEGIES = tuple(Strategy)

VARIANT_NAMES = {"worked": FusionVariant.WORKED_EXAMPLE, "eq21": FusionVariant.EQ21_LITERAL}


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    selfish_fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    pause_times: tuple[float, ...] = DEFAULT_PAUSES
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    strategies: tuple[Strategy, ...] = DEFAULT_STRATEGIES

    def validate(self) -> SweepSpec:
        for name in ("selfish_fractions", "pause_times", "seeds", "strategies"):
            if not getattr(self, name):
                raise ConfigError(name, "must not be empty")
        for f in self.selfish_fractions:
            if not 0.0 <= f <= 1.0:
                raise ConfigError("selfish_fractions", f"{f} outside [0, 1]")
        if any(p < 0 for p in self.pause_times):
            raise ConfigError("pause_times", "must be non-negative")
        self.base.validate()
        return self

    def cells(self) -> list[tuple[Strategy, float, float, int]]:
        return [(s, f, p, seed) for s in self.strategies for f in self.selfish_fractions
                for p in self.pause_times for seed in self.seeds]

    def scenario(self, fraction: float, pause: float, seed: int) -> ScenarioConfig:
        return dataclasses.replace(self.base, selfish_fraction=fraction, pause_time=pause, seed=seed)

    def __len__(self) -> int:
        return (len(self.strategies) * len(self.selfish_fractions)
                * len(self.pause_times) * len(self.seeds))


# -- value parsers ------------------------------------------------------------

def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("..")
        if sep:
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _optional(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    def inner(text: str):
        return None if text.strip().lower() in ("", "none") else parse(text)
    return inner


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_variant(text: str) -> FusionVariant:
    t = text.strip().lower()
    if t in VARIANT_NAMES:
        return VARIANT_NAMES[t]
    return FusionVariant(t)


def parse_strategy(text: str) -> Strategy:
    t = text.strip()
    for s in Strategy:
        if t.lower() in (s.value.lower(), s.name.lower()):
            return s
    raise ValueError(f"unknown strategy {t!r}")


def _area(text: str) -> tuple[float, float]:
    parts = _floats(text.lower().replace("x", ","))
    if len(parts) != 2:
        raise ValueError("expects width,height")
    return parts


def _coeffs(text: str) -> tuple[float, ...]:
    coeffs = _floats(text)
    check_coeffs(coeffs)
    return coeffs


_SCENARIO_PARSERS: dict[str, Callable[[str], Any]] = {
    "area": _area,
    "fusion_variant": parse_variant,
    "weight_coeffs": _optional(_coeffs),
    "window_length": _optional(float),
    "nominee_pool": _optional(int),
    "rd_centrality": _bool,
}
for _f in dataclasses.fields(ScenarioConfig):
    if _f.name not in _SCENARIO_PARSERS:
        _SCENARIO_PARSERS[_f.name] = int if _f.type == "int" else float

_SWEEP_PARSERS: dict[str, Callable[[str], Any]] = {
    "selfish_fractions": _floats,
    "pause_times": _floats,
    "seeds": _ints,
    "strategies": lambda text: tuple(parse_strategy(v) for v in text.split(",") if v.strip()),
}

KNOWN_KEYS = frozenset(_SCENARIO_PARSERS) | frozenset(_SWEEP_PARSERS)


def _convert(key: str, raw: str, where: str | None) -> Any:
    parse = _SCENARIO_PARSERS.get(key) or _SWEEP_PARSERS.get(key)
    if parse is None:
        raise ConfigError(key, "unknown key", where)
    try:
        return parse(raw)
    except ConfigError as exc:
        raise ConfigError(key, exc.message, where) from None
    except ValueError as exc:
        raise ConfigError(key, str(exc) or f"bad value {raw!r}", where) from None


def read_pairs(path: str | os.PathLike) -> list[tuple[str, str, str]]:
    """(key, raw value, "file:line") triples in file order."""
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        raise ConfigError("config", "file not found", path) from None
    pairs = []
    for lineno, line in enumerate(lines, 1):
        where = f"{path}:{lineno}"
        text = line.split("#", 1)[0].strip()
        if not text or (text.startswith("[") and text.endswith("]")):
            continue
        key, sep, value = text.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(key or "line", "expected key = value", where)
        pairs.append((key, value.strip(), where))
    return pairs


def build_spec(values: Mapping[str, Any], where: Mapping[str, str] | None = None) -> SweepSpec:
    """Assemble a validated SweepSpec from already-converted values."""
    where = where or {}
    scenario = {k: v for k, v in values.items() if k in _SCENARIO_PARSERS}
    sweep = {k: v for k, v in values.items() if k in _SWEEP_PARSERS}
    try:
        base = ScenarioConfig(**scenario).validate()
        spec = SweepSpec(base=base, **sweep).validate()
    except ConfigError as exc:
        raise ConfigError(exc.field, exc.message, where.get(exc.field)) from None
    return spec


def parse_config(path: str | os.PathLike | None = None,
                 overrides: Mapping[str, Any] | None = None) -> SweepSpec:
    """Read a config file (or nothing) and apply overrides on top.

    Override values may be raw strings, which are parsed like file values, or
    already-typed values.
    """
    values: dict[str, Any] = {}
    where: dict[str, str] = {}
    if path is not None:
        for key, raw, loc in read_pairs(path):
            values[key] = _convert(key, raw, loc)
            where[key] = loc
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        values[key] = _convert(key, value, "override") if isinstance(value, str) else value
        where[key] = "override"
    return build_spec(values, where)
