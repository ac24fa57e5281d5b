"""Evidence algebra over {Cooperative, Selfish}.

Mass functions are dictionaries keyed by frozensets of hypotheses. Dempster's
rule and its importance-weighted extension work on any finite frame; the
collective-importance fusion used for watchdog reports is binary only.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import ConflictError, DegenerateEvidenceError
from .model import FusionVariant

log = logging.getLogger(__name__)

MASS_TOL = 1e-9
IF_EPSILON = 1e-6


class Verdict(enum.Enum):
    COOPERATIVE = "Cooperative"
    SELFISH = "Selfish"

    @property
    def other(self) -> Verdict:
        return Verdict.SELFISH if self is Verdict.COOPERATIVE else Verdict.COOPERATIVE


C = frozenset({Verdict.COOPERATIVE})
S = frozenset({Verdict.SELFISH})
BINARY_FRAME = C | S


class Bpa:
    """Basic probability assignment: non-empty focal sets to masses summing to one."""

    __slots__ = ("mass", "frame")

    def __init__(self, mass: Mapping[Iterable[Hashable], float], frame: Iterable[Hashable] | None = None):
        m: dict[frozenset, float] = {}
        for key, value in mass.items():
            key = frozenset(key)
            if not key:
                if value != 0:
                    raise ValueError("mass on the empty set must be zero")
                continue
            if value < -MASS_TOL:
                raise ValueError(f"negative mass {value} on {set(key)}")
            m[key] = m.get(key, 0.0) + max(float(value), 0.0)
        total = math.fsum(m.values())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {total}, not 1")
        universe = frozenset().union(*m) if m else frozenset()
        self.frame = frozenset(frame) if frame is not None else universe
        if not universe <= self.frame:
            raise ValueError("focal element outside the frame")
        self.mass = m

    @classmethod
    def binary(cls, cooperative: float, selfish: float) -> Bpa:
        return cls({C: cooperative, S: selfish}, BINARY_FRAME)

    @classmethod
    def vacuous(cls, frame: Iterable[Hashable] = BINARY_FRAME) -> Bpa:
        frame = frozenset(frame)
        return cls({frame: 1.0}, frame)

    def __getitem__(self, key: Iterable[Hashable]) -> float:
        return self.mass.get(frozenset(key), 0.0)

    def __repr__(self) -> str:
        body = ", ".join(f"{_label(k)}: {v:.6g}" for k, v in sorted(self.mass.items(), key=lambda kv: _label(kv[0])))
        return f"Bpa({{{body}}})"

    def close_to(self, other: Bpa, tol: float = MASS_TOL) -> bool:
        keys = set(self.mass) | set(other.mass)
        return all(abs(self[k] - other[k]) <= tol for k in keys)

    @property
    def cooperative(self) -> float:
        return self[C]

    @property
    def selfish(self) -> float:
        return self[S]


def _label(key: frozenset) -> str:
    return "|".join(sorted(getattr(h, "value", str(h)) for h in key))


def _normalized(num: dict[frozenset, float], denom: float, frame: frozenset) -> Bpa:
    return Bpa({k: v / denom for k, v in num.items()}, frame)


def ds_combine(b1: Bpa, b2: Bpa) -> Bpa:
    num: dict[frozenset, float] = {}
    conflict = 0.0
    for a, ma in b1.mass.items():
        for b, mb in b2.mass.items():
            c = a & b
            if c:
                num[c] = num.get(c, 0.0) + ma * mb
            else:
                conflict += ma * mb
    denom = 1.0 - conflict
    if denom <= 1e-12 or not num:
        raise ConflictError("total conflict between the two mass functions")
    return _normalized(num, denom, b1.frame | b2.frame)


def eds_combine(b1: Bpa, b2: Bpa, if1: float, if2: float) -> Bpa:
    """Importance-weighted Dempster combination.

    Each product term raises b1's mass to if1/if2 and b2's to if2/if1, then the
    result is renormalized over the non-empty intersections.
    """
    _check_if(if1)
    _check_if(if2)
    e1, e2 = if1 / if2, if2 / if1
    num: dict[frozenset, float] = {}
    for a, ma in b1.mass.items():
        for b, mb in b2.mass.items():
            c = a & b
            if c:
                num[c] = num.get(c, 0.0) + ma ** e1 * mb ** e2
    denom = math.fsum(num.values())
    if denom <= 0.0:
        raise ConflictError("no mass survives the weighted combination")
    return _normalized(num, denom, b1.frame | b2.frame)


def _check_if(value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"importance factor {value} outside (0, 1)")


def importance_factors(reputations: Sequence[float], epsilon: float = IF_EPSILON) -> list[float]:
    """Each monitor's share of the summed reputation, clamped into [eps, 1 - eps]."""
    if len(reputations) < 2:
        raise ValueError("importance factors need at least two monitors")
    if any(r < 0 for r in reputations):
        raise ValueError("reputations must be non-negative")
    total = math.fsum(reputations)
    if total <= 0:
        log.info("all monitor reputations are zero; using uniform importance factors")
        shares = [1.0 / len(reputations)] * len(reputations)
    else:
        shares = [r / total for r in reputations]
    return [min(1.0 - epsilon, max(epsilon, s)) for s in shares]


def report_to_bpa(verdict: Verdict, importance: float) -> Bpa:
    if verdict is Verdict.COOPERATIVE:
        return Bpa.binary(importance, 1.0 - importance)
    return Bpa.binary(1.0 - importance, importance)


def cif_exponents(ifs: Sequence[float], variant: FusionVariant) -> list[float]:
    if variant is FusionVariant.WORKED_EXAMPLE:
        return [f / (1.0 - f) for f in ifs]
    out = []
    for i, f in enumerate(ifs):
        rest = math.fsum(g for j, g in enumerate(ifs) if j != i)
        out.append(f / rest)
    return out


@dataclass(frozen=True)
class CifResult:
    """Raw (pre-normalization) collective masses and the normalized Bpa."""

    raw_cooperative: float
    raw_selfish: float
    bpa: Bpa


def cif_combine(reports: Sequence[tuple[Verdict, float]],
                variant: FusionVariant = FusionVariant.WORKED_EXAMPLE) -> CifResult:
    if len(reports) < 2:
        raise DegenerateEvidenceError("collective fusion needs at least two reports")
    ifs = [f for _, f in reports]
    for f in ifs:
        _check_if(f)
    expo = cif_exponents(ifs, variant)
    bpas = [report_to_bpa(v, f) for v, f in reports]
    raw = {}
    for ev in (C, S):
        terms = sorted(b[ev] ** e for b, e in zip(bpas, expo))
        raw[ev] = math.fsum(terms) - math.prod(terms)
    total = raw[C] + raw[S]
    if total <= 0.0:
        raise DegenerateEvidenceError("collective masses vanish")
    return CifResult(raw[C], raw[S], Bpa.binary(raw[C] / total, raw[S] / total))


def cif_fuse(reports: Sequence[tuple[Verdict, float]],
             variant: FusionVariant = FusionVariant.WORKED_EXAMPLE) -> Bpa:
    return cif_combine(reports, variant).bpa


def classify(fused: Bpa) -> Verdict:
    """Cooperative when cooperative mass reaches one half; 0.5 exactly gets the benefit of the doubt."""
    return Verdict.COOPERATIVE if fused.cooperative >= 0.5 else Verdict.SELFISH
