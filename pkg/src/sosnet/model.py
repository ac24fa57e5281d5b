"""Domain vocabulary: nodes, bundles, behavior policies and scenario configuration."""
from __future__ import annotations

import enum
import hashlib
import math
import struct
from dataclasses import dataclass, field, fields
from typing import TYPE_CHECKING

import numpy as np

from .errors import ConfigError

if TYPE_CHECKING:
    from .election import ElectionRecord

NodeId = int

# Seed-sequence stream indices; each purpose draws from its own stream so that
# strategy-specific randomness never perturbs mobility or traffic.
STREAM_PLACEMENT = 0
STREAM_SELFISH = 1
STREAM_COEFFS = 2
STREAM_MOBILITY = 3
STREAM_TRAFFIC = 4
STREAM_REHAB = 5
STREAM_FRIENDS = 6


class Role(enum.Enum):
    MEMBER = "Member"
    COMMUNITY_HEAD = "CommunityHead"
    MONITORING_HEAD = "MonitoringHead"
    INCENTIVE_HEAD = "IncentiveHead"
    GATEWAY = "Gateway"


HEAD_ROLES = (Role.COMMUNITY_HEAD, Role.MONITORING_HEAD, Role.INCENTIVE_HEAD)


class BehaviorKind(enum.Enum):
    COOPERATIVE = "Cooperative"
    INDIVIDUALLY_SELFISH = "IndividuallySelfish"
    SOCIALLY_SELFISH = "SociallySelfish"


@dataclass(frozen=True)
class BehaviorPolicy:
    kind: BehaviorKind = BehaviorKind.COOPERATIVE
    friend_set: frozenset[NodeId] = frozenset()

    @property
    def selfish(self) -> bool:
        return self.kind is not BehaviorKind.COOPERATIVE

    def check(self, owner: NodeId) -> None:
        if self.kind is BehaviorKind.SOCIALLY_SELFISH and not self.friend_set:
            raise ValueError("socially selfish policy needs a nonempty friend set")
        if owner in self.friend_set:
            raise ValueError("friend set must exclude the node itself")


COOPERATIVE = BehaviorPolicy()


class Standing(enum.IntEnum):
    """Rungs of the punishment ladder, in escalation order."""

    CLEAN = 0
    WARNED = 1
    NEGATIVE_PAID = 2
    EXPELLED = 3


@dataclass
class PunishmentState:
    state: Standing = Standing.CLEAN
    offense_count: int = 0
    debt: float = 0.0

    @property
    def expelled(self) -> bool:
        return self.state is Standing.EXPELLED


@dataclass
class NodeProfile:
    """Mutable per-node state.

    ``buffer_now`` is the *free* buffer space in bytes, so the buffer ratio
    reads as the remaining fraction like the energy ratio does.
    """

    id: NodeId
    energy_now: float
    energy_max: float
    buffer_now: float
    buffer_max: float
    position: tuple[float, float]
    contacts: int = 0
    reputation: float = 0.0
    role: Role = Role.MEMBER
    behavior: BehaviorPolicy = COOPERATIVE
    punishment: PunishmentState = field(default_factory=PunishmentState)

    @property
    def expelled(self) -> bool:
        return self.punishment.state is Standing.EXPELLED

    @property
    def depleted(self) -> bool:
        return self.energy_now <= 0.0


@dataclass
class Bundle:
    bundle_id: int
    source: NodeId
    destination: NodeId
    created_at: float
    ttl_total: float
    ttl_remaining: float
    size: int
    digest: int = 0
    hop_log: list[tuple[NodeId, float]] = field(default_factory=list)

    @classmethod
    def create(cls, bundle_id: int, source: NodeId, destination: NodeId,
               created_at: float, ttl: float, size: int) -> Bundle:
        b = cls(bundle_id, source, destination, created_at, ttl, ttl, size,
                hop_log=[(source, created_at)])
        b.digest = bundle_digest(b)
        return b

    @property
    def expires_at(self) -> float:
        return self.created_at + self.ttl_total

    def age_to(self, now: float) -> None:
        self.ttl_remaining = min(self.ttl_total, max(0.0, self.expires_at - now))


_DIGEST_LAYOUT = struct.Struct("<qqqq")


def bundle_digest(bundle: Bundle) -> int:
    """64-bit content digest over the bundle's identity fields.

    Stands in for message authentication: only equality matters.
    """
    raw = _DIGEST_LAYOUT.pack(bundle.bundle_id, bundle.source, bundle.destination, bundle.size)
    return int.from_bytes(hashlib.blake2b(raw, digest_size=8).digest(), "little")


class FusionVariant(enum.Enum):
    WORKED_EXAMPLE = "worked"
    EQ21_LITERAL = "eq21"


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario. Defaults follow the reference setup (50 nodes, 500 m square, 90 J)."""

    area: tuple[float, float] = (500.0, 500.0)
    n_nodes: int = 50
    t_range: float = 100.0
    energy_init: float = 90.0
    tx_power: float = 0.6
    rx_power: float = 0.3
    selfish_fraction: float = 0.0
    pause_time: float = 0.0
    sim_duration: float = 200.0
    cbr_rate: float = 1.0
    packet_size: int = 512
    header_size: int = 4
    bitrate_kbps: float = 250.0
    seed: int = 0
    fusion_variant: FusionVariant = FusionVariant.WORKED_EXAMPLE
    f_b: float = 1.0
    p_f: float = 1.0
    # None draws a seeded uniform point on the simplex once per scenario.
    weight_coeffs: tuple[float, float, float, float, float] | None = None
    buffer_max: float = 262144.0
    bundle_ttl: float = 100.0
    speed_min: float = 1.0
    speed_max: float = 5.0
    mobility_dt: float = 1.0
    election_period: float = 100.0
    window_length: float | None = None
    rehab_p: float = 0.8
    friend_set_size: int = 5
    nominee_pool: int | None = None
    rd_centrality: bool = True
    if_epsilon: float = 1e-6

    def validate(self) -> ScenarioConfig:
        if self.n_nodes < 1:
            raise ConfigError("n_nodes", "must be at least 1")
        if not 0.0 <= self.selfish_fraction <= 1.0:
            raise ConfigError("selfish_fraction", "must lie in [0, 1]")
        if len(self.area) != 2:
            raise ConfigError("area", "expects width,height")
        nonneg = ("t_range", "energy_init", "tx_power", "rx_power", "pause_time",
                  "sim_duration", "cbr_rate", "packet_size", "header_size",
                  "f_b", "p_f", "buffer_max", "speed_min")
        for name in nonneg:
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be non-negative")
        if min(self.area) < 0:
            raise ConfigError("area", "must be non-negative")
        for name in ("bitrate_kbps", "mobility_dt", "election_period", "bundle_ttl"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "must be positive")
        if self.speed_max < self.speed_min:
            raise ConfigError("speed_max", "must be >= speed_min")
        if self.window_length is not None and self.window_length <= 0:
            raise ConfigError("window_length", "must be positive")
        if not 0.0 <= self.rehab_p <= 1.0:
            raise ConfigError("rehab_p", "must lie in [0, 1]")
        if self.nominee_pool is not None and self.nominee_pool < 3:
            raise ConfigError("nominee_pool", "must be at least 3")
        if not 0.0 < self.if_epsilon < 0.5:
            raise ConfigError("if_epsilon", "must lie in (0, 0.5)")
        if self.weight_coeffs is not None:
            check_coeffs(self.weight_coeffs)
        return self

    @property
    def window(self) -> float:
        return self.window_length if self.window_length is not None else self.election_period

    @property
    def nominee_count(self) -> int:
        if self.nominee_pool is not None:
            return self.nominee_pool
        return max(3, math.ceil(self.n_nodes / 10))

    @property
    def diagonal(self) -> float:
        return math.hypot(*self.area)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def check_coeffs(coeffs, tol: float = 1e-9) -> tuple[float, ...]:
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) != 5:
        raise ConfigError("weight_coeffs", f"expected 5 coefficients, got {len(coeffs)}")
    if any(c < 0 for c in coeffs):
        raise ConfigError("weight_coeffs", "coefficients must be non-negative")
    if abs(sum(coeffs) - 1.0) > tol:
        raise ConfigError("weight_coeffs", f"coefficients sum to {sum(coeffs)!r}, not 1")
    return coeffs


def stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


@dataclass
class World:
    config: ScenarioConfig
    profiles: list[NodeProfile]
    coeffs: tuple[float, ...]
    carried: list[list[Bundle]]
    records: list[ElectionRecord] = field(default_factory=list)
    time: float = 0.0
    monitor_cursor: int = 0

    @property
    def n(self) -> int:
        return len(self.profiles)

    def profile(self, node: NodeId) -> NodeProfile:
        if not 0 <= node < len(self.profiles):
            raise KeyError(f"unknown node id {node}")
        return self.profiles[node]

    def positions(self) -> np.ndarray:
        return np.array([p.position for p in self.profiles], dtype=float).reshape(-1, 2)

    def eligible(self) -> list[NodeId]:
        """Node ids that may take part in elections: not expelled, not out of energy."""
        return [p.id for p in self.profiles if not p.expelled and not p.depleted]

    def heads(self) -> tuple[NodeId, NodeId, NodeId] | None:
        return self.records[-1].heads if self.records else None


def new_scenario(config: ScenarioConfig) -> World:
    config.validate()
    n = config.n_nodes
    w, h = config.area
    xy = stream(config.seed, STREAM_PLACEMENT).uniform((0.0, 0.0), (w, h), size=(n, 2))

    order = stream(config.seed, STREAM_SELFISH).permutation(n)
    n_selfish = math.floor(config.selfish_fraction * n + 1e-9)
    friends_rng = stream(config.seed, STREAM_FRIENDS)
    policies = [COOPERATIVE] * n
    for rank, node in enumerate(order[:n_selfish]):
        node = int(node)
        if rank % 2 == 0:
            policies[node] = BehaviorPolicy(BehaviorKind.INDIVIDUALLY_SELFISH)
        else:
            others = [i for i in range(n) if i != node]
            k = min(config.friend_set_size, len(others))
            if k == 0:
                policies[node] = BehaviorPolicy(BehaviorKind.INDIVIDUALLY_SELFISH)
                continue
            picked = friends_rng.choice(others, size=k, replace=False)
            policies[node] = BehaviorPolicy(BehaviorKind.SOCIALLY_SELFISH,
                                            frozenset(int(i) for i in picked))

    if config.weight_coeffs is not None:
        coeffs = check_coeffs(config.weight_coeffs)
    else:
        coeffs = tuple(float(c) for c in stream(config.seed, STREAM_COEFFS).dirichlet(np.ones(5)))

    profiles = [
        NodeProfile(
            id=i,
            energy_now=config.energy_init,
            energy_max=config.energy_init,
            buffer_now=config.buffer_max,
            buffer_max=config.buffer_max,
            position=(float(xy[i, 0]), float(xy[i, 1])),
            behavior=policies[i],
        )
        for i in range(n)
    ]
    return World(config=config, profiles=profiles, coeffs=coeffs, carried=[[] for _ in range(n)])
