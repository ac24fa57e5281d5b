"""Relay forwarding decisions for each strategy, including the two simplified baselines."""
from __future__ import annotations

import enum

from ..model import BehaviorKind, Bundle, NodeId, NodeProfile
from ..weighting import buffer_ratio, energy_ratio


class Strategy(enum.Enum):
    SOS = "SOS"
    SSAR_LIKE = "SsarLike"
    CAIS_LIKE = "CaisLike"
    NO_INCENTIVE = "NoIncentive"


class Decision(enum.Enum):
    FORWARD = "Forward"
    DROP = "Drop"


class DropReason(enum.Enum):
    SELFISH = "Selfish"
    TTL_EXPIRED = "TtlExpired"
    BUFFER_FULL = "BufferFull"


SSAR_THRESHOLD = 0.3
CAIS_INITIAL_CREDIT = 3.0
CAIS_INTRA_CREDIT = 2.0
CAIS_INTER_CREDIT = 1.0


def policy_allows(relay: NodeProfile, bundle: Bundle, next_hop: NodeId) -> bool:
    """Forwarding as dictated by the relay's own behavior policy alone."""
    if relay.id == bundle.source:
        return True
    kind = relay.behavior.kind
    if kind is BehaviorKind.COOPERATIVE:
        return True
    if kind is BehaviorKind.SOCIALLY_SELFISH:
        return next_hop in relay.behavior.friend_set
    return False


def ssar_willingness(tie: float, next_hop: NodeProfile) -> float:
    return tie * min(buffer_ratio(next_hop), energy_ratio(next_hop))


class CaisCredit:
    """Per-node credit counters for the copy-adjustable baseline.

    A selfish relay carries a bundle only while the bundle's source can still pay.
    """

    def __init__(self, n: int, communities: list[int]):
        self.credit = [CAIS_INITIAL_CREDIT] * n
        self.communities = communities

    def solvent(self, source: NodeId) -> bool:
        return self.credit[source] > 0

    def settle(self, source: NodeId, relay: NodeId, next_hop: NodeId) -> None:
        if relay == source:
            return
        self.credit[source] -= 1.0
        same = self.communities[relay] == self.communities[next_hop]
        self.credit[relay] += CAIS_INTRA_CREDIT if same else CAIS_INTER_CREDIT


def forward_decision(relay: NodeProfile, bundle: Bundle, next_hop: NodeId, strategy: Strategy,
                     now: float | None = None, *, tie: float = 0.0,
                     next_profile: NodeProfile | None = None,
                     credit: CaisCredit | None = None) -> tuple[Decision, DropReason | None]:
    """Decide whether ``relay`` hands ``bundle`` to ``next_hop``.

    SOS and NoIncentive both read the relay's current policy; under SOS that
    policy may already have been rehabilitated by the punishment ladder.
    """
    if now is not None and now >= bundle.expires_at:
        return Decision.DROP, DropReason.TTL_EXPIRED
    if bundle.ttl_remaining <= 0:
        return Decision.DROP, DropReason.TTL_EXPIRED
    if policy_allows(relay, bundle, next_hop):
        return Decision.FORWARD, None
    if strategy is Strategy.SSAR_LIKE and next_profile is not None:
        if ssar_willingness(tie, next_profile) > SSAR_THRESHOLD:
            return Decision.FORWARD, None
    elif strategy is Strategy.CAIS_LIKE and credit is not None:
        if credit.solvent(bundle.source):
            return Decision.FORWARD, None
    return Decision.DROP, DropReason.SELFISH
