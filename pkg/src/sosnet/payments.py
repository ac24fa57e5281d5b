"""Post-election reputation payments.

Each elected head earns ``votes * f_b * psi`` where ``psi`` is its own weight
plus the per-vote externality it imposes on the other candidates (computed by
re-running the tally with the head withdrawn). A cost share proportional to the
gap between the two strongest candidates is then deducted. Plain voters get a
flat participation credit instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Collection

from .election import ElectionRecord, tally_votes
from .errors import DegenerateInputError, RoleError, UndefinedPaymentError
from .model import NodeId


@dataclass(frozen=True)
class PaymentBreakdown:
    node: NodeId
    p_m: float
    psi: float
    c_s: float
    r_p: float


def counterfactual_tally(x: NodeId, record: ElectionRecord) -> dict[NodeId, int]:
    """Tally of the same voters with ``x`` withdrawn from the ballot."""
    rest = [c for c in record.candidates if c.id != x]
    return tally_votes(rest, record.voters)


def member_payment_psi(x: NodeId, record: ElectionRecord) -> float:
    votes = record.votes(x)
    if votes == 0:
        raise UndefinedPaymentError(f"node {x} received no votes")
    without = counterfactual_tally(x, record)
    others = [c for c in record.candidates if c.id != x]
    with_x = sum(c.weight * record.votes(c.id) for c in others)
    without_x = sum(c.weight * without.get(c.id, 0) for c in others)
    return record.candidate(x).weight + (without_x - with_x) / votes


def gross_payment(votes: int, f_b: float, psi: float) -> float:
    return votes * f_b * psi


def head_payment(x: NodeId, record: ElectionRecord, f_b: float) -> float:
    if x not in record.heads:
        raise RoleError(f"node {x} is not an elected head in round {record.round}")
    votes = record.votes(x)
    if votes == 0:
        return 0.0
    return gross_payment(votes, f_b, member_payment_psi(x, record))


def top_two_weights(record: ElectionRecord) -> tuple[float, float]:
    if len(record.candidates) < 2:
        raise DegenerateInputError("cost share needs at least two candidates")
    first, second = sorted((c.weight for c in record.candidates), reverse=True)[:2]
    return first, second


def cost_share_value(w_x: float, w_first: float, w_second: float,
                     votes: int, f_b: float, psi: float) -> float:
    if w_x <= 0:
        raise DegenerateInputError("cost share is undefined for a zero weight")
    return abs(w_first - w_second) / w_x * votes * f_b * psi


def cost_share(x: NodeId, record: ElectionRecord, f_b: float) -> float:
    w_first, w_second = top_two_weights(record)
    w_x = record.candidate(x).weight
    if w_x <= 0:
        raise DegenerateInputError(f"node {x} has zero weight")
    votes = record.votes(x)
    if votes == 0:
        return 0.0
    return cost_share_value(w_x, w_first, w_second, votes, f_b, member_payment_psi(x, record))


def reputation_delta(p_m: float, c_s: float) -> float:
    return p_m - c_s


def head_breakdown(x: NodeId, record: ElectionRecord, f_b: float) -> PaymentBreakdown:
    if x not in record.heads:
        raise RoleError(f"node {x} is not an elected head in round {record.round}")
    if record.votes(x) == 0:
        return PaymentBreakdown(x, 0.0, 0.0, 0.0, 0.0)
    psi = member_payment_psi(x, record)
    p_m = gross_payment(record.votes(x), f_b, psi)
    w_first, w_second = top_two_weights(record)
    c_s = cost_share_value(record.candidate(x).weight, w_first, w_second, record.votes(x), f_b, psi)
    return PaymentBreakdown(x, p_m, psi, c_s, reputation_delta(p_m, c_s))


def settle_heads(record: ElectionRecord, f_b: float) -> list[PaymentBreakdown]:
    return [head_breakdown(h, record, f_b) for h in record.heads]


def participation_payment(record: ElectionRecord, f_b: float,
                          expelled: Collection[NodeId] = ()) -> list[tuple[NodeId, float]]:
    heads = set(record.heads)
    return [(v, f_b) for v in record.voters if v not in heads and v not in expelled]
