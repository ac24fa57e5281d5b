"""Radio energy bookkeeping: power times airtime on each end of a link."""
from __future__ import annotations

from ..model import NodeProfile


def airtime(size_bytes: float, bitrate_kbps: float) -> float:
    return size_bytes * 8.0 / (bitrate_kbps * 1000.0)


def energy_account(sender: NodeProfile, receiver: NodeProfile, size_bytes: float,
                   bitrate_kbps: float, tx_power: float, rx_power: float) -> tuple[float, float]:
    """Charge one transmission. Returns the (sender, receiver) energy actually spent; floors at zero."""
    t = airtime(size_bytes, bitrate_kbps)
    spent_tx = min(sender.energy_now, tx_power * t)
    spent_rx = min(receiver.energy_now, rx_power * t)
    sender.energy_now -= spent_tx
    receiver.energy_now -= spent_rx
    return spent_tx, spent_rx
