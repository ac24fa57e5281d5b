"""Random-waypoint mobility on a rectangle, stepped at a fixed interval."""
from __future__ import annotations

import numpy as np


class RandomWaypoint:
    """Every node pauses ``pause_time`` seconds, then walks to a uniform waypoint at a uniform speed.

    Nodes begin with a pause, so ``pause_time >= duration`` pins the topology.
    """

    def __init__(self, xy: np.ndarray, area: tuple[float, float], speed: tuple[float, float],
                 pause_time: float, rng: np.random.Generator):
        self.xy = np.array(xy, dtype=float)
        self.area = np.asarray(area, dtype=float)
        self.speed_range = speed
        self.pause_time = float(pause_time)
        self.rng = rng
        n = len(self.xy)
        self.waypoint = self.xy.copy()
        self.speed = np.zeros(n)
        self.pause_left = np.full(n, self.pause_time)
        self._redraw(self.pause_left <= 0)

    def _redraw(self, mask: np.ndarray) -> None:
        k = int(mask.sum())
        if k == 0:
            return
        self.waypoint[mask] = self.rng.uniform((0.0, 0.0), self.area, size=(k, 2))
        lo, hi = self.speed_range
        self.speed[mask] = self.rng.uniform(lo, hi, size=k) if hi > lo else lo
        self.pause_left[mask] = 0.0

    def step(self, dt: float) -> np.ndarray:
        paused = self.pause_left > 0
        moving = ~paused
        vec = self.waypoint - self.xy
        dist = np.hypot(vec[:, 0], vec[:, 1])
        reach = self.speed * dt
        arrive = moving & (dist <= reach)
        walk = moving & ~arrive
        if walk.any():
            self.xy[walk] += vec[walk] * (reach[walk] / dist[walk])[:, None]
        self.xy[arrive] = self.waypoint[arrive]
        self.pause_left[arrive] = self.pause_time
        self.pause_left[paused] -= dt
        self._redraw((paused | arrive) & (self.pause_left <= 0))
        return self.xy


def distance_matrix(xy: np.ndarray) -> np.ndarray:
    diff = xy[:, None, :] - xy[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def adjacency(dist: np.ndarray, t_range: float) -> np.ndarray:
    adj = dist < t_range
    np.fill_diagonal(adj, False)
    return adj


def contact_set(xy: np.ndarray, t_range: float) -> set[tuple[int, int]]:
    """Unordered in-range pairs as (low id, high id)."""
    adj = adjacency(distance_matrix(xy), t_range)
    i, j = np.nonzero(np.triu(adj))
    return {(int(a), int(b)) for a, b in zip(i, j)}


def mobility_step(model: RandomWaypoint, dt: float, t_range: float) -> set[tuple[int, int]]:
    if dt <= 0:
        raise ValueError("dt must be positive")
    return contact_set(model.step(dt), t_range)
