import dataclasses

import pytest

from sosnet.model import NodeProfile, ScenarioConfig, World


def make_world(positions, t_range=100.0, area=(500.0, 500.0), coeffs=(0.2,) * 5, **kw):
    """A hand-placed world: every node full of energy and buffer, cooperative."""
    cfg = ScenarioConfig(area=area, n_nodes=len(positions), t_range=t_range, weight_coeffs=coeffs, **kw)
    profiles = [NodeProfile(i, cfg.energy_init, cfg.energy_init, cfg.buffer_max, cfg.buffer_max,
                            (float(x), float(y))) for i, (x, y) in enumerate(positions)]
    return World(cfg, profiles, tuple(coeffs), [[] for _ in positions])


@pytest.fixture
def line_world():
    return make_world([(0, 0), (10, 0), (20, 0), (600, 0)], t_range=250.0, area=(1000.0, 1000.0))


@pytest.fixture
def small_config():
    return ScenarioConfig(n_nodes=20, sim_duration=60.0, election_period=30.0)


def replace(cfg, **kw):
    return dataclasses.replace(cfg, **kw)
