"""Reputation incentives for selfish-node suppression in opportunistic IoT communities.

The protocol layer (weighting, election, payments, fusion, monitoring, ledger)
is usable on its own; ``sosnet.sim`` drives it in a discrete-event simulator.
"""
from .config import SweepSpec, parse_config
from .errors import (ConfigError, ConflictError, DegenerateEvidenceError, DegenerateInputError,
                     LedgerError, QuorumError, RoleError, SosError, UndefinedPaymentError)
from .fusion import Bpa, Verdict, cif_fuse, classify, ds_combine, eds_combine, importance_factors
from .model import (BehaviorKind, BehaviorPolicy, Bundle, FusionVariant, NodeProfile, Role,
                    ScenarioConfig, Standing, World, new_scenario)

__all__ = [
    "SweepSpec", "parse_config",
    "ConfigError", "ConflictError", "DegenerateEvidenceError", "DegenerateInputError",
    "LedgerError", "QuorumError", "RoleError", "SosError", "UndefinedPaymentError",
    "Bpa", "Verdict", "cif_fuse", "classify", "ds_combine", "eds_combine", "importance_factors",
    "BehaviorKind", "BehaviorPolicy", "Bundle", "FusionVariant", "NodeProfile", "Role",
    "ScenarioConfig", "Standing", "World", "new_scenario",
]
