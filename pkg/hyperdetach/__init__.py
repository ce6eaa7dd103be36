"""
Hypergraph Detachment Toolkit
Fair vertex splitting of hinge hypergraphs and factorizations of complete designs
"""

__version__ = "0.1.0"

import os
from enum import Enum


class PipelineState(Enum):
    """State machine states for the factorization pipeline"""
    IDLE = "idle"
    CHECK = "check"
    SOLVE = "solve"
    COLOR = "color"
    DETACH = "detach"
    EXPAND = "expand"
    VERIFY = "verify"
    COMPLETE = "complete"
    REFUSED = "refused"


class DetachConfig:
    """Central configuration for the detachment toolkit"""

    # Oracles
    BRUTE_FORCE_MAX_GROUND = 22

    # Random detachment instances
    MAX_VERTICES = 6
    MAX_EDGES = 40
    MAX_HINGES_PER_EDGE = 4
    MAX_COLORS = 4
    MAX_NUMBER = 4

    # Random laminar instances
    LAMINAR_MAX_GROUND = 18
    LAMINAR_MAX_SETS = 12
    LAMINAR_MAX_PARTS = 6

    # Suites
    LAMINAR_SUITE_SIZE = 1000
    DETACHMENT_SUITE_SIZE = 500
    AUDIT_SUITE_SIZE = 100
    SUITE_N_JOBS = -1

    # Fresh vertex ids are "<alpha><sep><counter>"
    VERTEX_ID_SEPARATOR = "~"

    # Audits
    AUDIT_ENV_VAR = "HYPERDETACH_AUDIT"

    @classmethod
    def audit_enabled(cls) -> bool:
        """True when the audit environment variable is switched on"""
        value = os.environ.get(cls.AUDIT_ENV_VAR, "")
        return value.strip().lower() in ("1", "true", "yes")


__all__ = ['PipelineState', 'DetachConfig']
