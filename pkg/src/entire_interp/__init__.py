"""Exact staged construction of increasing entire interpolants.

Each stage is a polynomial with rational coefficients; the limit is entire,
strictly increasing on R, passes through a prescribed point and sends every
handled rational into (and pulls it back from) its own dense class.
"""

__version__ = "0.1.0"

from .dense_partition import DyadicValuationPartition, color, pick
from .exact_algebra import GaussianRational, Poly, RatInterval
from .growth_bounds import AlphaCertificate, GrowthFn, select_alpha
from .limit_eval import CertifiedBox, eval_limit, inverse_lookup, tail_bound
from .stage_builder import ConstructionConfig, StageRecord, run
from .verifier import VerificationReport, verify_document, verify_state

__all__ = [
    "AlphaCertificate",
    "CertifiedBox",
    "ConstructionConfig",
    "DyadicValuationPartition",
    "GaussianRational",
    "GrowthFn",
    "Poly",
    "RatInterval",
    "StageRecord",
    "VerificationReport",
    "color",
    "eval_limit",
    "inverse_lookup",
    "pick",
    "run",
    "select_alpha",
    "tail_bound",
    "verify_document",
    "verify_state",
]
