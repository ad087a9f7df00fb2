"""Exact-rational toolkit for certifying non-distillability of secret correlations.

Everything is computed over arbitrary-precision rationals; there is no
floating point and no tolerance parameter anywhere.
"""

from .certifier import Certificate, certify, verify_certificate
from .families import MapFamily, MapPair, deterministic_family, random_filter_family, strip_pair
from .measures import (
    LambdaWitness,
    distillability_witness,
    estimate_lambda_max,
    lambda_advantage,
    secret_bit_fraction,
)
from .probvec import Axis, JointDist, LocalMap, apply_local, marginal, secret_bit, tensor

__all__ = [
    "Axis",
    "Certificate",
    "JointDist",
    "LambdaWitness",
    "LocalMap",
    "MapFamily",
    "MapPair",
    "apply_local",
    "certify",
    "deterministic_family",
    "distillability_witness",
    "estimate_lambda_max",
    "lambda_advantage",
    "marginal",
    "random_filter_family",
    "secret_bit",
    "secret_bit_fraction",
    "strip_pair",
    "tensor",
    "verify_certificate",
]

__version__ = "0.1.0"
