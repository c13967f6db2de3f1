"""Numerics and exact algebra for a polynomial map of the sphere and its complexification."""

from .quadric_core import QuadricError, QuadricPoint, TAU, TAU_SQ, eval_jacobian, eval_map
from .fiber import fiber_of
from .certify import EllipseDomain, CertifyConfig, certify_lower_bound

__version__ = "0.1.0"
