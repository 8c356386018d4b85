"""Exact tools for partial spreads, divisible point sets, and size bounds
in finite projective geometry."""

__version__ = "0.1.0"

from . import errors  # noqa: F401
from .gf import field_new, extension_field, gaussian_binomial, matrix_representation  # noqa: F401
