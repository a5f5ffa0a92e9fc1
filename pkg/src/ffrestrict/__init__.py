"""Finite-field restriction estimates for the 3-d paraboloid, computed exactly."""

from ffrestrict.ffield import FieldCtx, FieldError, get_field, parse_field

__version__ = "0.1.0"

__all__ = ["FieldCtx", "FieldError", "get_field", "parse_field", "__version__"]
