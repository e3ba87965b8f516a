"""Capacitary estimates for the maximal solution of ``u_t - Δu + u^q = 0``."""

from .params import InvalidParameterError, Params, make_params

__all__ = ["InvalidParameterError", "Params", "make_params"]
__version__ = "0.1.0"
