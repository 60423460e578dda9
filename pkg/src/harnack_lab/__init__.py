"""Numerical laboratory for Harnack inequalities of Ricci flow via canonical expanding solitons."""

__version__ = "0.1.0"

from . import tensors, geometry, dynamics, flows, soliton, cones, harnack  # noqa: E402,F401

__all__ = ["tensors", "geometry", "dynamics", "flows", "soliton", "cones", "harnack", "__version__"]
