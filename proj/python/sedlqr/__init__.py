"""Spatially decaying LQR: Riccati solves, disturbance-response controllers,
decay certificates and truncation sweeps."""

from ._core import *  # noqa: F401,F403
from ._core import SedlqrError

__all__ = [name for name in dir() if not name.startswith("_")]
