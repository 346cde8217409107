"""Structural-method ODE integrators: SK(K,R) multi-derivative R-block schemes."""
from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [n for n in dir() if not n.startswith("_")]
