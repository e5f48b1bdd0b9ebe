"""Decorated equational logic for exceptions.

A small proof kernel for the decorated rules of exception effects, a
finite-model oracle deciding strong/weak equations by exhaustion, and the
dynamic-evaluation rank algorithm over Z/mZ.
"""

from exdec._core import *  # noqa: F401,F403
from exdec._core import __version__  # noqa: F401
