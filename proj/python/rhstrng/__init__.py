"""Simulator for read-and-invert MTJ true random number generators."""

from ._rhstrng import *  # noqa: F401,F403
from ._rhstrng import __doc__  # noqa: F401

__version__ = "0.1.0"
