"""Radial tumor equilibria, linearization spectrum and bifurcating branches."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
