"""Driven Kerr cavity coupled to a waveguide at two separated points.

Subpackages: ``model`` (parameters and phases), ``scattering_one`` and
``scattering_two`` (photon scattering), ``lindblad`` (master equation at
phi = +-pi/2) and ``sweep`` (config files, grids, CLI).
"""
__version__ = "0.1.0"

from .errors import GiantWGError  # noqa: E402
from .model import Direction, DriveConfig, NumericalControls, SystemParams  # noqa: E402

__all__ = ["__version__", "Direction", "DriveConfig", "GiantWGError", "NumericalControls",
           "SystemParams"]
