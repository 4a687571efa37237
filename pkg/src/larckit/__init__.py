"""Controllability checks for bilinear quantum control systems at finite truncation."""

__version__ = "0.1.0"

from .config import Tolerances  # noqa: E402
from .linop import ControlSchedule, ControlSystem, herm_exp, propagate  # noqa: E402
from .spectral import (DriftSpectrum, check_rational_independence, group_degenerate,  # noqa: E402
                       spectrum_from_eigenvalues, spectrum_from_matrix)

__all__ = [
    "ControlSchedule", "ControlSystem", "DriftSpectrum", "Tolerances", "check_rational_independence",
    "group_degenerate", "herm_exp", "propagate", "spectrum_from_eigenvalues", "spectrum_from_matrix",
]
