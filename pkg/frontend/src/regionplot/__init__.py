"""Deterministic SVG views of region CSV/JSON artifacts."""

__version__ = "0.1.0"

from .cli import plot_regions
from .model import FrontierCurve, InputError, load_curve, load_metadata

__all__ = [
    "__version__",
    "plot_regions",
    "FrontierCurve",
    "InputError",
    "load_curve",
    "load_metadata",
]
