"""Numerical laboratory for pseudo-differential operators on the torus.

The pieces most scripts need are re-exported here; the full surface
lives in the submodules (grid, dyadic, symbols, symexpr, quantize,
euclidean, metrics, models, probes, certify, runconfig, cli).
"""

from .certify import certify_corollary_m, certify_graded, certify_holder, envelope_scan
from .dyadic import DyadicSystem, besov_norm, holder_norm, holder_seminorm
from .grid import GridFunction, TorusGrid, angle_bracket, sample
from .models import gallery, gallery_names, q0_eps0
from .probes import band_probe, weierstrass
from .quantize import apply_multiplier, apply_toroidal
from .runconfig import load_config, run_config
from .symbols import CallableSymbol, multiplier, separable_symbol, tabulate
from .symexpr import parse_symbol

__version__ = "0.1.0"

__all__ = [
    "TorusGrid",
    "GridFunction",
    "sample",
    "angle_bracket",
    "DyadicSystem",
    "besov_norm",
    "holder_norm",
    "holder_seminorm",
    "CallableSymbol",
    "multiplier",
    "separable_symbol",
    "tabulate",
    "parse_symbol",
    "apply_toroidal",
    "apply_multiplier",
    "weierstrass",
    "band_probe",
    "certify_holder",
    "certify_graded",
    "certify_corollary_m",
    "envelope_scan",
    "gallery",
    "gallery_names",
    "q0_eps0",
    "load_config",
    "run_config",
    "__version__",
]
