"""Travelling phase-transition waves in FPU chains with a perturbed bi-quadratic potential."""
from .basewave import BaseWave, build_causal_wave, extend_family
from .corrector import SolveConfig, WaveSolution, fixed_point_solve, solve_with_shift
from .errors import WaveError
from .grid_ops import GridProfile
from .potentials import biased_family, shift_transform, smooth_sign_family
from .spectral import SymbolContext, find_kc

__all__ = [
    "BaseWave", "GridProfile", "SolveConfig", "SymbolContext", "WaveError", "WaveSolution",
    "biased_family", "build_causal_wave", "extend_family", "find_kc", "fixed_point_solve",
    "shift_transform", "smooth_sign_family", "solve_with_shift",
]
