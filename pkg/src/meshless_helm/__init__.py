"""Meshless solvers for Helmholtz, diffusion and wave problems.

Homogeneous parts use the method of fundamental solutions; source terms are
handled by particular solutions of radial-basis-function quasi-interpolants.
Time-dependent problems reduce to sequences of modified Helmholtz problems
through the Laplace transform (Stehfest inversion) or time differencing.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .analytic import diffusion_series, error_report, helm_exact, wave_series
from .drm import DrmSolver, HelmholtzProblem, MfsConfig, MpsConfig, solve_bvp
from .errors import (BesselOverflowError, ConfigError, DomainError, GeometryError,
                     MeshlessError, QuadratureError, RankDeficientError, SolverError,
                     UnsupportedFeatureError)
from .geometry import Ball, Circle, Disk, PolarStar, Rect, Sphere, lattice
from .rbf import Rbf
from .specialfn import WaveNumber, fundamental_solution
from .stehfest import HelmConfig, solve_diffusion_lt, solve_wave_lt
from .timestep import IbvpProblem, TimeScheme, march_diffusion, march_wave

__all__ = [
    "BACKEND", "Ball", "BesselOverflowError", "Circle", "ConfigError", "Disk", "DomainError",
    "DrmSolver", "GeometryError", "HelmConfig", "HelmholtzProblem", "IbvpProblem",
    "MeshlessError", "MfsConfig", "MpsConfig", "PolarStar", "QuadratureError",
    "RankDeficientError", "Rbf", "Rect", "SolverError", "Sphere", "TimeScheme",
    "UnsupportedFeatureError", "WaveNumber", "diffusion_series", "error_report",
    "fundamental_solution", "helm_exact", "lattice", "march_diffusion", "march_wave",
    "solve_bvp", "solve_diffusion_lt", "solve_wave_lt", "wave_series",
]
