"""thickflow: compressible power-law fluids and their maximum-shear-rate limits.

Deterministic desk-scale solvers for three periodic systems (1D
non-stationary power-law, 2D semi-stationary transport-Stokes, 1D
singular-viscosity), plus diagnostics that verify the associated
a-priori estimates, parameter sweeps toward the constrained limit, and
a CLI harness with reproducible CSV/JSON artifacts.
"""

__version__ = "0.1.0"

from .grids import Grid1D, Grid2D, ddx_periodic, integrate, sym_grad_2d
from .powerlaw1d import PowerLawParams
from .semistationary2d import Stokes2DParams
from .singular1d import SingularParams
from .trajectory import State1D, State2D, Trajectory

__all__ = [
    "Grid1D", "Grid2D", "ddx_periodic", "integrate", "sym_grad_2d",
    "PowerLawParams", "SingularParams", "Stokes2DParams",
    "State1D", "State2D", "Trajectory", "__version__",
]
