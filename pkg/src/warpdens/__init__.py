"""Density estimation by warping an initial estimate with a diffeomorphism of [0, 1]."""

from .basis import BasisSet, make_basis, make_fourier, make_legendre
from .conditional import ConditionalConfig, ConditionalFit, estimate_conditional
from .density import DensityFunction, SupportBounds, kde_fit, truncated_normal_fit, turnbull_bounds, warp
from .grid import Grid
from .optimize import FitResult, Objective, fit_fixed_J, fit_multiresolution
from .sphere import WarpingFunction, gamma_of, transport_warping, warping_coefficients
from .unconditional import DensityEstimate, EstimateConfig, estimate_density, evaluate_estimate

__version__ = "0.1.0"
