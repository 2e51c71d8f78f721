"""Weak-norm distances between signed measures and normal-approximation error bounds.

Measures are finite mixtures of point masses and Gaussians, so convolution
powers, distribution functions and most norms are computed exactly.
"""

from .bounds import (LawContext, katz_bound, lyapunov_katz, senatov_bound, thm11_bound, thm12a_bound,
                     thm12b_bound, xi_delta)
from .constants import NamedConstant, all_constants, c_of_lambda, optimize_c
from .errors import BadParams, GapNotReached, ResourceCap, ZetaCLTError
from .families import LawFamily, contaminated_normal, lattice_uniform, q_t, rademacher, sharpness_2327, two_point
from .gfun import Clip, ClipSlope, GFun, Min, MinIdPower, Power, Scaled, normalize, parse_g, primitive
from .measure import (SignedMeasure, convolve, dirac, discrete, moments, normal, nu, nu_mg, power, scale,
                      standardize, variation_nu0)
from .metrics import kolmogorov, zeta1_exact, zeta2delta_interval, zeta_lower_testfn, zeta_upper
from .report import BoundReport, EstimateInterval
from .zeta_lp import DualCertificate, GridSpec, lp_lower, lp_sandwich, zeta1_lp

__version__ = "0.1.0"
