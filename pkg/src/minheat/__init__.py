"""Heating-rate functionals of spontaneous-collapse models and the smearing
distributions that minimize them, plus the Fourier-space correlator algebra
of measurement-plus-feedback Newtonian gravity."""

from .errors import (DivergenceError, DomainTruncationError, InfiniteRateError,
                     InvalidProfileError, InvalidScaleError, InversionError,
                     MinheatError, PldUndefinedError, UnsupportedKindError,
                     UsageError)
from .functionals import (CSL, DP, FourierProfile, GRW, HeatingValue,
                          dirichlet_energy, dp_energy, dp_energy_coulomb,
                          evaluate_heating, fourier_radial, physical_heating_rate)
from .grids import RadialGrid
from .hybrid import (Correlator, gamma_g_from_gamma_c, general_heating,
                     heating_split, optimize_hybrid, pld_correlators, safe_k_max)
from .optimizer import (ConstraintSet, OptimizationResult, SolverOptions,
                        euler_lagrange_constants, gaussian_penalty, minimize,
                        solve_euler_lagrange)
from .params import ModelParams
from .decoherence import (DecoherenceCurve, OverlapK, closed_form_F, csl_curve,
                          grw_curve, hybrid_single_particle_curve, overlap_k,
                          pair_overlap, radial_convolution, radial_overlap,
                          rigid_body_rate, smear_density)
from .profiles import (CSL_OPTIMAL, ClosedFormProfile, DP_OPTIMAL, GAUSSIAN,
                       MassDensity, RadialProfile, check_constraints,
                       decreasing_rearrangement, load_profile, make_closed_form,
                       random_feasible_profile, rescale, save_profile, sqrt_profile)

__version__ = "0.1.0"
