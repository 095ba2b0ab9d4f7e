"""Numerical toolkit for weighted interpolation inequalities of
Caffarelli-Kohn-Nirenberg type: parameter transforms and the stability
region, closed-form optimizers and best radial constants, quotient
minimization on the cylinder, spectral stability thresholds, the
fast-diffusion flow, and verification of the underlying pointwise and
integral identities."""

__version__ = "0.1.0"

from .errors import DomainError, NumericsError
from .params import (CknParams, DerivedParams, Region, a_critical, b_fs, derive,
                     from_lambda_p, lambda_fs, to_ab, two_star)
from .profiles import (RadialProfile, SelfSimilar, Soliton, dilation_change,
                       dilation_change_inverse, emden_fowler, emden_fowler_inverse,
                       eval_radial, eval_radial_w, eval_self_similar, eval_soliton,
                       eval_soliton_deriv, normalized_radial, radial_constant,
                       self_similar_from_profile)
from .grids import BoxGrid, CylinderGrid, Field, RadialGrid, load_field, save_field, sphere_volume
from .sphere import SphereGrid
from .operators import (covariant_hessian, cylinder_operator, d_z, d_zz,
                        grad_sphere_sq, grad_weighted_sq, integrate, laplace_sphere, op_L)
from .functionals import (QuotientReport, cylinder_quotient, el_residual_cylinder,
                          el_residual_weighted, lp_norm_sq, pressure_functional,
                          sob_alpha_factor, weighted_quotient)
from .minimize import MinimizeResult, detect_breaking, minimize_quotient, omega_oscillation
from .spectrum import (ModeOperator, SpectrumResult, lowest_eigenvalue,
                       lowest_eigenvalue_exact, sphere_bifurcation, threshold_lambda)
from .flow import (FlowState, FlowTrace, djdt_identity, pressure_evolution_residual,
                   run, step)
from .identities import (IdentityReport, bochner_residual, lemma_first_residual,
                         lemma_second_check, sobolev_hessian_decomposition)
