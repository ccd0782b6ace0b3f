"""B-spline Galerkin discretization of the Laplace eigenproblem with blended quadratures."""
from .assembly import assemble_1d, assemble_tensor, interior_stencil, stencil
from .dispersion import dispersion_curve, spectrum_curve, symbol, verify_closed_forms
from .eigensolve import solve_gevp, solve_tensor
from .errors import IgaError
from .estimator import effectivity_study, estimate, residual
from .harness import ef_error_study, ev_error_study, fit_order
from .quadrature import blend, gauss, lobatto, optimal_blend, parse_rule
from .series import (
    expand_dispersion,
    expand_spectrum,
    find_optimal_mass,
    find_optimal_tau,
)
from .splines import eval_basis, make_space

__version__ = "0.1.0"
