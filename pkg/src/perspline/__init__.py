"""Periodic uniform B-splines: Gram systems, L2 projection and quasiinterpolation."""

from .bspline import (PeriodicSpline, SplineSpace, cardinal_bspline_eval, cardinal_bspline_fourier,
                      local_basis_values, periodic_basis_eval, spline_derivative, spline_eval)
from .circulant import (CirculantMatrix, SymmetricStencil, assemble_symmetric, demko_bound, eigenvalues,
                        inverse, matvec, multiply, shift_apply, solve, spectrum)
from .errors import (DifferentiationError, InvalidOrderError, NonPeriodicError, NotSymmetricError,
                     SingularMatrixError, SizeLimitError, SpectrumError, SplineError, StencilOverlapError)
from .functions import CORPUS_IDS, TestFunction, corpus_function, default_corpus
from .gram import (BandedTruncation, DecayCertificate, GramSystem, SymbolEvaluator, banded_truncation_inverse,
                   certify_decay, cosine_symbol, fit_decay, gram_stencil, gram_system, inverse_first_row,
                   decay_bound_constants, spectral_bounds, symbol_eval, weighted_gamma_sum)
from .projection import (ProjectionResult, QuadratureNotConverged, StabilityReport, binomial_alternating_sum,
                         derivative_power, difference_power, inverse_inequality_constant, l2_error, project,
                         rhs_moments, sobolev_seminorm, stability_report, sup_norm)
from .quasi import (QuasiCoefficients, quasi_error, quasi_interpolate, quasi_stability_report,
                    thomee_wendroff, tw_delta)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
