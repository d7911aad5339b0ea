"""Distributional calculus for repeated integrals of principal-value poles."""
from .algebra import Affine, Poly
from .coeff import ONE, PI2, PiCoeff, coeff_add, coeff_mul, coeff_to_float, format_coeff, parse_coeff
from .dsl import format_expr, parse_affine, parse_expr
from .errors import (DeltaAtEndpoint, DeltaNotEvaluable, DomainError, IdenticalCenters, MissingDerivatives,
                     NonConvergent, NotSeparable, ParseError, PoleAtEndpoint, PoleOutsideInterval,
                     SingularEvaluation, ThresholdUndefined, UnsupportedIntegrand, VPCalcError)
from .expr import (Delta, DistExpr, DistTerm, Log, Mono, Pole, Smooth, Theta, const, delta, diff,
                   evaluate_pointwise, log_abs, mul_expr, normalize, poly_expr, smooth, structurally_equal,
                   subs, theta, vp)
from .integrate import (IntegrationResult, IntegrationSpec, integrate_delta, integrate_separable,
                        integrate_step, integrate_symbolic, integrate_vp_term, integrate_with_estimate,
                        repeated_integrate)
from .oracle import (QuadResult, bracket_term_cube, dilog, log_quad, multiple_integral_regular, pv_quad,
                     simplex_regular)
from .reduction import (canonicalize, canonically_equal, four_pole_closed_form, lift_degrees, reduce_in,
                        reduce_pair_general, reduce_pair_simple, reduce_product, three_pole_closed_form)
from .testfn import PolyTestFn, TestFn, WindowedPolyTestFn, constant_testfn, random_testfn

__all__ = [name for name in dir() if not name.startswith("_")]
