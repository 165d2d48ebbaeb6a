"""Steady-state solutions of impulsively forced constant-coefficient ODEs
over a field of generalized scalars, with a mollifier-based numeric oracle.

The symbolic layers (scalars, genfunc, green, solver, circuits) manipulate
exact normal forms; the oracle layer instantiates everything at concrete
mollifier scales and integrates the regularized equations independently.
"""

__version__ = "0.1.0"

from .errors import (GenssError, IllConditioned, NotInvertibleHere,
                     NotReducible, OrderTooHigh, ParseError,
                     QuadratureFailure, SingularWronskian, StiffnessFailure,
                     UnsupportedConvolution, UnsupportedRegime)
from .exactnum import CNum
from .mollifier import MollifierSpec
from .scalars import (AsymptoticClass, Atom, GenScalar, LAM, S, classify,
                      delta_point, gs_arith, gs_from_complex, gs_invert,
                      numeric_eval_scalar, odd_cut_atom)
from .genfunc import (Dist, Kernel, convolve, differentiate, eval_at_zero,
                      eval_derivs_at_zero, render)
from .green import (GreenData, PolyOp, apply_operator, find_roots,
                    green_derivative, green_function, homogeneous_basis)
from .solver import (IVProblem, SolvabilityReport, Solution,
                     has_distributional_solution, residual,
                     solve_first_order, solve_ivp, wronskian_at_zero)
from .circuits import (CircuitSolution, CircuitSpec, Lightning, RodSolution,
                       Switch, build_ivp, rod_frequency, rod_rate,
                       solve_lightning_rod, steady_state_current)
from .oracle import (ConstantSweep, SweepConfig, VerifyReport,
                     estimate_constant, integrate_regularized,
                     mollifier_derivative, numeric_eval_dist, verify_solution)
from .dsl import (parse_forcing, parse_operator, parse_scalar, render_dist,
                  render_operator, render_scalar)

__all__ = [name for name in dir() if not name.startswith("_")]
