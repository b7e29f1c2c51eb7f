"""Numerics for the weighted critical Hénon-type system and its synchronised bubbles."""

from .errors import (BlowUp, ConstraintViolation, DomainError, GridMismatch, GridTooCoarse,
                     HenonError, IoError, NoConvergence, NoPositiveRoot, NotASyncRoot,
                     NotProportional, NumericalFailure, SymmetryBreakingRegime, TailNotResolved,
                     VanishedSolution)
from .params import (CouplingSpec, ProblemParams, Regime, RegimeTag, classify_regime,
                     critical_exponent, felli_schneider, random_variational_spec,
                     symmetric_params, validate_params)
from .profile import RadialProfile
from .bubble import (BubbleParams, bubble_constant, bubble_profile, bubble_residual, bubble_value,
                     emden_fowler_bubble, hardy_sobolev_map, kelvin_transform)
from .coupling import SyncConstants, solve_sync_2, solve_sync_k, sync_residual
from .radial_ode import (InitialData, asymptotics, inversion_normalize, picard_solve, residual,
                         uniqueness_experiment)
from .groundstate import (CaseLabel, ground_energy, ground_state_report, minimize_f, regime_cases,
                          sharp_ckn_constant, vector_ckn_constant)
from .spectrum import linearized_decouple, nondegeneracy_check, radial_eigen
from .report import emit_report

__version__ = "0.1.0"
