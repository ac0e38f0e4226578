"""Hoffman, calmness and related moduli of linear inequality systems ``a_t'x <= b_t``."""
from .calmness import (CalmnessReport, ClmSamplingResult, DFamily, EmptySamplerWarning, clm_at,
                       clm_sampling, d_family, end_set_finite, radial_sampler)
from .continuous import (BUILTINS, ContinuousSystem, GridSpec, Segment, UnknownBuiltin, builtin)
from .core import (DEFAULT_TOL_ACTIVE, DimensionMismatch, FiniteSystem, HoffmanError, IndexSubset,
                   InfeasiblePoint, InfeasibleSystem, Modulus, NormKind, NumericalFailure,
                   SizeLimit, active_set, argmax_set, box_system, residual, rhs_distance, slacks,
                   sup)
from .geometry import (HullDistanceResult, LpProblem, LpSolution, LpStatus, dual_distance_to_hull,
                       enumerate_independent_subsets, enumerate_vertices, project_to_polyhedron,
                       rank_and_rowspace, solve_lp, strict_system_witness)
from .hoffman_global import (GlobalHoffmanReport, hof_global, hof_global_exhaustive,
                             hof_global_grid)
from .lab import (FIXTURES, ModuliEstimates, SampledMultifunction, Schedule, UnknownFixture,
                  estimate_moduli, fixture, max_shift_kappa, polygon_fixture)
from .semilocal import (ChainReport, ChainViolation, SamplingEstimate, SemiLocalReport,
                        boundary_sampler, chain_check, hof_at, hof_at_sampling, indicator_rhs,
                        mc_ratio_sup, uniform_sampler)

__all__ = [name for name in dir() if not name.startswith("_")]
