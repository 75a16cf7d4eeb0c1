"""Choquet integration, nonlinear (sublinear, monotone) operator families and
Korovkin-type convergence experiments."""

from .exceptions import (ConfigurationError, DomainError, EvaluationError,
                         InvalidDistortionError, KorovkinLabError, PreconditionError,
                         QuadratureWarning, StructuralError)
from .reports import PropertyReport
from .capacity import (Capacity, Distortion, MeasurableSet, check_capacity_axioms,
                       counting_capacity, distorted_capacity, lebesgue, lebesgue_capacity,
                       sqrt_lebesgue)
from .fields import DomainSpec, ScalarField
from .choquet import (DEFAULT_CONFIG, QuadratureConfig, choquet_integral_1d,
                      choquet_integral_2d_iterated, discrete_choquet)
from .operators import (FAMILIES, AxiomProfile, FiniteSequence, OperatorFamily,
                        bernstein_basis, bkc1_apply, bkc2_apply, gauss_weierstrass_apply,
                        gauss_weierstrass_normalizer, make_family, maxprod_simplex_apply,
                        poss_durrmeyer_apply, poss_kantorovich_apply,
                        sequence_operator_apply, truncated_bernstein_apply)
from .opalgebra import (FunctionGenerator, axiom_matrix, check_axiom, check_holder, compose,
                        holder_trials, operator_norm_estimate, profile_mismatches,
                        sup_combinator)
from .korovkin import (ConvergenceReport, SeparatingFn, ShiftedFamily, TestSet, build_test_set,
                       check_separating, rate_bound, run_harness, shift_trick, squared_distance,
                       theorem3_bound_check, verify_rate_bound)
from .experiment import ExperimentConfig, ReportFile, emit_report, run_experiment

__version__ = "0.1.0"
