"""Verification lab for two deterministic time-inconsistent control models.

Exact rational arithmetic throughout: a dyadic switching schedule with a
two-valued kernel, the backward cost pair it drives, spike-variation
equilibrium tests, strict-dominance certification, a precommitted-value
optimizer on the breakpoint polytope, and an absolute-deviation model
where the naive strategy is dominated.
"""

__version__ = "0.1.0"

from .control import PiecewiseControl, Segment, alpha_hat, concat, constant, evaluate, zero_control
from .dynamics import (
    LipschitzPath,
    Trajectory,
    build_trajectory,
    cost_J,
    path_to_control,
    self_energy,
    to_path,
    y1,
    y2,
    y2_numeric,
)
from .equilibrium import (
    SpikeProbe,
    first_order_coeff,
    necessary_condition_check,
    perturbed_cost,
    spike_probe,
    spike_rate,
    verify_equilibrium,
)
from .errors import AdmissibilityError, ConfigurationError, DomainError, ShapeError
from .naive import (
    DeviationKernel,
    cost_naive_J,
    dominating_strategy,
    inconsistency_check,
    naive_strategy,
    pointwise_optimal,
)
from .pareto import DominanceReport, dominance_check, y1_hat_closed, y2_hat_closed
from .precommit import (
    InconsistencyWitness,
    OptimizationResult,
    QuadraticObjective,
    inconsistency_witness,
    maximize_F,
    objective_F,
    tail_bound,
)
from .report import VerificationReport
from .schedule import DyadicSchedule, KernelC, dyadic_grid, kernel_value, locate

__all__ = [
    "AdmissibilityError",
    "ConfigurationError",
    "DeviationKernel",
    "DomainError",
    "DominanceReport",
    "DyadicSchedule",
    "InconsistencyWitness",
    "KernelC",
    "LipschitzPath",
    "OptimizationResult",
    "PiecewiseControl",
    "QuadraticObjective",
    "Segment",
    "ShapeError",
    "SpikeProbe",
    "Trajectory",
    "VerificationReport",
    "alpha_hat",
    "build_trajectory",
    "concat",
    "constant",
    "cost_J",
    "cost_naive_J",
    "dominance_check",
    "dominating_strategy",
    "dyadic_grid",
    "evaluate",
    "first_order_coeff",
    "inconsistency_check",
    "inconsistency_witness",
    "kernel_value",
    "locate",
    "maximize_F",
    "naive_strategy",
    "necessary_condition_check",
    "objective_F",
    "path_to_control",
    "perturbed_cost",
    "pointwise_optimal",
    "self_energy",
    "spike_probe",
    "spike_rate",
    "tail_bound",
    "to_path",
    "verify_equilibrium",
    "y1",
    "y1_hat_closed",
    "y2",
    "y2_hat_closed",
    "y2_numeric",
    "zero_control",
]
