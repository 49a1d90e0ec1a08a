"""Kernel-based LP rounding for generalized min-sum set cover."""

from .analysis import check_cz_bound, check_jump_claim, edge_diagnostics, gmssc_ratio, minimize_ratio, mlc_check, mlc_ratio
from .errors import GmsscError
from .exact import exact_opt, greedy_mssc, random_schedule, schedule_cost
from .instance import Edge, GeneratorParams, Instance, generate, read_instance, write_instance
from .kernel import KernelSpec, apply_kernel, gmssc_kernel, mlc_kernel
from .lp import FractionalSchedule, solve_gmssc_lp
from .rounding import alpha_point_round, cover_times, estimate_cost
from .tail_bounds import binomial_tail, p_k_bound, poisson_binomial_cdf, verify_dominance, verify_tail_quantities

__version__ = "0.1.0"

__all__ = [
    "Edge", "FractionalSchedule", "GeneratorParams", "GmsscError", "Instance", "KernelSpec",
    "alpha_point_round", "apply_kernel", "binomial_tail", "check_cz_bound", "check_jump_claim",
    "cover_times", "edge_diagnostics", "estimate_cost", "exact_opt", "generate", "gmssc_kernel",
    "gmssc_ratio", "greedy_mssc", "minimize_ratio", "mlc_check", "mlc_kernel", "mlc_ratio",
    "p_k_bound", "poisson_binomial_cdf", "random_schedule", "read_instance", "schedule_cost",
    "solve_gmssc_lp", "verify_dominance", "verify_tail_quantities", "write_instance",
]
