"""End-to-end pipeline: LP, kernel transform, rounding, and exact optimum."""

from __future__ import annotations

from dataclasses import dataclass

from .exact import MAX_EXACT_N, exact_opt
from .instance import GeneratorParams, Instance, generate
from .kernel import apply_kernel, gmssc_kernel, mlc_kernel
from .lp import FractionalSchedule, solve_gmssc_lp
from .rounding import CostReport, estimate_cost

DEFAULT_BETA = 2.043
DEFAULT_ALPHA = 2.0
CSV_HEADER = "seed,lp_obj,opt,rounded_mean,stderr,ratio_vs_lp,ratio_vs_opt"


@dataclass
class ExperimentRow:
    seed: int
    lp_obj: float
    opt: int | None
    rounded_mean: float
    stderr: float

    @property
    def ratio_vs_lp(self) -> float:
        return self.rounded_mean / self.lp_obj

    @property
    def ratio_vs_opt(self) -> float | None:
        return None if self.opt is None else self.rounded_mean / self.opt

    def csv(self) -> str:
        opt = "" if self.opt is None else str(self.opt)
        vs_opt = "" if self.opt is None else f"{self.ratio_vs_opt:.12g}"
        return (f"{self.seed},{self.lp_obj:.12g},{opt},{self.rounded_mean:.12g},"
                f"{self.stderr:.12g},{self.ratio_vs_lp:.12g},{vs_opt}")


def round_instance(
    instance: Instance,
    fractional: FractionalSchedule,
    trials: int,
    seed: int,
    beta: float = DEFAULT_BETA,
    alpha: float | None = None,
) -> CostReport:
    """Round with the beta kernel, or the alpha kernel when ``alpha`` is given."""
    spec = mlc_kernel(alpha, instance.n) if alpha is not None else gmssc_kernel(beta, instance.n)
    z = apply_kernel(spec, fractional.x, fractional.edge_x)
    return estimate_cost(z, instance, trials, seed)


def run_instance(
    instance: Instance,
    seed: int,
    trials: int = 2000,
    beta: float = DEFAULT_BETA,
    alpha: float | None = None,
    fractional: FractionalSchedule | None = None,
) -> ExperimentRow:
    fs = fractional or solve_gmssc_lp(instance)
    cost = round_instance(instance, fs, trials, seed, beta, alpha)
    opt = exact_opt(instance)[0] if instance.n <= MAX_EXACT_N else None
    return ExperimentRow(seed, fs.objective, opt, cost.total, cost.stderr)


def experiment_instances(n: int, m: int, seeds: int, base_seed: int = 0, s_max: int = 3) -> list[tuple[int, Instance]]:
    out = []
    for i in range(seeds):
        s = base_seed + i
        out.append((s, generate(GeneratorParams(n=n, m=m, s_min=1, s_max=min(s_max, n), seed=s))))
    return out
