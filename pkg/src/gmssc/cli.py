"""Command-line entry point: ``gmssc <subcommand> [flags]``.

Exit status is 0 on success, 1 when input validation or a numeric check
fails, and 2 on an unexpected internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, exact, experiment, instance, lp, tail_bounds
from .errors import GmsscError
from .kernel import apply_kernel, gmssc_kernel

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _order_line(order) -> str:
    return " ".join(str(v) for v in order)


# --- subcommands -----------------------------------------------------------


def cmd_gen(args) -> int:
    params = instance.GeneratorParams(n=args.n, m=args.m, s_min=args.s_min,
                                      s_max=args.s_max if args.s_max else min(3, args.n),
                                      rule=args.rule, seed=args.seed)
    text = instance.write_instance(instance.generate(params))
    _emit(text.rstrip("\n").split("\n"), args.out)
    return EXIT_OK


def cmd_lp(args) -> int:
    inst = instance.load(args.instance)
    fs = lp.solve_gmssc_lp(inst, tol=args.tol)
    if args.out:
        lp.save_solution(fs, args.out)
    print(f"{fs.objective:.12g}")
    return EXIT_OK


def cmd_round(args) -> int:
    inst = instance.load(args.instance)
    fs = lp.solve_gmssc_lp(inst, tol=args.tol)
    alpha = args.alpha if args.problem == "mlc" else None
    cost = experiment.round_instance(inst, fs, args.trials, args.seed, args.beta, alpha)
    if args.out:
        cost.save_csv(args.out)
    print(f"mean={cost.total:.12g} stderr={cost.stderr:.12g} lp={fs.objective:.12g}")
    return EXIT_OK


def cmd_exact(args) -> int:
    cost, order = exact.exact_opt(instance.load(args.instance))
    print(cost)
    if args.order:
        print(_order_line(order))
    return EXIT_OK


def cmd_greedy(args) -> int:
    inst = instance.load(args.instance)
    order = exact.greedy_mssc(inst)
    print(exact.schedule_cost(inst, order))
    print(_order_line(order))
    return EXIT_OK


def cmd_diagnose(args) -> int:
    inst = instance.load(args.instance)
    fs = lp.solve_gmssc_lp(inst, tol=args.tol)
    z = apply_kernel(gmssc_kernel(args.beta, inst.n), fs.x, fs.edge_x)
    diags = analysis.edge_diagnostics(inst, fs, z)
    report = analysis.check_cz_bound(diags, args.beta)
    _emit(report.csv_lines(), args.out)
    for d in diags:
        if not d.has_t_e:
            print(f"edge {d.edge}: no-t_e (z_e never reaches 1 within the horizon)", file=sys.stderr)
    if not report.ok:
        w = report.tightest
        print(f"lemma-violated: edge {w.edge} c_z={w.c_z:.12g} > bound {w.bound:.12g}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_experiment(args) -> int:
    alpha = args.alpha if args.problem == "mlc" else None
    target = analysis.mlc_ratio(args.alpha) if alpha is not None else analysis.gmssc_ratio(args.beta)
    lines = [experiment.CSV_HEADER]
    failures = []
    for s, inst in experiment.experiment_instances(args.n, args.m, args.seeds, args.seed):
        if alpha is not None:
            inst = instance.Instance(inst.n, [instance.Edge(e.vertices, len(e)) for e in inst.edges])
        row = experiment.run_instance(inst, s, args.trials, args.beta, alpha)
        lines.append(row.csv())
        if row.ratio_vs_lp > target + 3 * row.stderr / row.lp_obj:
            failures.append(s)
    _emit(lines, args.out)
    if failures:
        print(f"ratio exceeded {target:.6g} on seeds {failures}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    report = tail_bounds.verify_dominance(queries=args.trials, seed=args.seed, tol=args.tol)
    _emit(report.csv_lines(), args.out)
    ok = report.ok
    for k in range(2, 17):
        r = tail_bounds.verify_tail_quantities(k)
        ok &= r.ok
        print(f"k={k} R(eta)={r.r_at_eta:.12g} maxR={r.r_grid_max:.12g} "
              f"S(t0)={r.s_t0:.12g} stirling={r.stirling:.12g} ok={r.ok}", file=sys.stderr)
    for kind, row in report.violations:
        print(f"violation {kind}: k={row.k} n={row.n} seed={row.seed}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_ratio(args) -> int:
    if args.sweep:
        lo, hi, step = args.sweep
        curve = analysis.minimize_ratio(args.problem, lo, hi, step)
        print(f"min={curve.min:.12g} at={curve.argmin:.12g}")
        return EXIT_OK
    if args.problem == "gmssc":
        print(f"{analysis.gmssc_ratio(args.beta):.12g}")
    else:
        print(f"{analysis.mlc_ratio(args.alpha):.12g}")
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gmssc", description="LP rounding for generalized min-sum set cover.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text, *flags):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(fn=fn)
        if "instance" in flags:
            sp.add_argument("--instance", required=True, help="instance file (gmssc v1 format)")
        if "seed" in flags:
            sp.add_argument("--seed", type=_u64, default=0)
        if "beta" in flags:
            sp.add_argument("--beta", type=float, default=experiment.DEFAULT_BETA)
        if "alpha" in flags:
            sp.add_argument("--alpha", type=float, default=experiment.DEFAULT_ALPHA)
        if "problem" in flags:
            sp.add_argument("--problem", choices=("gmssc", "mlc"), default="gmssc")
        if "trials" in flags:
            sp.add_argument("--trials", type=int, default=2000)
        if "tol" in flags:
            sp.add_argument("--tol", type=float, default=lp.SEPARATION_TOL)
        if "out" in flags:
            sp.add_argument("--out", help="output path (stdout when omitted)")
        return sp

    g = add("gen", cmd_gen, "generate a random instance", "seed", "out")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--s-min", type=int, default=1)
    g.add_argument("--s-max", type=int, default=0, help="default min(3, n)")
    g.add_argument("--rule", choices=instance.RULES, default="uniform")

    add("lp", cmd_lp, "solve the LP relaxation and dump it", "instance", "tol", "out")
    add("round", cmd_round, "round the LP and write per-trial costs",
        "instance", "seed", "beta", "alpha", "problem", "trials", "tol", "out")
    e = add("exact", cmd_exact, "exact optimum by subset DP", "instance")
    e.add_argument("--order", action="store_true", help="also print an optimal order")
    add("greedy", cmd_greedy, "greedy schedule for k_e = 1", "instance")
    add("diagnose", cmd_diagnose, "per-edge c_z versus c_x report", "instance", "beta", "tol", "out")
    x = add("experiment", cmd_experiment, "pipeline over seeded random instances",
            "seed", "beta", "alpha", "problem", "trials", "out")
    x.add_argument("--n", type=int, default=8)
    x.add_argument("--m", type=int, default=6)
    x.add_argument("--seeds", type=int, default=10)
    v = add("verify-bounds", cmd_verify_bounds, "randomised tail-bound dominance check", "seed", "out")
    v.add_argument("--trials", type=int, default=10_000, help="number of queries")
    v.add_argument("--tol", type=float, default=1e-12)
    r = add("ratio", cmd_ratio, "approximation ratio for a parameter", "beta", "alpha", "problem")
    r.add_argument("--sweep", type=float, nargs=3, metavar=("LO", "HI", "STEP"))
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except (GmsscError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
