"""``gdp-evalues`` command line.

Exit codes: 0 success, 1 invalid arguments or input, 2 file-system errors.
Every ``--out`` file is accompanied by ``<out>.manifest.json``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .aggregation import compose
from .audit import AUDIT_HEADER, AuditConfig, violation_report
from .calibration import calibrate, power_profile
from .ebh import descending_order, ebh
from .errors import DomainError
from .experiments import (
    RESULT_HEADER,
    SWEEPS,
    LambdaRule,
    MultiTestConfig,
    SingleTestConfig,
    mu_from_epsilon,
    run_gwas,
    run_multi_sweep,
    run_single_test_sweep,
)
from .io import (
    RunManifest,
    format_csv,
    format_evalue_csv,
    parse_evalue_csv,
    parse_gwas_tsv,
    write_output,
)
from .mechanism import all_noisy_privatize, check_delta, check_mu, privatize
from .peeling import AdaptiveConfig, PeelingConfig, peel_adaptive, peel_fixed
from .rng import RngSeed

DEFAULT_SWEEP_GRIDS = {
    "delta": (-4.0, -3.0, -2.0, -1.0),
    "m1": (50, 100, 150, 200, 250, 300),
    "eta": (2.0, 3.0, 4.0, 5.0, 6.0, 7.0),
    "epsilon": (0.1, 0.25, 0.5, 1.0, 1.5),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an integer in [0, 2^64)")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _manifest(command: str, args: argparse.Namespace) -> RunManifest:
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("func", "command", "seed")}
    return RunManifest(command=command, config=config,
                       seed=getattr(args, "seed", None), tool_version=__version__)


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def cmd_calibrate(args) -> int:
    cal = calibrate(args.alpha, args.delta, args.mu)
    prof = power_profile(cal)
    rows = [("z_star", cal.z_star), ("c_star", cal.c_star), ("log_c_star", cal.log_c_star),
            ("branch", cal.branch.value), ("g_max", prof.g_max), ("x_opt", prof.x_opt),
            ("shift_neg_prob", prof.shift_neg_prob)]
    text = format_csv(("key", "value"), rows)
    sys.stdout.write(text)
    if args.out:
        write_output(args.out, text, _manifest("calibrate", args))
    return 0


def cmd_privatize(args) -> int:
    check_mu(args.mu)
    check_delta(args.delta)
    table = parse_evalue_csv(_read(args.input))
    seed = RngSeed(args.seed)
    if args.all_noisy:
        values = all_noisy_privatize(table.values, args.delta, args.mu, seed).values
        total = args.mu
    else:
        # each coordinate is a separate release; the budgets compose
        values = [privatize(e, args.delta, args.mu, seed.child(i)).value
                  for i, e in enumerate(table.values)]
        total = compose([args.mu] * len(values))
    write_output(args.out, format_evalue_csv(table.indices, values),
                 _manifest("privatize", args))
    print(f"total_mu,{total!r}")
    return 0


def cmd_peel(args) -> int:
    check_mu(args.mu)
    check_delta(args.delta, positive=True)
    if args.mode == "fixed":
        if args.s is None:
            raise DomainError("--s is required for --mode fixed")
        acfg = None
    else:
        if args.mu0 is None:
            raise DomainError("--mu0 is required for --mode adaptive")
        acfg = AdaptiveConfig(args.s_min, args.mu0, args.alpha)
        if not args.mu0 < args.mu:
            raise DomainError("--mu0 must be smaller than --mu")
    table = parse_evalue_csv(_read(args.input))
    seed = RngSeed(args.seed)
    if acfg is None:
        vec = peel_fixed(table.values, PeelingConfig(args.s, args.delta, args.mu), seed)
    else:
        vec = peel_adaptive(table.values, acfg, args.delta, args.mu, seed)
    manifest = _manifest("peel", args)
    write_output(args.out, format_evalue_csv(table.indices, vec.values), manifest)
    if vec.margins is not None:
        # only the noisy margins are a private release
        margins = format_csv(("k", "q_noisy"),
                             zip(vec.margins.grid, (float(q) for q in vec.margins.q_noisy)))
        write_output(str(args.out) + ".margins.csv", margins, manifest)
    print(f"selected,{vec.s}")
    return 0


def cmd_ebh(args) -> int:
    table = parse_evalue_csv(_read(args.input))
    report = ebh(table.values, args.alpha)
    print(f"k_star,{report.k_star}")
    if args.out:
        values = np.asarray(table.values)
        order = [int(j) for j in descending_order(values)[: report.k_star]]
        text = format_evalue_csv([table.indices[j] for j in order], values[order])
        write_output(args.out, text, _manifest("ebh", args))
    return 0


def cmd_simulate(args) -> int:
    if args.experiment == "single":
        kwargs = {"lambda_rule": LambdaRule(args.lambda_rule)}
        if args.log10_delta_grid is not None:
            kwargs["log10_delta_grid"] = tuple(args.log10_delta_grid)
        cfg = SingleTestConfig(mu=args.mu if args.mu is not None else 0.25, alpha=args.alpha,
                               trials=20_000 if args.trials is None else args.trials, **kwargs)
        rows = run_single_test_sweep(cfg, RngSeed(args.seed))
    else:
        if args.mu is not None and args.epsilon is not None:
            raise DomainError("give at most one of --mu and --epsilon")
        mu = args.mu if args.mu is not None else mu_from_epsilon(
            args.epsilon if args.epsilon is not None else 0.5, args.delta_dp)
        rho = args.rho if args.rho is not None else (0.3 if args.experiment == "multi-corr"
                                                      else 0.0)
        if args.experiment == "multi-indep" and rho != 0.0:
            raise DomainError("multi-indep requires rho = 0")
        cfg = MultiTestConfig(m=args.m, m1=args.m1, eta_alt=args.eta_alt, rho=rho,
                              alpha=args.alpha, delta=args.delta, mu=mu, s_fixed=args.s,
                              mu0_fraction=args.mu0_fraction, s_min=args.s_min,
                              trials=200 if args.trials is None else args.trials, delta_dp=args.delta_dp)
        if args.grid is not None:
            grid = args.grid
        elif args.sweep == "delta":
            grid = [math.log10(cfg.delta)]
        else:
            grid = list(DEFAULT_SWEEP_GRIDS[args.sweep])
        rows = run_multi_sweep(cfg, args.sweep, grid, cfg.trials, RngSeed(args.seed))
    text = format_csv(RESULT_HEADER, ((r.method, r.sweep_param, r.sweep_value, r.metric,
                                       r.value, r.se, r.trials, r.seed) for r in rows))
    write_output(args.out, text, _manifest("simulate", args))
    return 0


def cmd_audit(args) -> int:
    cfg = AuditConfig(gamma=args.gamma, n_grid=tuple(args.n_grid), mu=args.mu,
                      trials=args.trials, noise=args.noise, delta=args.delta,
                      claimed_mu=args.claimed_mu)
    rows = violation_report(cfg, RngSeed(args.seed))
    text = format_csv(AUDIT_HEADER, ((cfg.noise.value, r.n, r.p_error, r.se, r.g_mu_at_p,
                                      r.violation) for r in rows))
    write_output(args.out, text, _manifest("audit-selection", args))
    return 0


def cmd_gwas(args) -> int:
    check_mu(args.mu)
    check_delta(args.delta, positive=True)
    if not 0.0 < args.mu0_fraction < 1.0:
        raise DomainError("--mu0-fraction must lie in (0, 1)")
    if args.s < 1 or args.s_min < 1:
        raise DomainError("--s and --s-min must be positive")
    for a in args.alpha_grid:
        if not 0.0 < a < 1.0:
            raise DomainError(f"alpha {a!r} is outside (0, 1)")
    records = parse_gwas_tsv(_read(args.input))
    acfg = AdaptiveConfig(args.s_min, args.mu0_fraction * args.mu, args.alpha_grid[0])
    rows = run_gwas([r.z for r in records], args.alpha_grid, args.mu, args.delta, args.s,
                    acfg, RngSeed(args.seed))
    text = format_csv(RESULT_HEADER, ((r.method, r.sweep_param, r.sweep_value, r.metric,
                                       r.value, r.se, r.trials, r.seed) for r in rows))
    write_output(args.out, text, _manifest("gwas", args))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gdp-evalues",
                     description="Gaussian-DP e-values: calibration, peeling, e-BH and audits.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("calibrate", help="calibrated rejection threshold")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("privatize", help="canonical release of e-values")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--all-noisy", action="store_true",
                   help="split mu across all coordinates (mu/sqrt(m) each)")
    p.set_defaults(func=cmd_privatize)

    p = sub.add_parser("peel", help="private peeling")
    p.add_argument("--mode", choices=("fixed", "adaptive"), required=True)
    p.add_argument("--s", type=int)
    p.add_argument("--s-min", type=int, default=50)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--mu0", type=float)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_peel)

    p = sub.add_parser("ebh", help="e-BH procedure")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ebh)

    p = sub.add_parser("simulate", help="Monte-Carlo experiments")
    p.add_argument("--experiment", choices=("single", "multi-indep", "multi-corr"),
                   required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mu", type=float)
    p.add_argument("--lambda-rule", choices=[r.value for r in LambdaRule],
                   default=LambdaRule.SQRT_LOG.value)
    p.add_argument("--log10-delta-grid", type=_float_list,
                   help="comma-separated; write --log10-delta-grid=-3,-2 for negative values")
    p.add_argument("--sweep", choices=SWEEPS, default="delta")
    p.add_argument("--grid", type=_float_list,
                   help="comma-separated sweep values (log10 delta for --sweep delta)")
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--m1", type=int, default=20)
    p.add_argument("--eta-alt", type=float, default=4.0)
    p.add_argument("--rho", type=float)
    p.add_argument("--delta", type=float, default=5e-3)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta-dp", type=float, default=1e-3)
    p.add_argument("--s", type=int, default=500)
    p.add_argument("--s-min", type=int, default=50)
    p.add_argument("--mu0-fraction", type=float, default=0.1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit-selection", help="privacy audit of noisy-max selection")
    p.add_argument("--noise", choices=("gaussian", "gumbel"), required=True)
    p.add_argument("--n-grid", type=_int_list, default=[100, 1000, 10000, 100000])
    p.add_argument("--gamma", type=float, default=0.49)
    p.add_argument("--mu", type=float, default=1.0 / math.sqrt(2.0))
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--claimed-mu", type=float)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("gwas", help="discoveries on GWAS z-scores")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--alpha-grid", type=_float_list, default=[0.01, 0.05, 0.1])
    p.add_argument("--mu", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=5e-3)
    p.add_argument("--s", type=int, default=500)
    p.add_argument("--s-min", type=int, default=50)
    p.add_argument("--mu0-fraction", type=float, default=0.1)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gwas)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"gdp-evalues {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"gdp-evalues {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
