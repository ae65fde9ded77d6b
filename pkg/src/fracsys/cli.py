"""Command line interface: ``fracsys {solve,sweep,limit,selftest}``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import sys
from pathlib import Path

from . import checks, infinity
from .eigensolver import SolverError, init_cone, minimize_rayleigh
from .harness import (
    ConfigError,
    ExperimentConfig,
    load_config,
    run_sweep,
    write_fields,
    write_limit_json,
    write_sweep_outputs,
)

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (JSON)")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--seed", type=int, help="random seed (overrides config)")
    common.add_argument("--quiet", action="store_true", help="only print warnings and results")

    parser = argparse.ArgumentParser(prog="fracsys", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", parents=[common], help="first eigenpair for one p")
    solve.add_argument("--p", type=float, help="exponent (default: first p of the sweep)")
    sub.add_parser("sweep", parents=[common], help="ascending p sweep, writes sweep.csv")
    limit = sub.add_parser("limit", parents=[common], help="limit eigenvalue and extremal pair")
    for name in ("r", "s", "gamma"):
        limit.add_argument(f"--{name}", type=float, help=f"override fractional.{name}")
    sub.add_parser("selftest", parents=[common], help="randomized property suites")
    return parser


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.out:
        cfg.output.directory = args.out
    if args.seed is not None:
        cfg.solver.seed = args.seed
    overrides = {k: getattr(args, k, None) for k in ("r", "s", "gamma")}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        cfg.fractional = dataclasses.replace(cfg.fractional, **overrides)
        cfg.validate()
    return cfg


def cmd_solve(args, cfg: ExperimentConfig) -> int:
    p = args.p if args.p is not None else cfg.sweep[0]
    params = cfg.params(p)
    try:
        params.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    domain = cfg.build_domain()
    pair = minimize_rayleigh(domain, params, init_cone(domain, params), cfg.solver)
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    write_fields(pair, out)
    print(f"p               {p:g}")
    print(f"alpha, beta     {params.alpha:g}, {params.beta:g}")
    print(f"lambda          {pair.lam:.10g}")
    print(f"lambda^(1/p)    {math.exp(math.log(pair.lam) / p):.10g}")
    print(f"kkt (rel)       {pair.kkt_u:.3e}  {pair.kkt_v:.3e}")
    print(f"iterations      {pair.iterations}")
    print(f"converged       {pair.converged}")
    return EXIT_OK if pair.converged else EXIT_SOLVER


def cmd_sweep(args, cfg: ExperimentConfig) -> int:
    result = run_sweep(cfg)
    write_sweep_outputs(result, cfg.output.directory)
    print(f"{'p':>6} {'lambda^(1/p)':>14} {'Lambda_inf':>12} {'abs_err':>10} {'iters':>6} conv")
    for rec in result.records:
        print(f"{rec.p:6g} {rec.lambda_root:14.8f} {rec.lambda_inf:12.8f} {rec.abs_err:10.2e} "
              f"{rec.iterations:6d} {rec.converged}")
    print(f"limit residual at p={result.records[-1].p:g}: u {result.residual_u:.4g}, v {result.residual_v:.4g}")
    return EXIT_OK if all(r.converged for r in result.records) else EXIT_SOLVER


def cmd_limit(args, cfg: ExperimentConfig) -> int:
    domain = cfg.build_domain()
    f = cfg.fractional
    res = infinity.extremal_analysis(domain, f.gamma, f.r, f.s)
    ru, rv = infinity.limit_residual(domain, res.u0, res.v0, f.gamma, f.r, f.s,
                                     res.lambda_inf_geometric, nodes=res.argmax_node)
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    write_limit_json(
        out / "limit.json",
        lambda_inf_geometric=res.lambda_inf_geometric,
        lambda_inf_variational=res.lambda_inf_variational,
        inradius=res.inradius, gamma=f.gamma, r=f.r, s=f.s,
        residual_u=ru, residual_v=rv,
        source="extremal cone pair at the incenter node",
    )
    print(f"inradius                 {res.inradius:.6f}")
    print(f"Lambda_inf (geometric)   {res.lambda_inf_geometric:.6f}")
    print(f"Lambda_inf (variational) {res.lambda_inf_variational:.6f}")
    print(f"limit residual at apex   u {ru:.3e}  v {rv:.3e}")
    return EXIT_OK


def cmd_selftest(args, cfg: ExperimentConfig) -> int:
    results = checks.run_selftest(seed=cfg.solver.seed)
    for res in results:
        print(res.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_SOLVER


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "limit": cmd_limit, "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
