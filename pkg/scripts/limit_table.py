"""lambda_p^(1/p) against the geometric limit for a few exponent triples on (0, 1).

Also solves past the default sweep (p = 96, 128) to show where the discrete
values sit relative to the limit at large p.
"""
import argparse

from fracsys.harness import ExperimentConfig, FractionalSpec, run_sweep

TRIPLES = [(0.5, 0.5, 0.5), (0.3, 0.6, 0.5), (0.2, 0.7, 0.3), (0.6, 0.4, 0.7)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=161)
    ap.add_argument("--p", type=float, nargs="+", default=[4, 8, 16, 32, 64, 96, 128])
    args = ap.parse_args()

    print(f"{'r':>4} {'s':>4} {'gamma':>5} {'Lambda':>8}  " + " ".join(f"p={p:<7g}" for p in args.p))
    for r, s, gamma in TRIPLES:
        cfg = ExperimentConfig()
        cfg.fractional = FractionalSpec(r, s, gamma)
        cfg.grid.n = args.n
        cfg.sweep = tuple(float(p) for p in args.p)
        # admissible p: min(alpha, beta) >= 1 and p min(r, s) >= 1
        p_min = max(1 / min(gamma, 1 - gamma), 1 / min(r, s))
        cfg.sweep = tuple(p for p in cfg.sweep if p >= p_min)
        res = run_sweep(cfg)
        lam = res.records[0].lambda_inf
        cells = {rec.p: rec.lambda_root for rec in res.records}
        row = " ".join(f"{cells[p]:9.5f}" if p in cells else f"{'-':>9}" for p in args.p)
        print(f"{r:4g} {s:4g} {gamma:5g} {lam:8.5f}  {row}")


if __name__ == "__main__":
    main()
