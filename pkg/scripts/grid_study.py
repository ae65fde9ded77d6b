"""lambda_p^(1/p) on refined interval grids, to separate grid error from the p-dependence."""
import argparse

from fracsys.harness import ExperimentConfig, FractionalSpec, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=0.5)
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--n", type=int, nargs="+", default=[41, 81, 161, 321])
    args = ap.parse_args()

    ps = (4.0, 8.0, 16.0, 32.0, 48.0, 64.0)
    print(f"{'n':>5}  " + " ".join(f"p={p:<7g}" for p in ps))
    for n in args.n:
        cfg = ExperimentConfig()
        cfg.fractional = FractionalSpec(args.r, args.s, args.gamma)
        cfg.grid.n = n
        cfg.sweep = ps
        res = run_sweep(cfg)
        print(f"{n:5d}  " + " ".join(f"{rec.lambda_root:9.5f}" for rec in res.records))
    print(f"limit: {res.records[0].lambda_inf:.5f}  (1/R with R the grid inradius, exponent (1-G)s+Gr)")


if __name__ == "__main__":
    main()
