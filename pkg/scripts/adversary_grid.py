#!/usr/bin/env python3
"""Sweep the hard-oracle construction over a (family, n, T) grid.

Prints per-combo success rates, premise-failure counts and bound-check
outcomes; combos whose register layout exceeds the qubit cap are reported
as infeasible.  Reports land in --out-dir.

Usage: python scripts/adversary_grid.py --out-dir reports --trials 5
"""

import argparse
from pathlib import Path

from qqlab.errors import CapExceededError
from qqlab.harness import ExperimentConfig, monte_carlo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--epsilon", type=float, default=1.0)
    ap.add_argument("--families", nargs="+",
                    default=["random", "truncated-emulation"])
    ap.add_argument("--widths", type=int, nargs="+", default=[4, 5, 6])
    ap.add_argument("--iterations", type=int, nargs="+", default=[2, 3, 4])
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    for family in args.families:
        for n in args.widths:
            for T in args.iterations:
                tag = f"{family} n={n} T={T}"
                try:
                    cfg = ExperimentConfig(
                        kind="adversary", family=family, n=n, T=T,
                        epsilon=args.epsilon, trials=args.trials, seed=args.seed,
                        tau_work=2,
                        output_path=str(out / f"adversary_{family}_n{n}_T{T}.csv"),
                    ).validate()
                    rep = monte_carlo(cfg)
                except CapExceededError as e:
                    print(f"{tag}: infeasible ({e})")
                    continue
                a = rep.aggregates
                print(f"{tag}: {a['succeeded']}/{a['traces']} succeeded, "
                      f"{a['violations']} premise-valid violations, "
                      f"{a['premise_failures']} premise failures, "
                      f"{a['raw_bound_violations']} raw bound excesses")


if __name__ == "__main__":
    main()
