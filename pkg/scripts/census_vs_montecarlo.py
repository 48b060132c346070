#!/usr/bin/env python3
"""Compare the exact width-2 success census against Monte Carlo sampling
for the emulation families.

Usage: python scripts/census_vs_montecarlo.py [--trials 2000] [--seed 42]
"""

import argparse

from qqlab.harness import ExperimentConfig, exact_census, monte_carlo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--T", type=int, default=3)
    args = ap.parse_args()

    for family in ("classical-emulation", "truncated-emulation"):
        census = exact_census(family, 2, args.T)
        exact_rate = 1 - census.failing_fraction
        cfg = ExperimentConfig(kind="montecarlo", family=family, n=2, T=args.T,
                               trials=args.trials, seed=args.seed).validate()
        rep = monte_carlo(cfg)
        low, high = rep.aggregates["success_wilson95"]
        inside = low <= exact_rate <= high
        print(f"{family}: census rate {exact_rate:.5f} over {census.total_oracles} "
              f"oracles; Monte Carlo {rep.aggregates['success_rate']:.5f} "
              f"[{low:.5f}, {high:.5f}] over {args.trials} trials "
              f"-> {'agree' if inside else 'DISAGREE'}")


if __name__ == "__main__":
    main()
