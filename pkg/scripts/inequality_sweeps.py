#!/usr/bin/env python3
"""Run the two inequality sweeps at full scale and write report files.

Usage: python scripts/inequality_sweeps.py --out-dir reports [--seed 42]
"""

import argparse
from pathlib import Path

from qqlab.harness import ExperimentConfig, monte_carlo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--trials", type=int, default=1000)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    for n in (1, 2, 3, 4):
        cfg = ExperimentConfig(kind="lemma1", n=n, tau_work=2, trials=args.trials,
                               seed=args.seed,
                               output_path=str(out / f"query_change_n{n}.csv")).validate()
        rep = monte_carlo(cfg)
        print(f"single-query bound n={n}: {rep.aggregates['rows']} trials, "
              f"{rep.aggregates['violations']} violations, "
              f"min slack {rep.aggregates['min_slack']:.3e}")

    for n in (1, 2, 3):
        cfg = ExperimentConfig(kind="lemma2", n=n, tau_work=8, t=6,
                               trials=max(args.trials // 5, 1), seed=args.seed,
                               output_path=str(out / f"hybrid_n{n}.csv")).validate()
        rep = monte_carlo(cfg)
        print(f"hybrid bound n={n}: {rep.aggregates['rows']} trials, "
              f"{rep.aggregates['violations']} violations, "
              f"min slack {rep.aggregates['min_slack']:.3e}")


if __name__ == "__main__":
    main()
