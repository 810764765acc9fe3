#!/usr/bin/env python3
"""Check decay of the kink difference outside the light cone."""

import argparse
import sys

from sgkink.experiments import ExperimentConfig, run_experiment, write_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilon", type=float, default=0.02)
    ap.add_argument("--s", type=float, default=1.0,
                    help="spatial-weight exponent of the perturbation class")
    ap.add_argument("--t-end", type=float, default=100.0)
    ap.add_argument("--out", default="out/exterior-decay")
    args = ap.parse_args()

    cfg = ExperimentConfig(
        name="exterior-decay",
        epsilon=args.epsilon,
        s=args.s,
        t_end=args.t_end,
    )
    rep = run_experiment(cfg)
    write_report(rep, args.out)
    print(f"max measured/bound ratio: {rep.summary['max_ratio']:.3e}")
    lo, hi = rep.summary["exterior_l2_first_last"]
    print(f"exterior L2: {lo:.3e} -> {hi:.3e}")
    for msg in rep.failures:
        print(f"tolerance violated: {msg}")
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
