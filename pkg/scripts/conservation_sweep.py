#!/usr/bin/env python3
"""Measure drift of the four conserved quantities for each data type."""

import argparse
import sys

from sgkink.experiments import ExperimentConfig, run_experiment, write_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-end", type=float, default=50.0)
    ap.add_argument("--scheme", default=None,
                    help="override the per-data-type default scheme")
    ap.add_argument("--out", default="out/conservation")
    args = ap.parse_args()

    ok = True
    for data in ("kink", "breather", "perturbed-kink"):
        scheme = args.scheme or ("yoshida4" if data == "breather"
                                 else "leapfrog")
        cfg = ExperimentConfig(
            name="conservation",
            x_min=-64.0,
            x_max=64.0,
            n=2048,
            data=data,
            scheme=scheme,
            t_end=args.t_end,
        )
        rep = run_experiment(cfg)
        write_report(rep, f"{args.out}/{data}")
        drifts = ", ".join(
            f"{k[6:]} {v:.1e}" for k, v in sorted(rep.summary.items())
            if k.startswith("drift_")
        )
        print(f"{data} ({scheme}): {drifts}")
        for msg in rep.failures:
            print(f"  tolerance violated: {msg}")
        ok = ok and rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
