#!/usr/bin/env python3
"""Fraction of high-efficiency realizations versus network size.

Compares the three ensemble variants at each size: post-selected
dominant doublets, unconstrained mirror-symmetric networks, and plain
symmetric disorder.  Post-selection keeps the efficient fraction pinned
near one while the unconstrained variants decay with N.

Acceptance gets steep with size: at N = 12 and the default threshold
only ~0.8 draws per million survive, so the default budget spends up to
2.5e8 draws per post-selected cell (several minutes).  Trim --n-values
or --budget for a faster pass.
"""

import argparse
import json
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

from centronet.ensemble import EnsembleConfig
from centronet.harness import scaling_experiment


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-values", default="8,10,12")
    parser.add_argument("--modes",
                        default="dominant_doublet,centrosymmetric,plain_goe")
    parser.add_argument("--xi", type=float, default=2.0)
    parser.add_argument("--alpha", type=float, default=0.95)
    parser.add_argument("--seed", type=int, default=2718)
    parser.add_argument("--n-target", type=int, default=300)
    parser.add_argument("--budget", type=float, default=2.5e8)
    parser.add_argument("--out", type=Path,
                        default=Path("results/size_scaling.json"))
    args = parser.parse_args()

    n_values = [int(v) for v in args.n_values.split(",")]
    modes = args.modes.split(",")
    template = EnsembleConfig(n=n_values[0], xi=args.xi, alpha=args.alpha,
                              master_seed=args.seed, n_target=args.n_target)
    with warnings.catch_warnings():
        # Budget-limited cells report whatever they accepted.
        warnings.simplefilter("ignore", RuntimeWarning)
        cells = scaling_experiment(template, n_values, modes,
                                   budget=int(args.budget))

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps({"cells": [asdict(c) for c in cells]},
                                   indent=2) + "\n")
    header = f"{'N':>4s} {'mode':>18s} {'kept':>6s} {'efficient':>10s} {'bound':>7s}"
    print(header)
    for c in cells:
        print(f"{c.n:4d} {c.mode:>18s} {c.n_accepted:6d} "
              f"{c.fraction_efficient:7.4f} +/- {c.stderr:.4f} "
              f"{c.theory_lower_bound:7.4f}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
