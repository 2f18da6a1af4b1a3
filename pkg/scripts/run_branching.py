#!/usr/bin/env python3
"""Branching experiment: opposite perturbations of the constant equilibrium.

Perturbs (1, ..., 1) on the 51-point grid by +/- delta at the midpoint,
integrates both states, and reports how exactly the two branches mirror
each other through the equilibrium.
"""

import argparse

from teamgame.cli import main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/branching")
    ap.add_argument("--T", type=float, default=10.0)
    ap.add_argument("--delta", type=float, default=0.01)
    args = ap.parse_args()
    return main([
        "branch", "--M", "50", "--k", "25",
        "--delta", str(args.delta), "--T", str(args.T), "--dt", "1e-3",
        "--out", args.out, "--svg",
    ])


if __name__ == "__main__":
    raise SystemExit(run())
