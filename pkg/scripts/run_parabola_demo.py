#!/usr/bin/env python3
"""Centred parabola under one explicit update step.

Samples f0(x) = (x - 1/2)^2, applies the constrained selection gradient,
and prints the updated values f0 + eps * A f0 at the seven nodes k/6.
The sampled values all stay nonnegative even though the underlying
function dips below zero just right of the midpoint, which is why a
coarse sampling can hide the exit from the strategy space.
"""

import argparse

import numpy as np

from teamgame import SampledStrategy, apply_A_function
from teamgame.cli import main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/parabola")
    ap.add_argument("--N", type=int, default=4092, help="grid size (multiple of 6)")
    ap.add_argument("--epsilon", type=float, default=2.0)
    args = ap.parse_args()
    code = main([
        "gradient-demo", "--preset", "parabola", "--N", str(args.N),
        "--epsilon", str(args.epsilon), "--out", args.out, "--svg",
    ])
    if code != 0:
        return code

    f0 = SampledStrategy.from_function(lambda x: (x - 0.5) ** 2, args.N)
    grad = apply_A_function(f0)
    x = np.arange(args.N + 1) / args.N
    print(f"\nupdated values f0 + {args.epsilon:g} * A f0 at the nodes k/6:")
    for k in range(7):
        j = int(np.argmin(np.abs(x - k / 6)))
        print(f"  x = {k}/6: {f0.samples[j] + args.epsilon * grad.samples[j]: .8f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
