#!/usr/bin/env python3
"""Optimum-versus-family-size sweep over seeded random distributions.

For each random tripartite distribution (binary honest alphabets, adversary
alphabet of size d) the deterministic family prefix chain M = 0..max_m is
certified and the exact optima are tabulated.  Along a prefix chain the
optimum can only shrink, so this doubles as a stress test of that monotone
structure at experiment scale.

Usage:
    python scripts/run_family_sweep.py [--dists 5] [--max-m 4] [--seed 0] [--d 2]
"""

import argparse
import itertools
import random
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from nodistill.certifier import certify
from nodistill.families import deterministic_family
from nodistill.probvec import Axis, JointDist
from nodistill.rat import format_rational


def random_tripartite(rng: random.Random, d: int, denom_max: int = 12) -> JointDist:
    axes = (Axis("A", 2), Axis("B", 2), Axis("E", d))
    entries = {}
    for idx in itertools.product(range(2), range(2), range(d)):
        den = rng.randint(1, denom_max)
        num = rng.randint(0, den)
        if num:
            entries[idx] = Fraction(num, den)
    if not entries:
        entries[(0, 0, 0)] = Fraction(1)
    return JointDist(axes, entries)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dists", type=int, default=5)
    ap.add_argument("--max-m", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--d", type=int, default=2, help="adversary alphabet size")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    print("dist\t" + "\t".join(f"M={m}" for m in range(args.max_m + 1)))
    for n in range(args.dists):
        g = random_tripartite(rng, args.d)
        optima = []
        for m in range(args.max_m + 1):
            cert = certify(g, deterministic_family(2, 2, cap=m))
            optima.append(cert.optimum)
        assert all(b <= a for a, b in zip(optima, optima[1:])), "prefix chain must shrink"
        print(f"g{n}\t" + "\t".join(format_rational(v) for v in optima))
    return 0


if __name__ == "__main__":
    sys.exit(main())
