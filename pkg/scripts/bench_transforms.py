#!/usr/bin/env python3
"""Timing experiment for the lattice transforms and the full audit.

Reports zeta/Moebius wall time against table size, checks the fast
transforms against the quadratic double loop at small sizes, and times a
full lower-envelope audit at 12 outcomes.

Run: python scripts/bench_transforms.py [--max-n 20] [--audit-n 12]
"""

import argparse
import math
import time

import numpy as np

import beliefbet as bb


def naive_zeta(values):
    size = len(values)
    return [
        math.fsum(values[b] for b in range(size) if b & a == b) for a in range(size)
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-n", type=int, default=20)
    parser.add_argument("--audit-n", type=int, default=12)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    print("agreement with the double loop:")
    for n in (4, 8, 10):
        raw = rng.uniform(0, 1, size=1 << n)
        raw[0] = 0.0
        dense = raw / math.fsum(raw.tolist())
        err = np.abs(bb.zeta_transform(dense) - np.array(naive_zeta(dense.tolist()))).max()
        print(f"  n={n:2d}: max abs deviation {err:.2e}")

    print("transform scaling:")
    for n in range(12, args.max_n + 1, 2):
        values = rng.uniform(0, 1, size=1 << n)
        start = time.perf_counter()
        up = bb.zeta_transform(values)
        mid = time.perf_counter()
        bb.mobius_transform(up)
        end = time.perf_counter()
        print(
            f"  n={n:2d}: zeta {1e3 * (mid - start):7.1f} ms, "
            f"mobius {1e3 * (end - mid):7.1f} ms"
        )

    n = args.audit_n
    space = bb.make_space([f"w{i}" for i in range(n)])
    rows = rng.uniform(0.05, 1.0, size=(4, n))
    pm = bb.LowerEnvelopeModel(space, rows / rows.sum(axis=1, keepdims=True))
    start = time.perf_counter()
    report = bb.belief_consistency_audit(pm)
    elapsed = time.perf_counter() - start
    print(
        f"full audit at n={n}: {1e3 * elapsed:.0f} ms, "
        f"belief-consistent={report.is_belief_consistent}"
    )


if __name__ == "__main__":
    main()
