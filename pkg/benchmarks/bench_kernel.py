#!/usr/bin/env python3
"""Benchmark the grid-search kernels: compiled extension vs pure Python.

Runs the same enumeration through both backends on a binary and a ternary
workload, checks that the results agree exactly, and prints timings.

Usage: python benchmarks/bench_kernel.py [--binary-k K] [--ternary-k K]
"""

import argparse
import time

from quotasig._kernels import compiled_available, pure
from quotasig.lab import (
    table1_instance,
    table2_capped_profile,
    table2_instance,
)
from quotasig.model import vacuous_profile
from quotasig.oracle import _scaled


def run(name, inst, c, K):
    P, Dp, UR, DR, US, DS, Lb, Ub, U = _scaled(inst, c, K)
    n, m = inst.n, inst.m
    rows = list(pure.compositions(K, m))
    args = (n, m, [rows] * n, K, P, Dp, UR, US, Lb, Ub, U, 0, 1, DS, True)

    t0 = time.perf_counter()
    ref = pure.grid_search(*args)
    t_pure = time.perf_counter() - t0

    line = (
        f"{name:<14} K={K:<4} schemes={ref['scheme_count']:>8} "
        f"evaluated={ref['evaluated']:>7}  pure={t_pure:8.3f}s"
    )
    if compiled_available():
        from quotasig._kernels import _fastcore

        t0 = time.perf_counter()
        fast = _fastcore.grid_search(*args)
        t_fast = time.perf_counter() - t0
        assert fast == ref, f"{name}: backends disagree"
        line += f"  compiled={t_fast:8.3f}s  speedup={t_pure / t_fast:7.1f}x"
    else:
        line += "  (compiled backend unavailable)"
    print(line)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--binary-k", type=int, default=120)
    ap.add_argument("--ternary-k", type=int, default=10)
    args = ap.parse_args()

    run("binary/free", table1_instance(), vacuous_profile(2), args.binary_k)
    run("ternary/cap", table2_instance(), table2_capped_profile(), args.ternary_k)


if __name__ == "__main__":
    main()
