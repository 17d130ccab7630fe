#!/usr/bin/env python3
"""Benchmark the compiled decision kernels against the pure numpy fallback.

Runs each admission kernel on a bank of realistic decision instances using
both families from ``slicemarket.kernels`` and reports per-call times plus
the speedup. With ``--e2e`` it also times a full simulation run in whichever
mode the current process selected (set ``SLICEMARKET_NO_NUMBA=1`` and rerun
to get the fallback row of the end-to-end comparison).
"""

import argparse
import time

import numpy as np

from slicemarket import kernels
from slicemarket.accel import NUMBA_ENV_FLAG, USING_NUMBA


def make_instances(count: int, seed: int = 123):
    rng = np.random.default_rng(seed)
    instances = []
    for _ in range(count):
        n, k = 4, 3
        demands = rng.uniform(0.3, 1.0, size=(n, k))
        capacity = rng.uniform(15.0, 25.0, size=k)
        requested = rng.integers(0, 10, size=n)
        active = rng.integers(0, 5, size=n)
        while np.any(demands.T @ active > capacity):
            active = np.maximum(active - 1, 0)
        cum_rec = rng.integers(0, 2000, size=n)
        cum_acc = np.array([rng.integers(0, r + 1) for r in cum_rec], dtype=np.int64)
        prices = rng.uniform(1.0, 2.5, size=n)
        fractions = rng.dirichlet(np.ones(n))
        order = rng.permutation(n).astype(np.int64)
        instances.append(
            dict(
                capacity=capacity,
                demands=demands,
                prices=prices,
                active=active.astype(np.int64),
                requested=requested.astype(np.int64),
                cum_acc=cum_acc,
                cum_rec=cum_rec.astype(np.int64),
                fractions=fractions,
                order=order,
            )
        )
    return instances


def bench(fn, calls, repeats: int = 3) -> float:
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        for args in calls:
            fn(*args)
        best = min(best, time.perf_counter() - start)
    return best / len(calls)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=2000)
    parser.add_argument("--e2e", action="store_true", help="also time a full simulation run")
    args = parser.parse_args()

    print(f"numba active: {USING_NUMBA} (toggle with {NUMBA_ENV_FLAG}=1)")
    instances = make_instances(args.instances)
    tol = 1e-9

    workloads = {
        "drredpa": [
            (i["capacity"], i["demands"], i["prices"], i["active"], i["requested"],
             i["cum_acc"], i["cum_rec"], tol)
            for i in instances
        ],
        "ordered_fill": [
            (i["capacity"], i["demands"], i["active"], i["requested"], i["order"], tol)
            for i in instances
        ],
        "partitioned_fill": [
            (i["capacity"], i["demands"], i["active"], i["requested"], i["fractions"], tol)
            for i in instances
        ],
    }

    print(f"{'kernel':<18}{'compiled':>12}{'pure':>12}{'speedup':>9}")
    for name, calls in workloads.items():
        fast_fn = getattr(kernels.active, name)
        slow_fn = getattr(kernels.pure, name)
        fast_fn(*calls[0])  # trigger compilation outside the timer
        fast = bench(fast_fn, calls)
        slow = bench(slow_fn, calls)
        ratio = slow / fast if fast > 0 else float("inf")
        print(f"{name:<18}{fast * 1e6:>10.1f}us{slow * 1e6:>10.1f}us{ratio:>8.1f}x")

    if args.e2e:
        import slicemarket
        from slicemarket.engine import simulate
        from slicemarket.model import load_scenario

        scenario = load_scenario(slicemarket.table1_path())
        simulate(scenario, seed=1)  # warm
        start = time.perf_counter()
        simulate(scenario, seed=2)
        elapsed = time.perf_counter() - start
        mode = "compiled" if USING_NUMBA else "pure numpy"
        print(f"\nfull {scenario.config.horizon}-slot run ({mode}): {elapsed:.2f}s")


if __name__ == "__main__":
    main()
