"""Hot decision kernels, built twice: numba-compiled and pure numpy.

``build_kernels`` assembles the whole family under a given decorator so the
compiled spine only ever calls compiled helpers. ``active`` is the family
selected by :mod:`slicemarket.accel` (numba unless ``SLICEMARKET_NO_NUMBA``
is set); ``pure`` is always the undecorated numpy implementation, kept around
for equivalence tests and the kernel benchmark.
"""

from __future__ import annotations

from types import SimpleNamespace

import numpy as np

from .accel import USING_NUMBA


def build_kernels(jit):
    @jit
    def ratio_leq(acc_lo, rec_lo, acc_hi, rec_hi):
        # Cross-multiplied r_lo <= r_hi with the 0/0 -> 0 convention.
        if rec_lo == 0:
            return True
        if rec_hi == 0:
            return acc_lo == 0
        return acc_lo * rec_hi <= acc_hi * rec_lo

    @jit
    def priority_holds(acc, rec):
        for i in range(acc.shape[0] - 1):
            if not ratio_leq(acc[i], rec[i], acc[i + 1], rec[i + 1]):
                return False
        return True

    @jit
    def dominant_index(demand, available):
        # Smallest-index argmin of available/demand over positive-demand dims.
        best_k = -1
        best = np.inf
        for k in range(demand.shape[0]):
            if demand[k] > 0.0:
                ratio = available[k] / demand[k]
                if ratio < best:
                    best = ratio
                    best_k = k
        return best_k

    @jit
    def fits(demand, available, tol):
        for k in range(demand.shape[0]):
            if demand[k] > available[k] + tol:
                return False
        return True

    @jit
    def availability(capacity, demands, counts):
        avail = capacity.copy()
        for s in range(demands.shape[0]):
            if counts[s] > 0:
                for k in range(capacity.shape[0]):
                    avail[k] -= demands[s, k] * counts[s]
        return avail

    @jit
    def re_order(prices, demands, available):
        # Slice positions by revenue efficiency descending; ties prefer the
        # higher label (labels ascend with position). Insertion sort: the
        # slice count is tiny.
        n = prices.shape[0]
        re = np.empty(n)
        for s in range(n):
            k = dominant_index(demands[s], available)
            re[s] = prices[s] / demands[s, k] if k >= 0 else -1.0
        order = np.empty(n, np.int64)
        for s in range(n):
            order[s] = s
        for i in range(1, n):
            cur = order[i]
            j = i - 1
            while j >= 0 and (
                re[order[j]] < re[cur] or (re[order[j]] == re[cur] and order[j] < cur)
            ):
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = cur
        return order

    @jit
    def drredpa(capacity, demands, prices, active, requested, cum_acc, cum_rec, tol):
        n = prices.shape[0]
        quotas = np.zeros(n, np.int64)
        acc = cum_acc.copy()
        rec = cum_rec + requested
        while True:
            avail = availability(capacity, demands, active + quotas)
            order = re_order(prices, demands, avail)
            granted = False
            if priority_holds(acc, rec):
                for idx in range(n):
                    s = order[idx]
                    if quotas[s] < requested[s] and fits(demands[s], avail, tol):
                        acc[s] += 1
                        if priority_holds(acc, rec):
                            quotas[s] += 1
                            granted = True
                            break
                        acc[s] -= 1
            else:
                # Only the slices whose ratio fell behind their lower-priority
                # neighbor may catch up; everything else waits.
                for idx in range(n):
                    s = order[idx]
                    if s > 0 and not ratio_leq(acc[s - 1], rec[s - 1], acc[s], rec[s]):
                        if quotas[s] < requested[s] and fits(demands[s], avail, tol):
                            quotas[s] += 1
                            acc[s] += 1
                            granted = True
                            break
            if not granted:
                return quotas

    @jit
    def ordered_fill(capacity, demands, active, requested, order, tol):
        # Grant one unit at a time, always to the first slice in the attempt
        # order that still has demand and fits; stop when nothing fits.
        n = requested.shape[0]
        quotas = np.zeros(n, np.int64)
        avail = availability(capacity, demands, active)
        while True:
            granted = False
            for idx in range(n):
                s = order[idx]
                if quotas[s] < requested[s] and fits(demands[s], avail, tol):
                    quotas[s] += 1
                    for k in range(avail.shape[0]):
                        avail[k] -= demands[s, k]
                    granted = True
                    break
            if not granted:
                return quotas

    @jit
    def partitioned_fill(capacity, demands, active, requested, fractions, tol):
        # Static exclusive partitions: each slice admits against its own share
        # of capacity minus its own alive footprint; no borrowing.
        n = requested.shape[0]
        quotas = np.zeros(n, np.int64)
        for s in range(n):
            grant = requested[s]
            for k in range(capacity.shape[0]):
                if demands[s, k] > 0.0:
                    room = fractions[s] * capacity[k] - demands[s, k] * active[s]
                    m = np.int64((room + tol) // demands[s, k])
                    if m < grant:
                        grant = m
            if grant > 0:
                quotas[s] = grant
        return quotas

    return SimpleNamespace(
        ratio_leq=ratio_leq,
        priority_holds=priority_holds,
        dominant_index=dominant_index,
        fits=fits,
        availability=availability,
        re_order=re_order,
        drredpa=drredpa,
        ordered_fill=ordered_fill,
        partitioned_fill=partitioned_fill,
    )


pure = build_kernels(lambda fn: fn)

if USING_NUMBA:
    import numba

    active = build_kernels(numba.njit(cache=False))
else:
    active = pure
