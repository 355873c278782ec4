"""Exact r-median solver: pick r columns of a nonnegative cost matrix
minimizing the weighted sum of per-row minima.

The exact path is a best-bound branch-and-bound on site in/out decisions.
Node bounds come from a small subgradient ascent on the Lagrangian obtained
by relaxing the one-median-per-customer constraints (each customer must be
assigned to exactly one open column); its inner problem picks the q cheapest
free columns in closed form, which is where the cardinality constraint
enters.  Incumbents come from greedy construction plus swap local search,
and small completion sets are enumerated outright.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass

import numpy as np


class CapExceededError(RuntimeError):
    """An enumeration would exceed its configured evaluation cap."""


@dataclass(frozen=True)
class RMedianInstance:
    cost: np.ndarray  # (m, n), nonnegative
    w: np.ndarray  # (m,), positive
    r: int

    def __post_init__(self):
        cost = np.asarray(self.cost, dtype=float)
        w = np.asarray(self.w, dtype=float)
        if cost.ndim != 2:
            raise ValueError("cost must be an (m, n) matrix")
        if w.shape != (cost.shape[0],):
            raise ValueError("w length must match the cost row count")
        if np.any(cost < 0.0) or not np.all(np.isfinite(cost)):
            raise ValueError("costs must be finite and nonnegative")
        if np.any(w <= 0.0):
            raise ValueError("weights must be positive")
        if not 1 <= self.r <= cost.shape[1]:
            raise ValueError(f"r={self.r} out of range [1, {cost.shape[1]}]")
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.cost.shape[1]


@dataclass(frozen=True)
class RMedianConfig:
    time_limit: float | None = None
    enum_chunk: int = 4096  # complete a node by enumeration below this size
    subgrad_iters: int = 25


def set_value(rm: RMedianInstance, sites) -> float:
    """Canonical objective evaluator shared by every solution path."""
    sites = np.asarray(list(sites), dtype=int)
    return float(rm.w @ rm.cost[:, sites].min(axis=1))


def rmedian_enumerate(rm: RMedianInstance, cap: int = 2_000_000):
    """Scan all C(n, r) column subsets; ties go to the lexicographically
    smallest set.  Raises CapExceededError above ``cap`` evaluations."""
    total = math.comb(rm.n, rm.r)
    if total > cap:
        raise CapExceededError(f"C({rm.n}, {rm.r}) = {total} exceeds cap {cap}")
    w = rm.w
    cols = [rm.cost[:, k] for k in range(rm.n)]
    best_sites, best_val = None, math.inf
    for combo in itertools.combinations(range(rm.n), rm.r):
        val = float(w @ np.minimum.reduce([cols[k] for k in combo]))
        if val < best_val:
            best_sites, best_val = combo, val
    return np.array(best_sites, dtype=int), best_val


def _greedy_swap(rm: RMedianInstance):
    """Greedy construction followed by best-improvement 1-swaps."""
    m, n, r = rm.cost.shape[0], rm.n, rm.r
    chosen: list[int] = []
    cur = np.full(m, np.inf)
    for _ in range(r):
        best_k, best_val = -1, math.inf
        for k in range(n):
            if k in chosen:
                continue
            val = float(rm.w @ np.minimum(cur, rm.cost[:, k]))
            if val < best_val:
                best_k, best_val = k, val
        chosen.append(best_k)
        cur = np.minimum(cur, rm.cost[:, best_k])
    chosen.sort()
    best_val = set_value(rm, chosen)
    improved = True
    rounds = 0
    while improved and rounds < 4 * n:
        improved = False
        rounds += 1
        for a in list(chosen):
            rest = [k for k in chosen if k != a]
            for b in range(n):
                if b in chosen:
                    continue
                val = set_value(rm, rest + [b])
                if val < best_val - 1e-15:
                    chosen = sorted(rest + [b])
                    best_val = val
                    improved = True
                    break
            if improved:
                break
    return tuple(sorted(chosen)), best_val


def _lagrangian_bound(t: np.ndarray, n_forced: int, q: int, ub: float, iters: int) -> float:
    """Lower bound for choosing q of the free columns (the forced columns
    occupy t[:, :n_forced]).  Valid for any multiplier vector; subgradient
    ascent just sharpens it."""
    m = t.shape[0]
    u = t.min(axis=1).copy()  # start at the trivial row-minimum bound
    best = -math.inf
    mu = 1.0
    stall = 0
    for _ in range(iters):
        slack = t - u[:, None]
        neg = np.minimum(slack, 0.0)
        s = neg.sum(axis=0)
        forced_part = float(s[:n_forced].sum())
        free_s = s[n_forced:]
        free_part = float(np.sort(free_s)[:q].sum()) if q > 0 else 0.0
        val = float(u.sum()) + forced_part + free_part
        if val > best + 1e-12:
            best = val
            stall = 0
        else:
            stall += 1
            if stall >= 3:
                mu *= 0.5
                stall = 0
        # subgradient: 1 - (number of open columns priced below u_i)
        open_cols = list(range(n_forced))
        if q > 0:
            cheapest = np.argsort(free_s, kind="stable")[:q]
            open_cols += [n_forced + int(k) for k in cheapest]
        assigned = (slack[:, open_cols] < 0.0).sum(axis=1)
        g = 1.0 - assigned
        gnorm = float(g @ g)
        if gnorm < 1e-16:
            break
        step = mu * max(ub - val, 1e-12) / gnorm
        u = u + step * g
    return best


def rmedian_solve(rm: RMedianInstance, cfg: RMedianConfig | None = None):
    """Exact branch-and-bound; returns (sites, value, status).

    status is "optimal" unless the time limit interrupts the search, in
    which case the best incumbent found is returned with status "limit".
    """
    cfg = cfg or RMedianConfig()
    n, r = rm.n, rm.r
    t0 = time.perf_counter()

    incumbent, ub = _greedy_swap(rm)
    t = rm.w[:, None] * rm.cost

    def tol(u: float) -> float:
        return 1e-9 * (1.0 + abs(u))

    def consider(sites, val):
        nonlocal incumbent, ub
        sites = tuple(sorted(int(k) for k in sites))
        if val < ub or (val == ub and sites < incumbent):
            incumbent, ub = sites, val

    # heap of (bound, tiebreak, forced_in tuple, forced_out frozenset)
    counter = itertools.count()
    heap = [(0.0, next(counter), (), frozenset())]
    status = "optimal"
    while heap:
        bound, _, fin, fout = heapq.heappop(heap)
        if bound >= ub + tol(ub):
            continue
        if cfg.time_limit is not None and time.perf_counter() - t0 > cfg.time_limit:
            status = "limit"
            break
        free = [k for k in range(n) if k not in fin and k not in fout]
        q = r - len(fin)
        if q == 0:
            consider(fin, set_value(rm, fin))
            continue
        if q == len(free):
            full = tuple(fin) + tuple(free)
            consider(full, set_value(rm, full))
            continue
        if math.comb(len(free), q) <= cfg.enum_chunk:
            base = rm.cost[:, list(fin)].min(axis=1) if fin else np.full(rm.cost.shape[0], np.inf)
            for combo in itertools.combinations(free, q):
                mins = np.minimum(base, rm.cost[:, list(combo)].min(axis=1))
                consider(tuple(fin) + combo, float(rm.w @ mins))
            continue
        allowed = list(fin) + free
        node_bound = _lagrangian_bound(t[:, allowed], len(fin), q, ub, cfg.subgrad_iters)
        node_bound = max(node_bound, bound)
        if node_bound >= ub + tol(ub):
            continue
        # branch on the free site with the largest weighted usage among
        # the row minima of the allowed columns
        sub = rm.cost[:, allowed]
        argmin = np.asarray(allowed)[np.argmin(sub, axis=1)]
        usage = np.zeros(n)
        np.add.at(usage, argmin, rm.w)
        k_star = max(free, key=lambda k: (usage[k], -k))
        heapq.heappush(heap, (node_bound, next(counter), tuple(fin) + (k_star,), fout))
        heapq.heappush(heap, (node_bound, next(counter), fin, fout | {k_star}))

    return np.array(incumbent, dtype=int), ub, status
