"""Executable checks of the structural facts behind the formulations.

``verify_hull`` compares support functions of three descriptions of the
per-follower-choice hypograph set: the anchor-cut polytope over the unit
box, the LP relaxation of the assignment extension, and the convex hull
of the integer points themselves.  Support functions identify convex
bodies, so random-direction probing decides equality at desk scale
without a vertex enumerator.  The first two descriptions always coincide
and touch the integer points at every integral leader vector; the check
reports any direction where they rise above the integer hull (which does
happen: the per-customer aggregation can be strictly looser than the
true hull at fractional points, with no effect on solver exactness).

``verify_prop61`` cross-checks the anchor-cut separation reduction
against a literal minimization over all anchor vectors, and
``verify_aggregation`` confirms that one shared allocation block is as
tight as one block per follower choice and that the prefix-greedy
allocation is LP-optimal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bnc import add_cut_row, build_model
from .cuts import ef_cut, gsf_separation_costs, improved_cut, sigma_order, tight_ell
from .instance import Instance
from .lp import LpModel, lp_solve
from .market import compute_cy, indicator, open_sites
from .rmedian import CapExceededError


@dataclass(frozen=True)
class HullCheckReport:
    instance_digest: str
    y: tuple
    trials: int
    max_discrepancy: float


def _anchor_polytope(inst: Instance, y) -> LpModel:
    """eta and x columns, every anchor cut for y, unit box, no cardinality row."""
    total = (inst.n + 1) ** inst.m
    if total > 200_000:
        raise CapExceededError(f"(n+1)^m = {total} anchor cuts is too many")
    obj = np.zeros(1 + inst.n)
    lower = np.concatenate(([-np.inf], np.zeros(inst.n)))
    upper = np.concatenate(([np.inf], np.ones(inst.n)))
    model = LpModel(obj, lower, upper, ["eta"] + [f"x{j}" for j in range(inst.n)])
    cy = compute_cy(inst, y)
    for ell in itertools.product(range(inst.n + 1), repeat=inst.m):
        cut = improved_cut(inst, y, np.array(ell), cy)
        coef = {0: 1.0}
        coef.update({1 + j: -c for j, c in enumerate(cut.xcoef) if c != 0.0})
        model.add_row(coef, "<=", cut.constant)
    return model


def _assignment_polytope(inst: Instance, y) -> LpModel:
    """eta, x, z columns with the linking rows and the single cut for y."""
    m, n = inst.m, inst.n
    obj = np.zeros(1 + n + m * n)
    lower = np.concatenate(([-np.inf], np.zeros(n + m * n)))
    upper = np.concatenate(([np.inf], np.ones(n + m * n)))
    names = ["eta"] + [f"x{j}" for j in range(n)] + [f"z{i}_{j}" for i in range(m) for j in range(n)]
    model = LpModel(obj, lower, upper, names)
    for i in range(m):
        for j in range(n):
            model.add_row({1 + n + i * n + j: 1.0, 1 + j: -1.0}, "<=", 0.0)
    for i in range(m):
        model.add_row({1 + n + i * n + j: 1.0 for j in range(n)}, "<=", 1.0)
    cut = ef_cut(inst, y)
    coef = {0: 1.0}
    for i in range(m):
        for j in range(n):
            coef[1 + n + i * n + j] = -cut.zcoef[i, j]
    model.add_row(coef, "<=", 0.0)
    return model


def _support(model: LpModel, alpha: float, beta: np.ndarray) -> float:
    model.objective = np.zeros(model.ncols)
    model.objective[0] = alpha
    model.objective[1 : 1 + beta.size] = beta
    res = lp_solve(model)
    if res.status != "optimal":
        raise RuntimeError(f"support LP failed: {res.status}")
    return res.objective


def verify_hull(inst: Instance, y, trials: int = 200, seed: int = 0) -> HullCheckReport:
    """Support-function agreement over random directions (objective weight
    on eta kept above 0.1 so every LP stays bounded and well conditioned)."""
    if inst.n > 10:
        raise CapExceededError("hull check enumerates 2^n integer points; n must stay small")
    rng = np.random.default_rng(seed)
    anchor = _anchor_polytope(inst, y)
    assign = _assignment_polytope(inst, y)
    cy = compute_cy(inst, y)
    corners = []
    for bits in itertools.product((0, 1), repeat=inst.n):
        x = np.array(bits, dtype=float)
        sites = open_sites(x)
        g = float(inst.w @ cy[:, sites].max(axis=1)) if sites.size else 0.0
        corners.append((x, g))
    worst = 0.0
    for _ in range(trials):
        d = rng.normal(size=1 + inst.n)
        d /= np.linalg.norm(d)
        while d[0] <= 0.1:
            d = rng.normal(size=1 + inst.n)
            d /= np.linalg.norm(d)
        alpha, beta = float(d[0]), d[1:]
        s_anchor = _support(anchor, alpha, beta)
        s_assign = _support(assign, alpha, beta)
        s_points = max(alpha * g + float(beta @ x) for x, g in corners)
        worst = max(
            worst,
            abs(s_anchor - s_assign),
            abs(s_anchor - s_points),
            abs(s_assign - s_points),
        )
    return HullCheckReport(inst.digest(), tuple(int(b) for b in np.asarray(y)), trials, worst)


def verify_prop61(inst: Instance, xstar, y) -> float:
    """|min over all anchor vectors of the cut RHS at xstar - weighted
    r-median value of the separation costs under y|; expected 0."""
    total = (inst.n + 1) ** inst.m
    if total > 200_000:
        raise CapExceededError(f"(n+1)^m = {total} anchor vectors is too many")
    xstar = np.asarray(xstar, dtype=float)
    cy = compute_cy(inst, y)
    best = math.inf
    for ell in itertools.product(range(inst.n + 1), repeat=inst.m):
        cut = improved_cut(inst, y, np.array(ell), cy)
        best = min(best, cut.rhs_at(xstar))
    rm = gsf_separation_costs(inst, xstar)
    ys = open_sites(y)
    reduced = float(inst.w @ rm.cost[:, ys].min(axis=1))
    return abs(best - reduced)


def greedy_assignment(inst: Instance, x, sigma: np.ndarray | None = None) -> np.ndarray:
    """Prefix-greedy allocation for leader vector x: walk sites in
    descending attractiveness, keep their x mass while below one, park the
    remaining mass on the next site.  Optimal for every follower choice at
    once, and integral whenever x is integral."""
    sigma = sigma_order(inst) if sigma is None else sigma
    xs = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    z = np.zeros((inst.m, inst.n))
    for i in range(inst.m):
        mass = 0.0
        for j in sigma[i]:
            if mass >= 1.0 - 1e-12:
                break
            take = min(float(xs[j]), 1.0 - mass)
            z[i, j] = take
            mass += take
    return z


@dataclass(frozen=True)
class AggregationReport:
    shared_value: float
    disaggregated_value: float
    max_greedy_gap: float
    max_dual_gap: float


def _per_customer_lp(ci: np.ndarray, x: np.ndarray) -> float:
    """max c.z s.t. 0 <= z <= x, sum z <= 1, solved as an LP."""
    n = ci.size
    model = LpModel(ci, np.zeros(n), np.asarray(x, dtype=float))
    model.add_row({j: 1.0 for j in range(n)}, "<=", 1.0)
    res = lp_solve(model)
    if res.status != "optimal":
        raise RuntimeError(f"per-customer LP failed: {res.status}")
    return res.objective


def verify_aggregation(inst: Instance, trials: int = 5, seed: int = 0, y_cap: int = 200) -> AggregationReport:
    """Shared vs per-follower-choice allocation blocks, plus greedy/dual
    closed forms against per-customer LP values at random fractional x."""
    n_y = math.comb(inst.n, inst.r)
    if n_y > y_cap or inst.m * inst.n > 400:
        raise CapExceededError("aggregation check needs an enumerable follower set and m*n <= 400")
    y_list = [indicator(inst.n, combo) for combo in itertools.combinations(range(inst.n), inst.r)]

    shared_model = build_model(inst, "EF")
    for y in y_list:
        add_cut_row(shared_model, inst, ef_cut(inst, y))
    shared = lp_solve(shared_model)
    if shared.status != "optimal":
        raise RuntimeError("shared-allocation LP failed")

    m, n = inst.m, inst.n
    ncols = 1 + n + len(y_list) * m * n
    obj = np.zeros(ncols)
    obj[0] = 1.0
    lower = np.concatenate(([-np.inf], np.zeros(ncols - 1)))
    upper = np.ones(ncols)
    upper[0] = inst.total_demand
    model = LpModel(obj, lower, upper)
    model.add_row({1 + j: 1.0 for j in range(n)}, "=", float(inst.p))
    for t, y in enumerate(y_list):
        base = 1 + n + t * m * n
        cy = compute_cy(inst, y)
        for i in range(m):
            for j in range(n):
                model.add_row({base + i * n + j: 1.0, 1 + j: -1.0}, "<=", 0.0)
        for i in range(m):
            model.add_row({base + i * n + j: 1.0 for j in range(n)}, "<=", 1.0)
        coef = {0: 1.0}
        for i in range(m):
            for j in range(n):
                coef[base + i * n + j] = -inst.w[i] * cy[i, j]
        model.add_row(coef, "<=", 0.0)
    disagg = lp_solve(model)
    if disagg.status != "optimal":
        raise RuntimeError("disaggregated-allocation LP failed")

    sigma = sigma_order(inst)
    rng = np.random.default_rng(seed)
    max_greedy = 0.0
    max_dual = 0.0
    for _ in range(trials):
        x = rng.uniform(0.0, 1.0, size=n)
        z = greedy_assignment(inst, x, sigma)
        ell = tight_ell(inst, x, sigma)
        for y in y_list:
            cy = compute_cy(inst, y)
            for i in range(m):
                lp_val = _per_customer_lp(cy[i], x)
                greedy_val = float(cy[i] @ z[i])
                u = cy[i, ell[i]] if ell[i] < n else 0.0
                dual_val = u + float(x @ np.maximum(cy[i] - u, 0.0))
                max_greedy = max(max_greedy, abs(lp_val - greedy_val))
                max_dual = max(max_dual, abs(lp_val - dual_val))
    return AggregationReport(shared.objective, disagg.objective, max_greedy, max_dual)
