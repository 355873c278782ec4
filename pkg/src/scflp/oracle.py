"""Ground-truth solvers used by tests and acceptance checks.

``brute_force_solve`` enumerates every leader/follower pair of the max-min
problem.  ``full_lp_value`` evaluates the LP relaxation of a formulation
with its cut family fully described (explicit rows for SF and EF, exact
row generation run to convergence for GSF).  Neither is built for speed;
caps are explicit and exceeding one raises instead of truncating.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bnc import add_cut_row, build_model
from .cuts import ef_cut, improved_cut, submodular_cut
from .instance import Instance
from .lp import lp_solve
from .market import indicator
from .rmedian import CapExceededError
from .separation import FollowerPool, RelaxPoint, separate_gsf

TIE_TOL = 1e-12


@dataclass(frozen=True)
class OracleReport:
    value: float
    optimal_x: list  # all maximizing leader choices, lexicographic order
    responses: dict | None = None  # x bits -> (y bits, value), when requested


def _follower_tables(inst: Instance):
    """Stack max attractiveness per follower choice: (|Y|, m) array plus
    the choice list in lexicographic order."""
    combos = list(itertools.combinations(range(inst.n), inst.r))
    vy = np.empty((len(combos), inst.m))
    for t, combo in enumerate(combos):
        vy[t] = inst.v[:, combo].max(axis=1)
    return combos, vy


def brute_force_solve(inst: Instance, cap: int = 10_000_000, collect_responses: bool = False) -> OracleReport:
    """Exhaustive max-min enumeration; ties on the max side are collected."""
    pairs = math.comb(inst.n, inst.p) * math.comb(inst.n, inst.r)
    if pairs > cap:
        raise CapExceededError(f"{pairs} pair evaluations exceed cap {cap}")
    y_combos, vy = _follower_tables(inst)
    w = inst.w
    best = -math.inf
    ties: list[tuple] = []
    responses = {} if collect_responses else None
    for x_combo in itertools.combinations(range(inst.n), inst.p):
        ci = inst.v[:, x_combo].max(axis=1)
        g = (ci[None, :] / (ci[None, :] + vy)) @ w
        t = int(np.argmin(g))  # first minimizer = lexicographically smallest y
        val = float(g[t])
        if responses is not None:
            xbits = tuple(indicator(inst.n, x_combo))
            responses[xbits] = (indicator(inst.n, y_combos[t]), val)
        if val > best + TIE_TOL * (1.0 + abs(val)):
            best = val
            ties = [x_combo]
        elif val >= best - TIE_TOL * (1.0 + abs(best)):
            ties.append(x_combo)
    optimal_x = [indicator(inst.n, combo) for combo in ties]
    return OracleReport(value=best, optimal_x=optimal_x, responses=responses)


def full_lp_value(
    inst: Instance,
    formulation: str,
    row_cap: int = 200_000,
    y_cap: int = 100_000,
    eps: float = 1e-10,
) -> float:
    """Exact LP relaxation value of the fully described formulation."""
    n_y = math.comb(inst.n, inst.r)
    if n_y > y_cap:
        raise CapExceededError(f"|Y| = {n_y} exceeds cap {y_cap}")
    if formulation == "SF":
        total = (2**inst.n) * n_y
        if total > row_cap:
            raise CapExceededError(f"SF needs {total} rows, above cap {row_cap}")
        model = build_model(inst, "SF")
        for y_combo in itertools.combinations(range(inst.n), inst.r):
            y = indicator(inst.n, y_combo)
            for size in range(inst.n + 1):
                for S in itertools.combinations(range(inst.n), size):
                    add_cut_row(model, inst, submodular_cut(inst, y, S))
        res = lp_solve(model)
        if res.status != "optimal":
            raise RuntimeError(f"SF relaxation LP failed: {res.status}")
        return res.objective
    if formulation == "EF":
        model = build_model(inst, "EF")
        for y_combo in itertools.combinations(range(inst.n), inst.r):
            add_cut_row(model, inst, ef_cut(inst, indicator(inst.n, y_combo)))
        res = lp_solve(model)
        if res.status != "optimal":
            raise RuntimeError(f"EF relaxation LP failed: {res.status}")
        return res.objective
    if formulation != "GSF":
        raise ValueError(f"unknown formulation {formulation!r}")
    # exact row generation to convergence
    model = build_model(inst, "GSF")
    pool = FollowerPool()
    registry: set[tuple] = set()
    for _ in range(100_000):
        res = lp_solve(model)
        if res.status != "optimal":
            raise RuntimeError(f"GSF relaxation LP failed: {res.status}")
        pt = RelaxPoint(eta=res.x[0], x=res.x[1 : 1 + inst.n])
        cuts = separate_gsf(pt, inst, pool, eps=eps)
        fresh = [c for c in cuts if c.provenance not in registry]
        if not fresh:
            return res.objective
        for cut in fresh:
            registry.add(cut.provenance)
            add_cut_row(model, inst, cut)
    raise RuntimeError("GSF row generation failed to converge")


def enumerate_gsf_value(inst: Instance, ell_cap: int = 100_000) -> float:
    """GSF relaxation via the explicit anchor-cut family; cross-check path
    for desk-scale instances ((n+1)^m anchor vectors per follower choice)."""
    n_ell = (inst.n + 1) ** inst.m
    if n_ell > ell_cap:
        raise CapExceededError(f"(n+1)^m = {n_ell} exceeds cap {ell_cap}")
    model = build_model(inst, "GSF")
    for y_combo in itertools.combinations(range(inst.n), inst.r):
        y = indicator(inst.n, y_combo)
        for ell in itertools.product(range(inst.n + 1), repeat=inst.m):
            add_cut_row(model, inst, improved_cut(inst, y, np.array(ell)))
    res = lp_solve(model)
    if res.status != "optimal":
        raise RuntimeError(f"GSF enumeration LP failed: {res.status}")
    return res.objective
