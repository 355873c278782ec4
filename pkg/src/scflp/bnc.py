"""LP-based branch-and-cut driver for the three reformulations.

The driver loops: pop the open node with the best bound, solve its LP, run
the formulation's separation (pool heuristic first, exact fallback), resolve
while violated cuts arrive, and either accept a certified integral point as
incumbent or branch on the most fractional leader variable.  Cuts are
globally valid and shared by every node.  Incumbent values are recomputed
with an exact best-response solve, so reported objectives do not inherit LP
or separation tolerances.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .cuts import Cut, ef_cut, improved_cut, sigma_order, submodular_cut, tight_ell
from .instance import Instance
from .lp import LpModel, lp_solve
from .market import follower_best_response, indicator
from .rmedian import RMedianConfig
from .separation import EPS_VIOL, FollowerPool, RelaxPoint, is_integral, separate_ef, separate_gsf, separate_sf

FORMULATIONS = ("SF", "GSF", "EF")


@dataclass(frozen=True)
class BncConfig:
    formulation: str = "GSF"
    time_limit: float = 7200.0
    gap_tol: float = 0.0  # relative; solve certifies (UB - LB)/UB <= gap_tol
    node_selection: str = "best-bound"
    branching: str = "most-fractional"
    seed: int = 0
    sep_rounds: int = 50  # fractional separation rounds per tree node
    root_sep_rounds: int = 10_000  # the root runs its cut loop to convergence
    eps_viol: float = EPS_VIOL
    int_tol: float = 1e-6
    rmedian: RMedianConfig | None = None

    def __post_init__(self):
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.formulation!r}")
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")
        if self.gap_tol < 0:
            raise ValueError("gap tolerance must be nonnegative")


@dataclass
class SolveReport:
    """Solve outcome plus the usual search statistics."""

    instance_digest: str
    formulation: str
    objective: float  # best incumbent value (exact best-response evaluation)
    best_x: np.ndarray | None
    upper_bound: float
    gap_pct: float
    nodes: int  # explored nodes beyond the root
    cuts: int
    sep_time_s: float
    total_time_s: float
    root_bound: float
    root_gap_pct: float  # (root bound - objective) / objective * 100
    status: str  # "optimal" | "limit"

    def csv_row(self, label: str) -> str:
        obj = "" if math.isnan(self.objective) else f"{self.objective:.6f}"
        rg = "" if math.isnan(self.root_gap_pct) else f"{self.root_gap_pct:.4f}"
        return (
            f"{label},{self.formulation},{obj},{self.total_time_s:.3f},{self.nodes},"
            f"{self.cuts},{self.sep_time_s:.3f},{rg},{self.status}"
        )


CSV_HEADER = "instance,formulation,objective,time_s,nodes,cuts,sep_time_s,root_gap_pct,status"


def build_model(inst: Instance, formulation: str) -> LpModel:
    """Base relaxation: objective variable eta capped by total demand,
    leader variables in [0,1] summing to p, and for EF the allocation
    variables with their linking rows."""
    n, m = inst.n, inst.m
    ncols = 1 + n + (m * n if formulation == "EF" else 0)
    obj = np.zeros(ncols)
    obj[0] = 1.0
    lower = np.zeros(ncols)
    lower[0] = -np.inf
    upper = np.ones(ncols)
    upper[0] = inst.total_demand  # valid cap: every capture ratio is below 1
    names = ["eta"] + [f"x{j}" for j in range(n)]
    if formulation == "EF":
        names += [f"z{i}_{j}" for i in range(m) for j in range(n)]
    model = LpModel(obj, lower, upper, names)
    model.add_row({1 + j: 1.0 for j in range(n)}, "=", float(inst.p), "card")
    if formulation == "EF":
        for i in range(m):
            for j in range(n):
                model.add_row({zcol(inst, i, j): 1.0, 1 + j: -1.0}, "<=", 0.0, f"open{i}_{j}")
        for i in range(m):
            model.add_row({zcol(inst, i, j): 1.0 for j in range(n)}, "<=", 1.0, f"one{i}")
    return model


def zcol(inst: Instance, i: int, j: int) -> int:
    return 1 + inst.n + i * inst.n + j


def add_cut_row(model: LpModel, inst: Instance, cut: Cut) -> int:
    coef = {0: 1.0}
    if cut.kind == "EF":
        for i in range(inst.m):
            for j in range(inst.n):
                c = cut.zcoef[i, j]
                if c != 0.0:
                    coef[zcol(inst, i, j)] = -c
    else:
        for j in range(inst.n):
            c = cut.xcoef[j]
            if c != 0.0:
                coef[1 + j] = -c
    return model.add_row(coef, "<=", cut.constant, f"cut{model.nrows}")


class _Search:
    """Shared state of one branch-and-cut run."""

    def __init__(self, inst: Instance, cfg: BncConfig, events=None):
        self.inst = inst
        self.cfg = cfg
        self.model = build_model(inst, cfg.formulation)
        self.sigma = sigma_order(inst)
        self.pool = FollowerPool()
        self.registry: set[tuple] = set()
        self.cuts = 0
        self.sep_time = 0.0
        self.t0 = time.perf_counter()
        self.events = events

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0

    def out_of_time(self) -> bool:
        return self.elapsed() > self.cfg.time_limit

    def emit(self, payload: dict):
        if self.events is not None:
            self.events.write(json.dumps(payload) + "\n")

    def point(self, res) -> RelaxPoint:
        n = self.inst.n
        x = res.x[1 : 1 + n]
        z = None
        if self.cfg.formulation == "EF":
            z = res.x[1 + n :].reshape(self.inst.m, n)
        return RelaxPoint(eta=res.x[0], x=x, z=z)

    def separate(self, pt: RelaxPoint) -> list[Cut]:
        t = time.perf_counter()
        form = self.cfg.formulation
        if form == "SF":
            cuts = separate_sf(pt, self.inst, self.pool, self.cfg.eps_viol, self.cfg.rmedian)
        elif form == "GSF":
            cuts = separate_gsf(pt, self.inst, self.pool, self.cfg.eps_viol, self.sigma, self.cfg.rmedian)
        else:
            cuts = separate_ef(pt, self.inst, self.cfg.eps_viol, self.cfg.rmedian)
        self.sep_time += time.perf_counter() - t
        return cuts

    def install(self, cuts: list[Cut]) -> int:
        fresh = 0
        for cut in cuts:
            if cut.provenance in self.registry:
                continue
            self.registry.add(cut.provenance)
            add_cut_row(self.model, self.inst, cut)
            fresh += 1
        self.cuts += fresh
        return fresh

    def cut_loop(self, is_root: bool, lb: float):
        """Solve-separate at the current bounds until certified, out of
        fractional rounds, dominated, or infeasible.

        Returns (outcome, objective, point) where outcome is one of
        "certified", "branch", "dominated", "infeasible", "timeout".
        """
        cap = self.cfg.root_sep_rounds if is_root else self.cfg.sep_rounds
        frac_rounds = 0
        while True:
            res = lp_solve(self.model)
            if res.status == "infeasible":
                return "infeasible", -math.inf, None
            if res.status != "optimal":
                raise RuntimeError(f"LP failure: {res.status} ({res.message})")
            obj = res.objective
            if _dominated(obj, lb, self.cfg.gap_tol):
                return "dominated", obj, None
            pt = self.point(res)
            integral = is_integral(pt.x, self.cfg.int_tol)
            if self.out_of_time():
                return "timeout", obj, pt
            fresh = self.install(self.separate(pt))
            if fresh == 0:
                return ("certified" if integral else "branch"), obj, pt
            if not integral:
                frac_rounds += 1
                if frac_rounds >= cap:
                    return "branch", obj, pt  # round cap; branch at the last point


def _dominated(bound: float, lb: float, gap_tol: float) -> bool:
    # prune epsilon keeps the certified objective within 2e-10 of the truth
    return bound * (1.0 - gap_tol) <= lb + 2e-10 * (1.0 + abs(lb))


def _exact_value(inst: Instance, x, cfg: BncConfig) -> float:
    _, value = follower_best_response(inst, x, mode="rmedian", cfg=cfg.rmedian)
    return value


def _tight_cut(search: _Search, xint: np.ndarray, y_star: np.ndarray) -> Cut:
    """Cut whose right-hand side at the integral point xint equals the exact
    best-response value under y_star; closes the eps_viol slack the
    separation threshold may leave on the node objective."""
    inst = search.inst
    form = search.cfg.formulation
    if form == "SF":
        return submodular_cut(inst, y_star, [int(j) for j in np.flatnonzero(xint)])
    if form == "GSF":
        return improved_cut(inst, y_star, tight_ell(inst, np.asarray(xint, dtype=float), search.sigma))
    return ef_cut(inst, y_star)


def _most_fractional(x: np.ndarray, tol: float) -> int:
    frac = 0.5 - np.abs(x - 0.5)
    frac[np.abs(x - np.round(x)) <= tol] = -1.0
    return int(np.argmax(frac))


def solve(inst: Instance, cfg: BncConfig, events=None) -> SolveReport:
    """Run the branch-and-cut search; see the module docstring."""
    digest = inst.digest()
    t0 = time.perf_counter()

    if inst.p == inst.n:  # single leader choice
        x = indicator(inst.n, range(inst.n))
        val = _exact_value(inst, x, cfg)
        dt = time.perf_counter() - t0
        return SolveReport(digest, cfg.formulation, val, x, val, 0.0, 0, 0, 0.0, dt, val, 0.0, "optimal")

    search = _Search(inst, cfg, events)
    n = inst.n
    lb, best_x = -math.inf, None
    root_bound = math.nan
    status = "optimal"
    counter = itertools.count()
    heap = [(-inst.total_demand, next(counter), frozenset(), frozenset())]
    processed = 0

    while heap:
        neg_bound, _, fix0, fix1 = heapq.heappop(heap)
        bound = -neg_bound
        if _dominated(bound, lb, cfg.gap_tol):
            continue
        if search.out_of_time():
            heapq.heappush(heap, (neg_bound, next(counter), fix0, fix1))
            status = "limit"
            break
        processed += 1
        is_root = processed == 1

        saved_lower = search.model.lower[1 : 1 + n].copy()
        saved_upper = search.model.upper[1 : 1 + n].copy()
        incumbent_candidate = None
        try:
            for j in fix0:
                search.model.upper[1 + j] = 0.0
            for j in fix1:
                search.model.lower[1 + j] = 1.0
            while True:
                outcome, obj, pt = search.cut_loop(is_root, lb)
                if outcome != "certified":
                    break
                xint = np.round(pt.x).astype(np.int8)
                y_star, val = follower_best_response(inst, xint, mode="rmedian", cfg=cfg.rmedian)
                if obj <= val + 2e-10 * (1.0 + abs(val)):
                    incumbent_candidate = (xint, val)
                    break
                # separation's violation threshold left the node objective
                # above the exact value: force the tight cut and resolve
                if search.install([_tight_cut(search, xint, y_star)]) == 0:
                    incumbent_candidate = (xint, val)
                    break
        finally:
            search.model.lower[1 : 1 + n] = saved_lower
            search.model.upper[1 : 1 + n] = saved_upper

        if is_root:
            root_bound = obj if outcome != "infeasible" else math.nan
        search.emit(
            {
                "event": "node",
                "processed": processed,
                "outcome": outcome,
                "bound": None if obj == -math.inf else obj,
                "incumbent": None if lb == -math.inf else lb,
                "open": len(heap),
                "cuts": search.cuts,
            }
        )

        if outcome in ("infeasible", "dominated"):
            continue
        if outcome == "timeout":
            heapq.heappush(heap, (-obj, next(counter), fix0, fix1))
            status = "limit"
            break
        if outcome == "certified":
            xint, val = incumbent_candidate
            if val > lb:
                lb, best_x = val, xint
            continue
        # branch on the most fractional leader variable
        j_star = _most_fractional(pt.x, cfg.int_tol)
        up = (fix0, fix1 | {j_star})
        down = (fix0 | {j_star}, fix1)
        for child0, child1 in (up, down):
            if len(child1) <= inst.p and n - len(child0) >= inst.p:
                heapq.heappush(heap, (-obj, next(counter), child0, child1))

    ub = lb
    if heap:
        open_bounds = [-hb for hb, *_ in heap]
        ub = max(lb, max(open_bounds, default=lb))
    gap = 0.0 if status == "optimal" else (ub - lb) / ub * 100.0 if ub > 0 else math.inf
    objective = lb if best_x is not None else math.nan
    rg = math.nan
    if best_x is not None and objective > 0 and not math.isnan(root_bound):
        rg = (root_bound - objective) / objective * 100.0
    dt = time.perf_counter() - t0
    report = SolveReport(
        digest,
        cfg.formulation,
        objective,
        best_x,
        ub,
        gap,
        max(processed - 1, 0),
        search.cuts,
        search.sep_time,
        dt,
        root_bound,
        rg,
        status,
    )
    search.emit({"event": "done", "objective": None if math.isnan(objective) else objective, "bound": ub, "nodes": report.nodes, "cuts": report.cuts, "status": status})
    return report


def root_relaxation(inst: Instance, cfg: BncConfig, true_opt: float | None = None):
    """Run the cut loop at the root only; returns (bound, root gap %).

    The gap is (bound - opt) / opt * 100 with opt the supplied true optimum
    or, when omitted, the optimum of a full solve under the same config.
    """
    if inst.p == inst.n:
        x = indicator(inst.n, range(inst.n))
        val = _exact_value(inst, x, cfg)
        return val, 0.0
    search = _Search(inst, cfg)
    outcome, obj, _ = search.cut_loop(is_root=True, lb=-math.inf)
    if outcome == "infeasible":
        raise RuntimeError("root relaxation infeasible")
    opt = true_opt if true_opt is not None else solve(inst, cfg).objective
    return obj, (obj - opt) / opt * 100.0
