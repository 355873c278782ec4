"""Bounded-variable LP layer used by the branch-and-cut driver.

Models are maximization problems over a fixed column set with a growable
row set (cuts append rows).  Solves are delegated to HiGHS dual simplex via
scipy.optimize.linprog, which returns basic (vertex) solutions and is
deterministic for identical input; the ``warm`` argument is accepted for
interface stability and treated as advisory.  A solve never reports
"optimal" with primal residuals above 1e-7 -- numerical trouble surfaces as
status "iteration_limit" instead.

``to_lp_text`` renders a model in the LP interchange format (Maximize /
Subject To / Bounds / End sections, one row per line, ``<=``, ``>=``, ``=``
relations, 12 significant digits) so external solvers can cross-check any
model this package builds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

FEAS_TOL = 1e-7

_STATUS = {
    0: "optimal",
    1: "iteration_limit",
    2: "infeasible",
    3: "unbounded",
    4: "iteration_limit",
}


@dataclass
class LpRow:
    coef: dict[int, float]
    sense: str  # "<=", ">=", "="
    rhs: float
    tag: str = ""


class LpModel:
    """Dense-column maximization LP with mutable variable bounds."""

    def __init__(self, objective, lower, upper, names=None):
        self.objective = np.asarray(objective, dtype=float)
        self.lower = np.asarray(lower, dtype=float).copy()
        self.upper = np.asarray(upper, dtype=float).copy()
        self.ncols = self.objective.size
        if self.lower.shape != (self.ncols,) or self.upper.shape != (self.ncols,):
            raise ValueError("bound arrays must match the objective length")
        self.names = list(names) if names is not None else [f"v{j}" for j in range(self.ncols)]
        self.rows: list[LpRow] = []

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def add_row(self, coef, sense: str, rhs: float, tag: str = "") -> int:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"bad row sense {sense!r}")
        if isinstance(coef, dict):
            entries = {int(j): float(c) for j, c in coef.items() if c != 0.0}
        else:
            arr = np.asarray(coef, dtype=float)
            entries = {int(j): float(arr[j]) for j in np.flatnonzero(arr)}
        for j in entries:
            if not 0 <= j < self.ncols:
                raise ValueError(f"row references invalid column {j}")
        self.rows.append(LpRow(entries, sense, float(rhs), tag))
        return len(self.rows) - 1

    def _assemble(self):
        ub_i, ub_j, ub_v, ub_r = [], [], [], []
        eq_i, eq_j, eq_v, eq_r = [], [], [], []
        for row in self.rows:
            if row.sense == "=":
                k = len(eq_r)
                eq_r.append(row.rhs)
                for j, c in row.coef.items():
                    eq_i.append(k)
                    eq_j.append(j)
                    eq_v.append(c)
            else:
                flip = -1.0 if row.sense == ">=" else 1.0
                k = len(ub_r)
                ub_r.append(flip * row.rhs)
                for j, c in row.coef.items():
                    ub_i.append(k)
                    ub_j.append(j)
                    ub_v.append(flip * c)
        A_ub = (
            sparse.csr_matrix((ub_v, (ub_i, ub_j)), shape=(len(ub_r), self.ncols))
            if ub_r
            else None
        )
        A_eq = (
            sparse.csr_matrix((eq_v, (eq_i, eq_j)), shape=(len(eq_r), self.ncols))
            if eq_r
            else None
        )
        return A_ub, (np.array(ub_r) if ub_r else None), A_eq, (np.array(eq_r) if eq_r else None)

    def to_lp_text(self) -> str:
        def num(x: float) -> str:
            return f"{x:.12g}"

        def expr(coef: dict[int, float]) -> str:
            parts = []
            for j in sorted(coef):
                c = coef[j]
                if not parts:
                    parts.append(f"{'-' if c < 0 else ''}{num(abs(c))} {self.names[j]}")
                else:
                    parts.append(f"{'-' if c < 0 else '+'} {num(abs(c))} {self.names[j]}")
            return " ".join(parts) if parts else "0"

        lines = ["Maximize", f" obj: {expr({j: c for j, c in enumerate(self.objective) if c != 0.0})}"]
        lines.append("Subject To")
        for k, row in enumerate(self.rows):
            tag = row.tag or f"c{k}"
            lines.append(f" {tag}: {expr(row.coef)} {row.sense} {num(row.rhs)}")
        lines.append("Bounds")
        for j in range(self.ncols):
            lo = "-inf" if np.isneginf(self.lower[j]) else num(self.lower[j])
            hi = "+inf" if np.isposinf(self.upper[j]) else num(self.upper[j])
            lines.append(f" {lo} <= {self.names[j]} <= {hi}")
        lines.append("End")
        return "\n".join(lines) + "\n"


@dataclass
class LpResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    objective: float
    x: np.ndarray | None
    basis: object = None  # advisory warm-start token
    max_violation: float = 0.0
    message: str = ""


def _violation(model: LpModel, x: np.ndarray) -> float:
    worst = max(
        float(np.max(model.lower - x, initial=0.0)),
        float(np.max(x - model.upper, initial=0.0)),
    )
    for row in model.rows:
        lhs = sum(c * x[j] for j, c in row.coef.items())
        if row.sense == "<=":
            worst = max(worst, lhs - row.rhs)
        elif row.sense == ">=":
            worst = max(worst, row.rhs - lhs)
        else:
            worst = max(worst, abs(lhs - row.rhs))
    return worst


def lp_solve(model: LpModel, warm=None) -> LpResult:
    """Maximize the model objective; see module docstring for guarantees."""
    A_ub, b_ub, A_eq, b_eq = model._assemble()
    bounds = [
        (None if np.isneginf(lo) else lo, None if np.isposinf(hi) else hi)
        for lo, hi in zip(model.lower, model.upper)
    ]
    res = linprog(
        c=-model.objective,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs-ds",
    )
    status = _STATUS.get(res.status, "iteration_limit")
    if status != "optimal":
        return LpResult(status, float("nan"), None, None, float("inf"), res.message)
    x = np.asarray(res.x, dtype=float)
    viol = _violation(model, x)
    if viol > FEAS_TOL:
        return LpResult("iteration_limit", float("nan"), None, None, viol, "residuals above tolerance")
    return LpResult("optimal", float(model.objective @ x), x, None, viol, res.message)
