"""Separation oracles for the three cut families.

Each oracle takes the current relaxation point, tries cheap heuristics
against a pool of previously optimal follower responses, and falls back to
an exact r-median solve.  An empty return from an exact pass certifies that
no inequality of the family is violated at the point; for the classic cuts
that certificate is only available at integral points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cuts import Cut, ef_cut, ef_separation_costs, gsf_separation_costs, improved_cut, sigma_order, submodular_cut, tight_ell
from .instance import Instance
from .market import indicator, response_costs
from .rmedian import RMedianConfig, rmedian_solve

EPS_VIOL = 1e-6  # absolute violation threshold


class FollowerPool:
    """Ordered set of distinct follower choices, scanned newest first.

    Members are optimal solutions of previously solved exact separation
    problems, so their cuts are the ones most likely to be violated again.
    """

    def __init__(self):
        self._members: list[np.ndarray] = []
        self._seen: set[bytes] = set()

    def add(self, y) -> bool:
        y = np.asarray(y, dtype=np.int8)
        key = y.tobytes()
        if key in self._seen:
            return False
        self._seen.add(key)
        self._members.append(y)
        return True

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self):
        return iter(reversed(self._members))


@dataclass(frozen=True)
class RelaxPoint:
    """LP solution handed to the oracles: objective value eta, leader
    vector x in [0,1]^n, and allocations z (extended formulation only)."""

    eta: float
    x: np.ndarray
    z: np.ndarray | None = None


def _violated(cut: Cut, pt: RelaxPoint, eps: float) -> bool:
    return pt.eta > cut.rhs_at(pt.x, pt.z) + eps


def is_integral(x, tol: float = 1e-6) -> bool:
    return bool(np.all(np.abs(x - np.round(x)) <= tol))


def separate_sf(
    pt: RelaxPoint,
    inst: Instance,
    pool: FollowerPool,
    eps: float = EPS_VIOL,
    rmedian_cfg: RMedianConfig | None = None,
) -> list[Cut]:
    """Classic-cut separation.

    Integral x: pool scan first, then an exact best-response r-median whose
    argmin joins the pool; an empty return certifies the point.  Fractional
    x: cuts are built at the rounded point (ties round up) for pool members
    only and returned when violated at the fractional point; no exactness is
    claimed.
    """
    if pt.z is not None:
        raise ValueError("classic separation takes points without allocations")
    if is_integral(pt.x):
        support = sorted(int(j) for j in np.flatnonzero(np.asarray(pt.x) > 0.5))
        hits = []
        for y in pool:
            cut = submodular_cut(inst, y, support)
            if _violated(cut, pt, eps):
                hits.append(cut)
        if hits:
            return hits
        sites, value, status = rmedian_solve(response_costs(inst, pt.x), rmedian_cfg)
        if status != "optimal":
            raise RuntimeError("exact separation hit the r-median limit")
        y_star = indicator(inst.n, sites)
        pool.add(y_star)
        cut = submodular_cut(inst, y_star, support)
        return [cut] if _violated(cut, pt, eps) else []
    rounded = np.floor(np.asarray(pt.x) + 0.5)  # ties at .5 round up
    support = sorted(int(j) for j in np.flatnonzero(rounded > 0.5))
    hits = []
    for y in pool:
        cut = submodular_cut(inst, y, support)
        if _violated(cut, pt, eps):
            hits.append(cut)
    return hits


def separate_gsf(
    pt: RelaxPoint,
    inst: Instance,
    pool: FollowerPool,
    eps: float = EPS_VIOL,
    sigma: np.ndarray | None = None,
    rmedian_cfg: RMedianConfig | None = None,
) -> list[Cut]:
    """Anchor-cut separation, exact at arbitrary points.

    The deepest anchor vector at x is follower independent, so the pool scan
    prices each member's cut directly; the exact pass solves the r-median on
    the anchor-reduction costs and certifies the point when its cut for the
    argmin follower choice is unviolated.
    """
    if pt.z is not None:
        raise ValueError("anchor separation takes points without allocations")
    sigma = sigma_order(inst) if sigma is None else sigma
    ell = tight_ell(inst, pt.x, sigma)
    hits = []
    for y in pool:
        cut = improved_cut(inst, y, ell)
        if _violated(cut, pt, eps):
            hits.append(cut)
    if hits:
        return hits
    rm = gsf_separation_costs(inst, pt.x, sigma)
    sites, value, status = rmedian_solve(rm, rmedian_cfg)
    if status != "optimal":
        raise RuntimeError("exact separation hit the r-median limit")
    y_star = indicator(inst.n, sites)
    pool.add(y_star)
    cut = improved_cut(inst, y_star, ell)
    return [cut] if _violated(cut, pt, eps) else []


def separate_ef(
    pt: RelaxPoint,
    inst: Instance,
    eps: float = EPS_VIOL,
    rmedian_cfg: RMedianConfig | None = None,
) -> list[Cut]:
    """Assignment-cut separation; always exact, no heuristic path."""
    if pt.z is None:
        raise ValueError("assignment separation needs allocations")
    rm = ef_separation_costs(inst, pt.z)
    sites, value, status = rmedian_solve(rm, rmedian_cfg)
    if status != "optimal":
        raise RuntimeError("exact separation hit the r-median limit")
    if value < pt.eta - eps:
        return [ef_cut(inst, indicator(inst.n, sites))]
    return []
