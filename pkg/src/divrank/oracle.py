"""Independent ground-truth solvers for testing and the verify command.

These deliberately avoid the production dual/solver code paths: the dual is
re-evaluated from scratch with plain sorts, the minimizer is located on the
exhaustive O(m^2) grid of candidate crossing ratios, and tiny instances are
settled by enumerating every injective assignment and every two-assignment
mixture.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dual import OneSidedInstance
from .model import Instance

# Largest m accepted by the breakpoint oracle (the grid is O(m^2)).
BREAKPOINT_SIZE_CAP = 2000
# Largest (m, n) accepted by the brute-force oracle.
BRUTE_FORCE_CAP = (7, 3)
# Candidate ratios closer than this (relative) are merged into one kink.
MERGE_RTOL = 1e-12


class SizeCapError(ValueError):
    """Instance too large for an exhaustive oracle."""


class UnboundedDualError(ValueError):
    """g decreases for all lambda: the one-sided problem is infeasible."""


@dataclass(frozen=True)
class OracleDualResult:
    lambda_star: float
    g_star: float
    breakpoints: np.ndarray  # 0 followed by all positive candidate ratios
    g_minus: Optional[float]  # slope just left of lambda*, None at lambda*=0
    g_plus: float  # slope just right of lambda*


def _g_value(inst: OneSidedInstance, lam: float) -> float:
    z = inst.c - lam * inst.a
    top = np.sort(z)[::-1][:inst.n]
    return float(np.dot(inst.w, top)) + inst.b2 * lam


def _slope_at(inst: OneSidedInstance, lam: float) -> float:
    """Derivative of g on the linear piece containing lam (lam not a kink)."""
    z = inst.c - lam * inst.a
    idx = np.argsort(-z, kind="stable")[:inst.n]
    return inst.b2 - float(np.dot(inst.w, inst.a[idx]))


def _candidate_grid(inst: OneSidedInstance) -> np.ndarray:
    """0 plus every positive pairwise crossing ratio, merged at MERGE_RTOL."""
    a = inst.a
    c = inst.c
    da = a[:, None] - a[None, :]
    dc = c[:, None] - c[None, :]
    a_tol = 1e-15 * float(np.max(np.abs(a))) if a.size else 0.0
    mask = np.abs(da) > a_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        r = dc[mask] / da[mask]
    r = r[np.isfinite(r) & (r > 0.0)]
    r = np.unique(r)
    if r.size > 1:
        keep = np.empty(r.size, dtype=bool)
        keep[0] = True
        last = r[0]
        for i in range(1, r.size):
            if r[i] - last > MERGE_RTOL * (1.0 + abs(r[i])):
                keep[i] = True
                last = r[i]
            else:
                keep[i] = False
        r = r[keep]
    return np.concatenate(([0.0], r))


def _gap_midpoint(grid: np.ndarray, i: int) -> float:
    if i + 1 < grid.shape[0]:
        return 0.5 * (grid[i] + grid[i + 1])
    return grid[i] + 1.0 + grid[i]  # representative of the unbounded tail


def oracle_dual_breakpoints(inst: OneSidedInstance,
                            size_cap: int = BREAKPOINT_SIZE_CAP) -> OracleDualResult:
    """Exact dual minimizer from the exhaustive crossing-ratio grid.

    Between consecutive grid points g is linear (every kink is a grid point)
    and its slope is nondecreasing by convexity, so the first gap with
    nonnegative slope pins lambda*: the left end of that gap, favoring the
    smallest minimizer on a flat stretch. Exact up to float arithmetic.
    """
    if inst.m > size_cap:
        raise SizeCapError(f"m={inst.m} exceeds the breakpoint oracle cap {size_cap}")
    grid = _candidate_grid(inst)
    n_gaps = grid.shape[0]  # gap i follows grid[i]
    if _slope_at(inst, _gap_midpoint(grid, n_gaps - 1)) < 0.0:
        raise UnboundedDualError("g decreases on the final piece; "
                                 "upper bound unattainable")
    lo, hi = 0, n_gaps - 1
    if _slope_at(inst, _gap_midpoint(grid, 0)) >= 0.0:
        first = 0
    else:
        # Invariant: slope(gap lo) < 0 <= slope(gap hi).
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _slope_at(inst, _gap_midpoint(grid, mid)) >= 0.0:
                hi = mid
            else:
                lo = mid
        first = hi
    lam_star = float(grid[first])
    g_minus = None if first == 0 else _slope_at(inst, _gap_midpoint(grid, first - 1))
    g_plus = _slope_at(inst, _gap_midpoint(grid, first))
    return OracleDualResult(
        lambda_star=lam_star,
        g_star=_g_value(inst, lam_star),
        breakpoints=grid,
        g_minus=g_minus,
        g_plus=g_plus,
    )


def oracle_kink_set(inst: OneSidedInstance,
                    size_cap: int = 200) -> np.ndarray:
    """True kinks of g: grid points whose neighboring pieces change slope.

    Evaluates the slope on every gap (dense scan), so keep m small.
    """
    if inst.m > size_cap:
        raise SizeCapError(f"m={inst.m} exceeds the kink-scan cap {size_cap}")
    grid = _candidate_grid(inst)
    mids = np.array([_gap_midpoint(grid, i) for i in range(grid.shape[0])])
    z = inst.c[None, :] - mids[:, None] * inst.a[None, :]
    idx = np.argsort(-z, axis=1, kind="stable")[:, :inst.n]
    slopes = inst.b2 - inst.a[idx] @ inst.w
    jump = np.abs(np.diff(slopes))
    scale = 1.0 + np.abs(slopes[:-1])
    is_kink = jump > 1e-12 * scale
    return grid[1:][is_kink]


@dataclass(frozen=True)
class BruteForceResult:
    feasible: bool
    objective: Optional[float]
    rho: float
    slots1: tuple[int, ...]
    slots2: tuple[int, ...]

    def support(self) -> set[int]:
        sup: set[int] = set()
        if self.rho > 0.0:
            sup.update(self.slots1)
        if self.rho < 1.0:
            sup.update(self.slots2)
        return sup


def brute_force_tiny(inst: Instance,
                     size_cap: tuple[int, int] = BRUTE_FORCE_CAP) -> BruteForceResult:
    """Exhaustive optimum over all assignments and two-assignment mixtures.

    An optimal solution always exists in that family: the feasible region is
    the polytope cut by two parallel hyperplanes, so some optimal point lies
    on an edge between two assignment vertices. Reports infeasibility when
    no mixture meets the bounds.
    """
    if inst.m > size_cap[0] or inst.n > size_cap[1]:
        raise SizeCapError(f"(m={inst.m}, n={inst.n}) exceeds brute-force cap {size_cap}")
    verts = np.array(list(itertools.permutations(range(inst.m), inst.n)),
                     dtype=np.intp)
    obj_v = inst.c[verts] @ inst.w
    div_v = inst.a[verts] @ inst.w

    d1 = div_v[:, None]
    d2 = div_v[None, :]
    denom = d1 - d2
    with np.errstate(divide="ignore", invalid="ignore"):
        r_a = (inst.b1 - d2) / denom
        r_b = (inst.b2 - d2) / denom
    lo = np.where(denom > 0.0, r_a, r_b)
    hi = np.where(denom > 0.0, r_b, r_a)
    flat = denom == 0.0
    flat_ok = flat & (inst.b1 <= d2) & (d2 <= inst.b2)
    lo = np.where(flat, np.where(flat_ok, 0.0, 1.0), lo)
    hi = np.where(flat, np.where(flat_ok, 1.0, 0.0), hi)
    lo = np.maximum(lo, 0.0)
    hi = np.minimum(hi, 1.0)
    ok = lo <= hi
    if not np.any(ok):
        return BruteForceResult(feasible=False, objective=None, rho=1.0,
                                slots1=(), slots2=())
    slope = obj_v[:, None] - obj_v[None, :]
    rho_best = np.where(slope >= 0.0, hi, lo)
    val = obj_v[None, :] + rho_best * slope
    val = np.where(ok, val, -np.inf)
    flat_idx = int(np.argmax(val))
    i, j = divmod(flat_idx, val.shape[1])
    rho = float(rho_best[i, j])
    return BruteForceResult(
        feasible=True,
        objective=float(val[i, j]),
        rho=rho,
        slots1=tuple(int(x) for x in verts[i]),
        slots2=tuple(int(x) for x in verts[j]),
    )


def oracle_support(inst: OneSidedInstance, lambda_star: float,
                   rtol: float = 1e-9) -> np.ndarray:
    """Candidates that any optimal solution may use: the top n scores at
    lambda*, widened by a relative tolerance to absorb the tie group."""
    z = inst.c - lambda_star * inst.a
    thr = np.partition(z, inst.m - inst.n)[inst.m - inst.n]
    tol = rtol * max(1.0, float(np.max(np.abs(z))))
    return np.flatnonzero(z >= thr - tol)
