"""Boundary of the rate-equivocation region.

Each boundary point is the optimum of the tangent objective
``mu*I_B + (1-mu)*(I_B - I_E)`` for one ``mu`` in ``[0, 1]``.  ``mu = 0``
gives the secrecy-capacity point and ``mu = 1`` the capacity of the
legitimate channel.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelParams, DiscreteDistribution, IntensityConstraints
from .errors import DomainError, SolverStallError
from .optimizer import SolveResult, SolverConfig, solve

DEFAULT_MU_POINTS = 21


@dataclass(frozen=True)
class RegionPoint:
    """One point ``(R, R_e)`` on the boundary together with its input law."""

    mu: float
    rate_R: float
    equivocation_Re: float
    dist: DiscreteDistribution
    gamma: float = 0.0

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "rate_R": self.rate_R,
            "equivocation_Re": self.equivocation_Re,
            "gamma": self.gamma,
            "dist": self.dist.to_dict(),
        }


def default_mu_grid(n: int = DEFAULT_MU_POINTS) -> np.ndarray:
    if n < 1:
        raise DomainError("mu grid needs at least one point")
    if n == 1:
        return np.array([0.0])
    return np.linspace(0.0, 1.0, n)


def _point(result: SolveResult) -> RegionPoint:
    return RegionPoint(mu=result.mu, rate_R=result.rate_b,
                       equivocation_Re=result.rate_b - result.rate_e,
                       dist=result.dist, gamma=result.gamma)


def _solve_at(mu, params, constraints, config, initial=None) -> SolveResult:
    try:
        return solve(mu, params, constraints, config, initial=initial)
    except SolverStallError as exc:
        diagnostics = dict(exc.diagnostics)
        diagnostics["mu"] = mu
        raise SolverStallError(f"mu={mu:g}: {exc}", best=exc.best,
                               diagnostics=diagnostics) from exc


def _cold(args) -> SolveResult:
    return _solve_at(*args)


def trace_boundary(params: ChannelParams, constraints: IntensityConstraints,
                   mu_grid: Sequence[float] | None = None,
                   config: SolverConfig = SolverConfig(), *,
                   warm_start: bool = True, jobs: int = 1) -> list[RegionPoint]:
    """Solve the tangent problem for every ``mu`` in ``mu_grid``.

    Parameters
    ----------
    params, constraints
        Channel and input constraints; a peak bound is required.
    mu_grid
        Values in ``[0, 1]``.  Defaults to 21 uniform values.
    config
        Solver settings shared by all points.
    warm_start
        Seed each solve with the previous optimum.  This forces sequential
        execution; with ``warm_start=False`` up to ``jobs`` worker
        processes are used.

    Returns
    -------
    list of RegionPoint
        Sorted by ``mu``.
    """
    mus = default_mu_grid() if mu_grid is None else np.asarray(mu_grid, dtype=float)
    mus = np.unique(mus)
    if mus.size == 0:
        raise DomainError("empty mu grid")
    if mus[0] < 0.0 or mus[-1] > 1.0:
        raise DomainError("mu values must lie in [0, 1]")

    if warm_start or jobs <= 1:
        results = []
        prev = None
        for mu in mus:
            res = _solve_at(float(mu), params, constraints, config,
                            initial=prev if warm_start else None)
            results.append(res)
            prev = res.dist
    else:
        tasks = [(float(mu), params, constraints, config) for mu in mus]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cold, tasks))
    return [_point(r) for r in results]


def _endpoint(points: Sequence[RegionPoint], mu: float) -> RegionPoint:
    for pt in points:
        if pt.mu == mu:
            return pt
    raise DomainError(f"boundary has no point at mu={mu:g}")


def distributions_differ(a: DiscreteDistribution, b: DiscreteDistribution, tol: float) -> bool:
    """Compare two laws point by point after nearest-location matching."""
    if a.locations.size != b.locations.size:
        return True
    used = set()
    for x, p in zip(a.locations, a.weights):
        j = int(np.argmin(np.abs(b.locations - x)))
        if j in used:
            return True
        used.add(j)
        if abs(b.locations[j] - x) > tol or abs(b.weights[j] - p) > tol:
            return True
    return False


def detect_tradeoff(points: Sequence[RegionPoint], tol: float | None = None, *,
                    peak: float | None = None, merge_tol: float = 1e-4,
                    value_tol: float = 1e-9) -> bool:
    """Whether secrecy and reliability are maximized by different inputs.

    The ``mu = 0`` and ``mu = 1`` distributions are aligned by nearest
    location; a count mismatch or any location/weight gap above ``tol``
    means the two optima cannot be met at once.  The one exception is a
    ``mu = 1`` law whose equivocation already reaches the ``mu = 0`` value
    within ``value_tol``: it attains both maxima, so nothing is traded off.
    This covers identical channels, where every law has zero secrecy rate
    and the ``mu = 0`` optimum is not unique.  The default ``tol`` is
    ``10 * merge_tol * A``; when ``peak`` is not given, ``A`` is read off
    the largest mass point (unit scale if both laws sit at the origin).
    """
    lo = _endpoint(points, 0.0)
    hi = _endpoint(points, 1.0)
    if tol is None:
        if peak is None:
            peak = max(float(lo.dist.locations[-1]), float(hi.dist.locations[-1])) or 1.0
        tol = 10.0 * merge_tol * peak
    if hi.equivocation_Re >= lo.equivocation_Re - value_tol:
        return False
    return distributions_differ(lo.dist, hi.dist, tol)
