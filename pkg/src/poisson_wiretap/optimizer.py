"""Maximization of ``f_mu = mu*I_B + (1-mu)*(I_B - I_E)`` over discrete inputs.

The optimizer alternates three steps on a finite support that always
contains the origin:

* weights for fixed locations: Newton ascent on the simplex for a fixed
  price ``gamma`` of the mean intensity, wrapped in a scalar root search on
  ``gamma`` that enforces the average constraint;
* locations: every point moves toward the peak of ``s`` (below) in its own
  basin, the joint move being damped until the objective with re-optimized
  weights does not drop;
* a KKT check of ``s(x) = mu*i_B(x) + (1-mu)*c_S(x) - gamma*x`` on a dense
  grid.  When the check fails a new mass point is inserted where the
  violation is largest.

The problem is concave, so a passing KKT check certifies global optimality.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .channel import (
    DEFAULT_POLICY,
    ChannelParams,
    DiscreteDistribution,
    IntensityConstraints,
    Side,
    TruncationPolicy,
    mi_densities,
    poisson_log_pmf,
    rates,
    truncation_index,
)
from .errors import DomainError, SolverStallError, UndefinedMultiplierError, UnsupportedRegimeError

log = logging.getLogger(__name__)

# inner Newton stationarity tolerance, nats/second
_INNER_TOL = 1e-12
_GAMMA_XTOL = 1e-15


@dataclass(frozen=True)
class SolverConfig:
    kkt_tol: float = 1e-6
    grid_size: int = 2001
    window_points: int = 21
    merge_tol: float = 1e-4
    weight_floor: float = 1e-9
    max_support: int = 64
    max_outer_iters: int = 200
    max_inner_iters: int = 500
    max_refine_sweeps: int = 200
    truncation: TruncationPolicy = DEFAULT_POLICY

    def __post_init__(self) -> None:
        for name in ("kkt_tol", "merge_tol", "weight_floor"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be > 0")
        if self.grid_size < 3:
            raise DomainError("grid_size must be >= 3")
        if self.window_points < 1:
            raise DomainError("window_points must be >= 1")
        for name in ("max_support", "max_outer_iters", "max_inner_iters", "max_refine_sweeps"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1")


@dataclass(frozen=True, eq=False)
class KktReport:
    gamma: float
    max_violation: float
    equality_residual: float
    grid: np.ndarray
    slack: np.ndarray
    objective: float
    level: float

    def passes(self, tol: float) -> bool:
        return self.max_violation <= tol and self.equality_residual <= tol

    @property
    def argmax_violation(self) -> float:
        return float(self.grid[int(np.argmin(self.slack))])

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "max_violation": self.max_violation,
            "equality_residual": self.equality_residual,
            "objective": self.objective,
            "level": self.level,
        }


@dataclass(frozen=True, eq=False)
class SolveResult:
    dist: DiscreteDistribution
    objective: float
    gamma: float
    kkt: KktReport
    iterations: int
    mu: float
    rate_b: float
    rate_e: float
    history: tuple[float, ...] = ()

    @property
    def secrecy_rate(self) -> float:
        return self.rate_b - self.rate_e


class _FixedSupport:
    """Poisson tables for a fixed set of locations, used by the weight solver.

    Densities here use the direct divergence form; the public density
    routines in :mod:`channel` use the g-kernel form and serve as the check.
    """

    def __init__(self, locations: np.ndarray, mu: float, params: ChannelParams,
                 policy: TruncationPolicy):
        self.x = np.asarray(locations, dtype=float)
        self.delta = params.delta
        self.tables = []
        for side, coef in ((Side.LEGITIMATE, 1.0), (Side.EAVESDROPPER, -(1.0 - mu))):
            if coef == 0.0:
                continue
            alpha, lam = params.side(side)
            means = (alpha * self.x + lam) * params.delta
            y = np.arange(truncation_index(float(means.max()), policy) + 1, dtype=float)
            log_pmf = poisson_log_pmf(means[:, None], y[None, :])
            # column-wise shift makes the mixture a plain matrix product
            shift = log_pmf.max(axis=0)
            scaled = np.exp(log_pmf - shift)
            self.tables.append((coef, log_pmf, np.exp(log_pmf), shift, scaled))

    def evaluate(self, p: np.ndarray, hessian: bool = False):
        n = self.x.size
        dens = np.zeros(n)
        hess = np.zeros((n, n)) if hessian else None
        for coef, log_pmf, pmf, shift, scaled in self.tables:
            mix = np.maximum(p @ scaled, np.finfo(float).tiny)
            log_out = shift + np.log(mix)
            dens += coef * (pmf * (log_pmf - log_out)).sum(axis=1) / self.delta
            if hessian:
                w = np.exp(log_pmf - 0.5 * log_out)
                hess -= coef * (w @ w.T) / self.delta
        return float(p @ dens), dens, hess


def _ascend_simplex(model: _FixedSupport, gamma: float, p: np.ndarray, max_iter: int) -> np.ndarray:
    """Maximize ``f(p) - gamma * p.x`` over the probability simplex."""
    x = model.x
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    p = p / p.sum()
    active = p > 0.0
    current = model.evaluate(p, hessian=True)
    last_gap = last_value = math.inf
    stalled = 0
    for _ in range(max_iter):
        f, dens, hess = current
        g = dens - gamma * x
        value = f - gamma * float(p @ x)
        level = float(p @ g)
        idx = np.flatnonzero(active)
        gap = float(np.max(np.abs(g[idx] - level)))
        outside = np.flatnonzero(~active)
        enter = None
        if outside.size:
            j = outside[int(np.argmax(g[outside]))]
            if g[j] > level + _INNER_TOL:
                enter = j
        if gap <= _INNER_TOL and enter is None:
            return p
        # progress below rounding level: neither value nor gap can improve further
        flat = value - last_value <= 1e-15 * max(1.0, abs(value))
        stalled = stalled + 1 if gap >= 0.5 * last_gap and flat else 0
        if stalled >= 3:
            return p
        last_gap, last_value = gap, value
        newton = False
        if gap <= _INNER_TOL:
            # re-admit the most profitable dropped point with a Frank-Wolfe step
            direction = -p.copy()
            direction[enter] += 1.0
            active[enter] = True
        else:
            step = _newton_step(hess[np.ix_(idx, idx)], g[idx])
            direction = np.zeros_like(p)
            direction[idx] = step - step.mean()
            newton = True
            if not np.all(np.isfinite(direction)) or (g - level) @ direction <= 0.0:
                newton = False
                direction = np.zeros_like(p)
                direction[idx] = g[idx] - g[idx].mean()
        # centring by the level removes rounding from the common component of g
        slope = float((g - level) @ direction)
        if not slope > 0.0:
            return p
        shrinking = direction < 0.0
        ratios = np.full(p.size, np.inf)
        ratios[shrinking] = -p[shrinking] / direction[shrinking]
        t_max = min(1.0, float(ratios.min()))
        t = t_max
        # below rounding level function values cannot rank steps; trust Newton
        newton_tail = newton and t_max == 1.0 and slope <= 1e-12 * max(1.0, abs(value))
        while True:
            trial = p + t * direction
            if t == t_max:
                trial[ratios <= t_max] = 0.0
            trial = np.clip(trial, 0.0, None)
            trial /= trial.sum()
            evaluated = model.evaluate(trial, hessian=True)
            if newton_tail or evaluated[0] - gamma * float(trial @ x) >= value + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-14:
                return p
        p, current = trial, evaluated
        active = p > 0.0
    return p


def _newton_step(hess_ss: np.ndarray, g_s: np.ndarray, rhs_extra: float = 0.0) -> np.ndarray:
    """Solve the equality-constrained Newton system on the active set."""
    k = g_s.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = hess_ss
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.concatenate([-g_s, [rhs_extra]])
    try:
        return np.linalg.solve(kkt, rhs)[:k]
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]


def _mean_slope(model: _FixedSupport, p: np.ndarray) -> float:
    """Derivative of the optimal mean with respect to ``gamma``.

    Differentiating the stationarity conditions on the active set gives
    ``H dp = x + c*1`` with ``sum(dp) = 0``.
    """
    idx = np.flatnonzero(p > 0.0)
    if idx.size < 2:
        return 0.0
    _, _, hess = model.evaluate(p, hessian=True)
    dp = _newton_step(hess[np.ix_(idx, idx)], -model.x[idx])
    slope = float(model.x[idx] @ dp)
    return slope if np.isfinite(slope) else 0.0


def _check_locations(locations, constraints: IntensityConstraints) -> np.ndarray:
    x = np.asarray(locations, dtype=float).reshape(-1)
    if x.size == 0:
        raise DomainError("no candidate locations")
    if np.any(np.diff(x) <= 0.0):
        raise DomainError("locations must be distinct and increasing")
    if x[0] != 0.0:
        raise DomainError("the origin must be a candidate location")
    if constraints.peak is not None and x[-1] > constraints.peak:
        raise DomainError("locations must lie within [0, A]")
    return x


def optimize_weights(locations, mu: float, params: ChannelParams,
                     constraints: IntensityConstraints, config: SolverConfig = SolverConfig(),
                     init_weights=None, gamma_hint: float | None = None
                     ) -> tuple[np.ndarray, float]:
    """Optimal weights on fixed locations and the mean-intensity multiplier.

    Returns ``(weights, gamma)``; ``gamma`` is zero when the average
    constraint is slack.  Weights may contain exact zeros for locations the
    optimum does not use.  ``gamma_hint`` seeds the multiplier search.
    """
    x = _check_locations(locations, constraints)
    model = _FixedSupport(x, mu, params, config.truncation)
    p0 = np.full(x.size, 1.0 / x.size) if init_weights is None else np.asarray(init_weights, float)
    if p0.shape != x.shape:
        raise DomainError("init_weights length mismatch")
    if p0.sum() <= 0.0:
        p0 = np.full(x.size, 1.0 / x.size)
    iters = config.max_inner_iters
    p_free = _ascend_simplex(model, 0.0, p0, iters)
    avg = constraints.average
    if avg is None or float(p_free @ x) <= avg:
        return p_free, 0.0

    return _dual_search(model, avg, p_free, iters, gamma_hint)


def _dual_search(model: _FixedSupport, avg: float, p: np.ndarray, iters: int,
                 gamma_hint: float | None) -> tuple[np.ndarray, float]:
    """Find ``gamma > 0`` whose maximizer has mean exactly ``avg``.

    The mean is nonincreasing in ``gamma``.  Newton steps use the implicit
    derivative of the mean; any step leaving the current bracket is replaced
    by bisection (or by doubling while no upper end is known).
    """
    x = model.x
    scale = max(1.0, avg)
    lo, hi = 0.0, math.inf
    gamma = gamma_hint if gamma_hint is not None and gamma_hint > 0.0 else None
    if gamma is None:
        # Newton from gamma = 0, where the free maximizer is already known
        slope = _mean_slope(model, p)
        excess = float(p @ x) - avg
        gamma = -excess / slope if slope < 0.0 else 1.0
    for _ in range(200):
        p = _ascend_simplex(model, gamma, p, iters)
        excess = float(p @ x) - avg
        if abs(excess) <= 1e-13 * scale:
            return p, gamma
        if excess > 0.0:
            lo = gamma
        else:
            hi = gamma
        if math.isfinite(hi) and hi - lo <= _GAMMA_XTOL * max(1.0, hi):
            break
        slope = _mean_slope(model, p)
        nxt = gamma - excess / slope if slope < 0.0 else math.nan
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * gamma + 1.0
        if nxt > 1e12:
            raise SolverStallError("could not bracket the mean-intensity multiplier",
                                   best=p, diagnostics={"gamma": nxt})
        gamma = nxt
    if excess > 0.0 and math.isfinite(hi):
        # finish on the feasible side of the bracket
        gamma = hi
        p = _ascend_simplex(model, gamma, p, iters)
    return p, float(gamma)


def _objective(x: np.ndarray, p: np.ndarray, mu: float, params: ChannelParams,
               policy: TruncationPolicy) -> float:
    f, _, _ = _FixedSupport(x, mu, params, policy).evaluate(p)
    return f


def _tidy(x: np.ndarray, p: np.ndarray, peak: float, config: SolverConfig):
    """Drop negligible weights and pool points closer than ``merge_tol * A``."""
    keep = p >= config.weight_floor
    keep[0] = keep[0] or x[0] == 0.0 and p[0] > 0.0
    x, p = _pool(x[keep], p[keep], config.merge_tol * peak)
    if x[0] != 0.0:
        x = np.concatenate([[0.0], x])
        p = np.concatenate([[0.0], p])
    return x, p / p.sum()


def _as_dist(x: np.ndarray, p: np.ndarray) -> DiscreteDistribution:
    return DiscreteDistribution.from_points(x, p)


def refine_locations(dist: DiscreteDistribution, mu: float, params: ChannelParams,
                     constraints: IntensityConstraints, config: SolverConfig = SolverConfig()
                     ) -> DiscreteDistribution:
    """Move mass points toward local maximizers of the objective.

    Every point except the origin is pulled toward the nearest local maximum
    of ``mu*i_B(x) + (1-mu)*c_S(x) - gamma*x`` between its neighbours (the
    last one up to ``A``); the joint move is damped until the objective with
    re-optimized weights does not drop.
    """
    x, p, _gamma, _ = _refine(dist.locations, dist.weights, mu, params, constraints, config)
    return _as_dist(x, p)


def _local_targets(x, p, gamma, mu, params, peak, config):
    """Local maximizer of ``s(x) = d(x) - gamma*x`` in the basin of each point.

    Basins are found by hill climbing on a uniform grid and the peak is then
    polished with a bounded Brent search.  Points sharing a basin receive the
    same target, which lets the caller pool them.  Also returns the largest
    rise ``s(target) - s(x_i)``, which bounds the equality residual that
    moving the points could remove.
    """
    dist = _as_dist(x, p)
    policy = config.truncation
    grid = np.linspace(0.0, peak, config.grid_size)
    s_grid = _weighted_density(grid, dist, mu, params, policy) - gamma * grid
    h = grid[1] - grid[0]
    xatol = 1e-9 * peak

    def neg_s(t: float) -> float:
        return -float(_weighted_density(t, dist, mu, params, policy)[0]) + gamma * t

    polished: dict[int, tuple[float, float]] = {}
    s_here = _weighted_density(x, dist, mu, params, policy) - gamma * x
    targets = x.copy()
    rise = 0.0
    for i in range(1, x.size):
        k = int(np.clip(np.rint(x[i] / h), 0, grid.size - 1))
        while True:
            if k + 1 < grid.size and s_grid[k + 1] > s_grid[k]:
                k += 1
            elif k > 0 and s_grid[k - 1] > s_grid[k]:
                k -= 1
            else:
                break
        if k not in polished:
            if k == 0:
                polished[k] = (-s_grid[0], 0.0)
            else:
                lo, hi = grid[k - 1], grid[min(k + 1, grid.size - 1)]
                res = minimize_scalar(neg_s, bounds=(lo, hi), method="bounded",
                                      options={"xatol": xatol, "maxiter": 500})
                best = min((float(res.fun), float(res.x)), (-s_grid[k], grid[k]))
                if best[1] > peak - 10 * xatol:
                    # Brent stops short of the boundary; the peak itself is the maximizer
                    best = (neg_s(peak), peak)
                polished[k] = best
        top, targets[i] = polished[k]
        rise = max(rise, -top - s_here[i])
    return targets, rise


def _pool(x: np.ndarray, p: np.ndarray, sep: float):
    """Merge neighbours closer than ``sep``; the origin keeps its position."""
    out_x, out_p = [x[0]], [p[0]]
    for xi, pi in zip(x[1:], p[1:]):
        if xi - out_x[-1] < sep:
            total = out_p[-1] + pi
            if out_x[-1] != 0.0 and total > 0.0:
                out_x[-1] = (out_x[-1] * out_p[-1] + xi * pi) / total
            out_p[-1] = total
        else:
            out_x.append(xi)
            out_p.append(pi)
    return np.array(out_x), np.array(out_p)


def _refine(x, p, mu, params, constraints, config):
    peak = constraints.peak
    policy = config.truncation
    sep = config.merge_tol * peak
    x = np.array(x, dtype=float)
    p = np.array(p, dtype=float)
    if x[0] != 0.0:
        x = np.concatenate([[0.0], x])
        p = np.concatenate([[0.0], p])
    p, gamma = optimize_weights(x, mu, params, constraints, config, init_weights=p)
    best = _objective(x, p, mu, params, policy)
    xatol = 1e-9 * peak
    for _ in range(config.max_refine_sweeps):
        targets, rise = _local_targets(x, p, gamma, mu, params, peak, config)
        step = targets - x
        pending_edge = bool(np.any((targets == peak) & (x != peak)))
        if float(np.max(np.abs(step))) <= 10 * xatol and not pending_edge:
            break
        if rise <= 1e-3 * config.kkt_tol and not pending_edge:
            break
        t = 1.0
        accepted = False
        while t >= 1.0 / 64:
            trial_x, trial_p = _pool(x + t * step, p, sep)
            trial_p, trial_gamma = optimize_weights(trial_x, mu, params, constraints, config,
                                                    init_weights=trial_p, gamma_hint=gamma)
            value = _objective(trial_x, trial_p, mu, params, policy)
            # rounding-level losses are accepted so points can settle exactly
            if value >= best - 1e-14 * max(1.0, abs(best)):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        gain = value - best
        x, p, gamma, best = trial_x, trial_p, trial_gamma, value
        if gain <= 1e-15 * max(1.0, abs(best)) and t < 1.0:
            break
    return x, p, gamma, best


def _windows(centers, half_width: float, peak: float, n: int) -> np.ndarray:
    if not len(centers):
        return np.empty(0)
    offsets = np.linspace(-half_width, half_width, n)
    pts = (np.asarray(centers, float)[:, None] + offsets[None, :]).reshape(-1)
    return pts[(pts >= 0.0) & (pts <= peak)]


def _weighted_density(x, dist, mu, params, policy) -> np.ndarray:
    i_b, i_e, _ = mi_densities(np.atleast_1d(x), dist, params, policy)
    return i_b - (1.0 - mu) * i_e


def kkt_verify(dist: DiscreteDistribution, gamma: float, mu: float, params: ChannelParams,
               constraints: IntensityConstraints, config: SolverConfig = SolverConfig()) -> KktReport:
    """Evaluate the optimality conditions for ``dist`` with multiplier ``gamma``.

    The slack ``[f_mu(F) - gamma*E] - [mu*i_B(x) + (1-mu)*c_S(x) - gamma*x]``
    must be nonnegative on ``[0, A]`` and vanish on the support.
    """
    peak = constraints.peak
    if peak is None:
        raise UnsupportedRegimeError("KKT verification needs a peak constraint")
    policy = config.truncation
    avg = constraints.average if constraints.average is not None else 0.0
    d_support = _weighted_density(dist.locations, dist, mu, params, policy)
    objective = float(dist.weights @ d_support)
    level = objective - gamma * avg
    base = np.linspace(0.0, peak, config.grid_size)
    s_base = _weighted_density(base, dist, mu, params, policy) - gamma * base
    viol = s_base - level
    # refine around the support and around every local peak of the violation
    interior = (viol[1:-1] >= viol[:-2]) & (viol[1:-1] >= viol[2:])
    peaks = base[1:-1][interior].tolist()
    if viol[0] >= viol[1]:
        peaks.append(base[0])
    if viol[-1] >= viol[-2]:
        peaks.append(base[-1])
    h = peak / (config.grid_size - 1)
    extra = np.concatenate([
        _windows(dist.locations, h, peak, config.window_points),
        _windows(peaks, h, peak, config.window_points),
        dist.locations,
    ])
    s_extra = _weighted_density(extra, dist, mu, params, policy) - gamma * extra if extra.size else np.empty(0)
    grid = np.concatenate([base, extra])
    s_all = np.concatenate([s_base, s_extra])
    order = np.argsort(grid, kind="stable")
    grid, s_all = grid[order], s_all[order]
    grid, first = np.unique(grid, return_index=True)
    s_all = s_all[first]
    slack = level - s_all
    eq_res = float(np.max(np.abs(d_support - gamma * dist.locations - level)))
    return KktReport(
        gamma=float(gamma),
        max_violation=float(-slack.min()),
        equality_residual=eq_res,
        grid=grid,
        slack=slack,
        objective=objective,
        level=level,
    )


def estimate_gamma(dist: DiscreteDistribution, mu: float, params: ChannelParams,
                   constraints: IntensityConstraints, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Least-squares multiplier making ``density(x_i) - gamma*x_i`` constant on the support."""
    if constraints.average_is_vacuous:
        return 0.0
    if len(dist) < 2:
        raise UndefinedMultiplierError("a single mass point does not identify gamma")
    if dist.mean < constraints.average - 1e-9:
        return 0.0
    d = _weighted_density(dist.locations, dist, mu, params, policy)
    x = dist.locations
    xc = x - x.mean()
    slope = float(xc @ (d - d.mean()) / (xc @ xc))
    return max(slope, 0.0)


def _degenerate_result(mu, params, constraints, config) -> SolveResult:
    dist = DiscreteDistribution.point_mass(0.0)
    report = kkt_verify(dist, 0.0, mu, params, constraints, config)
    return SolveResult(dist=dist, objective=report.objective, gamma=0.0, kkt=report,
                       iterations=0, mu=mu, rate_b=0.0, rate_e=0.0, history=(report.objective,))


def _validate(mu, params, constraints):
    if not 0.0 <= mu <= 1.0:
        raise DomainError(f"mu must lie in [0, 1], got {mu!r}")
    if constraints.peak is None:
        raise UnsupportedRegimeError(
            "average-only constraints have countably infinite optimal supports and "
            "cannot be solved numerically; use the asymptotics module instead"
        )
    if not params.is_weakly_degraded:
        raise DomainError(
            "channel is not degraded: need alpha_b >= alpha_e and "
            "lambda_b/alpha_b <= lambda_e/alpha_e"
        )


def solve(mu: float, params: ChannelParams, constraints: IntensityConstraints,
          config: SolverConfig = SolverConfig(),
          initial: DiscreteDistribution | None = None) -> SolveResult:
    """Maximize ``f_mu`` over inputs on ``[0, A]`` with mean at most ``E``.

    Starts from ``{0, A}`` (or ``initial``) and grows the support at the point
    of largest KKT violation until the certificate passes.
    """
    mu = float(mu)
    _validate(mu, params, constraints)
    if mu == 0.0 and params.is_identical:
        return _degenerate_result(mu, params, constraints, config)
    peak = constraints.peak
    policy = config.truncation
    if initial is not None:
        x = np.clip(initial.locations, 0.0, peak)
        p = initial.weights.copy()
        x, p = _tidy(*_sorted_points(x, p), peak, config)
    else:
        x = np.array([0.0, peak])
        p = np.array([0.5, 0.5])
    history: list[float] = []
    best: SolveResult | None = None
    for it in range(1, config.max_outer_iters + 1):
        x, p, gamma, value = _refine(x, p, mu, params, constraints, config)
        x, p = _tidy(x, p, peak, config)
        dist = _as_dist(x, p)
        if dist.locations.size != x.size:
            x, p = dist.locations, dist.weights
        report = kkt_verify(dist, gamma, mu, params, constraints, config)
        history.append(report.objective)
        log.debug("outer %d: support=%s objective=%.12g violation=%.3g", it, dist,
                  report.objective, report.max_violation)
        rate_b, rate_e, _ = rates(dist, params, policy)
        best = SolveResult(dist=dist, objective=report.objective, gamma=gamma, kkt=report,
                           iterations=it, mu=mu, rate_b=rate_b, rate_e=rate_e,
                           history=tuple(history))
        if report.passes(config.kkt_tol):
            return best
        candidate = report.argmax_violation
        gap = np.min(np.abs(x - candidate))
        if gap < config.merge_tol * peak:
            # violation sits on an existing point: locations not yet converged
            continue
        if x.size >= config.max_support:
            raise SolverStallError("support-size cap reached", best=best,
                                   diagnostics={"support": x.size, "violation": report.max_violation})
        pos = int(np.searchsorted(x, candidate))
        x = np.insert(x, pos, candidate)
        seed = min(0.1, 1.0 / x.size)
        p = np.insert(p * (1.0 - seed), pos, seed)
    raise SolverStallError("outer iteration cap reached", best=best,
                           diagnostics={"violation": best.kkt.max_violation if best else math.nan})


def _sorted_points(x: np.ndarray, p: np.ndarray):
    d = DiscreteDistribution.from_points(x, p)
    return d.locations.copy(), d.weights.copy()


def channel_capacity(side: Side | str, params: ChannelParams, constraints: IntensityConstraints,
                     config: SolverConfig = SolverConfig()) -> SolveResult:
    """Capacity of one receiver's channel alone under the same constraints.

    The chosen side is copied onto both receivers and the ``mu = 1``
    problem, which maximizes ``I_B`` only, is solved.
    """
    alpha, lam = params.side(side)
    twin = ChannelParams(alpha, lam, alpha, lam, params.delta)
    return solve(1.0, twin, constraints, config)
