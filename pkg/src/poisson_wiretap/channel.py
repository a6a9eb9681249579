"""Poisson wiretap channel laws and information densities.

Everything here is evaluated in log-space: the unnormalized output weights
``[(alpha x + lambda) Delta]**y`` overflow double precision long before the
Poisson tail becomes negligible.  Rates are in nats per second (the
information densities carry a ``1/Delta`` factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np
from scipy.special import gammainc, gammaln, logsumexp, xlogy

from .errors import DomainError, TruncationOverflowError

WEIGHT_SUM_TOL = 1e-12
MEAN_TOL = 1e-9


class Side(str, Enum):
    LEGITIMATE = "legitimate"
    EAVESDROPPER = "eavesdropper"


@dataclass(frozen=True)
class ChannelParams:
    """Physical parameters of the wiretap pair.

    ``alpha_*`` are channel gains, ``lambda_*`` dark-current rates in
    photons/second and ``delta`` the slot duration in seconds.
    """

    alpha_b: float
    lambda_b: float
    alpha_e: float
    lambda_e: float
    delta: float

    def __post_init__(self) -> None:
        for name in ("alpha_b", "lambda_b", "alpha_e", "lambda_e", "delta"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def is_identical(self) -> bool:
        return self.alpha_b == self.alpha_e and self.lambda_b == self.lambda_e

    @property
    def is_weakly_degraded(self) -> bool:
        return (
            self.alpha_b >= self.alpha_e
            and self.lambda_b / self.alpha_b <= self.lambda_e / self.alpha_e
        )

    @property
    def is_degraded(self) -> bool:
        """Both degradedness inequalities hold and at least one is strict."""
        return self.is_weakly_degraded and not (
            self.alpha_b == self.alpha_e
            and self.lambda_b / self.alpha_b == self.lambda_e / self.alpha_e
        )

    def side(self, side: Side | str) -> tuple[float, float]:
        """Return ``(alpha, lambda)`` for one receiver."""
        side = Side(side)
        if side is Side.LEGITIMATE:
            return self.alpha_b, self.lambda_b
        return self.alpha_e, self.lambda_e

    def replace(self, **changes: float) -> "ChannelParams":
        values = {k: getattr(self, k) for k in ("alpha_b", "lambda_b", "alpha_e", "lambda_e", "delta")}
        values.update(changes)
        return ChannelParams(**values)

    def to_dict(self) -> dict:
        return {
            "alpha_b": self.alpha_b,
            "lambda_b": self.lambda_b,
            "alpha_e": self.alpha_e,
            "lambda_e": self.lambda_e,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class IntensityConstraints:
    """Peak bound ``A`` and/or average bound ``E`` on the input intensity.

    An average bound larger than the peak is vacuous and is clamped to the peak.
    """

    peak: float | None = None
    average: float | None = None

    def __post_init__(self) -> None:
        if self.peak is None and self.average is None:
            raise DomainError("at least one of peak/average must be given")
        for name in ("peak", "average"):
            value = getattr(self, name)
            if value is None:
                continue
            value = float(value)
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)
        if self.peak is not None and self.average is not None and self.average > self.peak:
            object.__setattr__(self, "average", self.peak)

    @property
    def average_is_vacuous(self) -> bool:
        return self.average is None or (self.peak is not None and self.average >= self.peak)

    def to_dict(self) -> dict:
        return {"peak": self.peak, "average": self.average}


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Finitely supported input law with strictly increasing locations."""

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.locations, dtype=float).reshape(-1)
        p = np.array(self.weights, dtype=float).reshape(-1)
        if x.size == 0:
            raise DomainError("distribution must have at least one mass point")
        if x.shape != p.shape:
            raise DomainError("locations and weights differ in length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise DomainError("non-finite location or weight")
        if np.any(x < 0.0):
            raise DomainError("locations must be nonnegative")
        if np.any(np.diff(x) <= 0.0):
            raise DomainError("locations must be strictly increasing")
        if np.any(p <= 0.0) or np.any(p > 1.0):
            raise DomainError("weights must lie in (0, 1]")
        if abs(p.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(f"weights sum to {p.sum()!r}, not 1")
        x.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "locations", x)
        object.__setattr__(self, "weights", p)

    @classmethod
    def from_points(
        cls, locations: Iterable[float], weights: Iterable[float], normalize: bool = True
    ) -> "DiscreteDistribution":
        """Build a distribution from unsorted points, pooling duplicate locations
        and dropping zero weights."""
        x = np.asarray(list(locations), dtype=float)
        p = np.asarray(list(weights), dtype=float)
        if x.shape != p.shape:
            raise DomainError("locations and weights differ in length")
        keep = p > 0.0
        x, p = x[keep], p[keep]
        order = np.argsort(x, kind="stable")
        x, p = x[order], p[order]
        ux, inverse = np.unique(x, return_inverse=True)
        up = np.zeros_like(ux)
        np.add.at(up, inverse, p)
        if normalize:
            up = up / up.sum()
        return cls(ux, up)

    @classmethod
    def point_mass(cls, location: float) -> "DiscreteDistribution":
        return cls(np.array([float(location)]), np.array([1.0]))

    def __len__(self) -> int:
        return int(self.locations.size)

    def __repr__(self) -> str:
        pts = ", ".join(f"{x:.6g}:{p:.6g}" for x, p in zip(self.locations, self.weights))
        return f"DiscreteDistribution({pts})"

    @property
    def mean(self) -> float:
        return float(np.dot(self.locations, self.weights))

    def mixture(self, other: "DiscreteDistribution", t: float) -> "DiscreteDistribution":
        """The law ``t*self + (1-t)*other``."""
        if not 0.0 <= t <= 1.0:
            raise DomainError("mixing coefficient must lie in [0, 1]")
        return DiscreteDistribution.from_points(
            np.concatenate([self.locations, other.locations]),
            np.concatenate([t * self.weights, (1.0 - t) * other.weights]),
        )

    def check_feasible(self, constraints: IntensityConstraints) -> None:
        if constraints.peak is not None and self.locations[-1] > constraints.peak:
            raise DomainError(
                f"mass point {self.locations[-1]:g} exceeds peak {constraints.peak:g}"
            )
        if constraints.average is not None and self.mean > constraints.average + MEAN_TOL:
            raise DomainError(
                f"mean {self.mean:g} exceeds average bound {constraints.average:g}"
            )

    def to_dict(self) -> dict:
        return {"locations": self.locations.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteDistribution":
        return cls(np.asarray(data["locations"], float), np.asarray(data["weights"], float))


@dataclass(frozen=True)
class TruncationPolicy:
    epsilon_tail: float = 1e-12
    y_max_cap: int = 100_000

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon_tail < 1.0:
            raise DomainError("epsilon_tail must lie in (0, 1)")
        if int(self.y_max_cap) < 1:
            raise DomainError("y_max_cap must be >= 1")


DEFAULT_POLICY = TruncationPolicy()


def poisson_log_pmf(mean, y):
    """Log of the Poisson pmf ``exp(-mean) mean**y / y!``.

    Broadcasts over array arguments.  A zero mean yields ``-inf`` for every
    ``y > 0``.
    """
    mean_arr = np.asarray(mean, dtype=float)
    y_arr = np.asarray(y)
    if np.any(mean_arr < 0.0) or np.any(~np.isfinite(mean_arr)):
        raise DomainError("Poisson mean must be finite and >= 0")
    if np.any(y_arr < 0) or np.any(y_arr != np.floor(y_arr)):
        raise DomainError("Poisson outcome must be a nonnegative integer")
    y_arr = y_arr.astype(float)
    out = xlogy(y_arr, mean_arr) - mean_arr - gammaln(y_arr + 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def _log_chernoff_tail(mean: float, k: int) -> float:
    # log of exp(-m) (e m / k)^k >= P[Poisson(m) >= k], valid for k > m
    return -mean + k * (1.0 + math.log(mean) - math.log(k))


def truncation_index(mean: float, policy: TruncationPolicy = DEFAULT_POLICY) -> int:
    """Smallest ``Y`` with ``P[Poisson(mean) > Y] < epsilon_tail``.

    A Chernoff bound brackets the index from above; the exact tail (a
    regularized incomplete gamma function) then locates the smallest
    admissible index inside the bracket.
    """
    mean = float(mean)
    if not math.isfinite(mean) or mean < 0.0:
        raise DomainError(f"Poisson mean must be finite and >= 0, got {mean!r}")
    if mean == 0.0:
        return 0
    log_eps = math.log(policy.epsilon_tail)
    lo = int(math.ceil(mean))
    step = 1
    k = int(math.floor(mean)) + 1
    while _log_chernoff_tail(mean, k) >= log_eps:
        k = int(math.floor(mean)) + 1 + step
        step *= 2
    # P[X > k - 1] = P[X >= k] is certified below epsilon
    hi = max(k - 1, lo)

    def tail(n: int) -> float:
        return float(gammainc(n + 1, mean))

    while lo < hi:
        mid = (lo + hi) // 2
        if tail(mid) < policy.epsilon_tail:
            hi = mid
        else:
            lo = mid + 1
    if lo > policy.y_max_cap:
        raise TruncationOverflowError(mean, lo, policy.y_max_cap)
    return lo


def _log_g(y: np.ndarray, locations: np.ndarray, log_weights: np.ndarray,
           alpha: float, lam: float, delta: float) -> np.ndarray:
    log_means = np.log((alpha * locations + lam) * delta)
    terms = (log_weights - alpha * locations * delta)[None, :] + y[:, None] * log_means[None, :]
    return logsumexp(terms, axis=1)


def g_kernel(side: Side | str, y, dist: DiscreteDistribution, params: ChannelParams):
    """Log of the unnormalized output weight ``g(y; F)`` for one receiver.

    The output pmf follows as ``log P(y) = -lambda*Delta + log g(y) - log y!``.
    """
    if dist is None or len(dist) == 0:
        raise DomainError("empty distribution")
    alpha, lam = params.side(side)
    y_arr = np.atleast_1d(np.asarray(y))
    if np.any(y_arr < 0):
        raise DomainError("output index must be nonnegative")
    out = _log_g(y_arr.astype(float), dist.locations, np.log(dist.weights), alpha, lam, params.delta)
    if np.ndim(y) == 0:
        return float(out[0])
    return out


def output_log_pmf(side: Side | str, y, dist: DiscreteDistribution, params: ChannelParams):
    """Log output pmf ``log P_Y(y; F)`` (or ``P_Z``) built from the g-kernel."""
    alpha, lam = params.side(side)
    y_arr = np.atleast_1d(np.asarray(y)).astype(float)
    out = -lam * params.delta + np.atleast_1d(g_kernel(side, y_arr, dist, params)) - gammaln(y_arr + 1.0)
    if np.ndim(y) == 0:
        return float(out[0])
    return out


def side_density(side: Side | str, x, dist: DiscreteDistribution, params: ChannelParams,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Mutual-information density ``i(x; F)`` of one receiver at each ``x``.

    Evaluates ``(a x + l) log m_x - a x - (1/Delta) sum_y p(y|x) log g(y)``
    with ``m_x = (a x + l) Delta``.  The exact mean ``E[Y|x] = m_x`` is used
    to cancel the leading terms analytically, which leaves
    ``-(1/Delta) sum_y p(y|x) [log g(y) - y log m_x + a x Delta]``.  Its
    summands vanish for a point mass at ``x`` and its truncated tail is far
    smaller than that of the raw sum.
    """
    alpha, lam = params.side(side)
    delta = params.delta
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0):
        raise DomainError("intensity must be nonnegative")
    m_x = (alpha * x + lam) * delta
    top = max(float(m_x.max()), float((alpha * dist.locations[-1] + lam) * delta))
    y = np.arange(truncation_index(top, policy) + 1, dtype=float)
    log_g = _log_g(y, dist.locations, np.log(dist.weights), alpha, lam, delta)
    pmf = np.exp(poisson_log_pmf(m_x[:, None], y[None, :]))
    resid = log_g[None, :] - y[None, :] * np.log(m_x)[:, None] + (alpha * x * delta)[:, None]
    return -(pmf * resid).sum(axis=1) / delta


def mi_densities(x, dist: DiscreteDistribution, params: ChannelParams,
                 policy: TruncationPolicy = DEFAULT_POLICY):
    """Return ``(i_B, i_E, c_S)`` at ``x``; scalars in, scalars out."""
    i_b = side_density(Side.LEGITIMATE, x, dist, params, policy)
    i_e = side_density(Side.EAVESDROPPER, x, dist, params, policy)
    c_s = i_b - i_e
    if np.ndim(x) == 0:
        return float(i_b[0]), float(i_e[0]), float(c_s[0])
    return i_b, i_e, c_s


def rates(dist: DiscreteDistribution, params: ChannelParams,
          policy: TruncationPolicy = DEFAULT_POLICY) -> tuple[float, float, float]:
    """``(I_B, I_E, I_B - I_E)`` in nats/second for the input law ``dist``."""
    i_b, i_e, _ = mi_densities(dist.locations, dist, params, policy)
    rate_b = float(np.dot(dist.weights, i_b))
    rate_e = float(np.dot(dist.weights, i_e))
    return rate_b, rate_e, rate_b - rate_e


def weighted_objective(dist: DiscreteDistribution, mu: float, params: ChannelParams,
                       policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """``mu*I_B + (1-mu)*(I_B - I_E)``."""
    rate_b, rate_e, _ = rates(dist, params, policy)
    return rate_b - (1.0 - mu) * rate_e
