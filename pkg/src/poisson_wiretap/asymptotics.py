"""Closed-form asymptotics and bounds for the secrecy capacity.

Covers the low-intensity laws (quadratic in the peak, linear in the
average, ``E*loglog(1/E)`` for unequal gains), the per-unit-cost slope
``phi``, the continuous-time upper bound and the high-intensity constant.
All values are in nats; rates carry the ``1/delta`` factor where the
discrete-time channel defines them per second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from scipy.optimize import bisect

from .channel import ChannelParams, DiscreteDistribution, IntensityConstraints, rates
from .errors import BracketError, DomainError, WrongRegimeError

REGIMES = (
    "peak-only-low",
    "peak-avg-ratio-low",
    "fixed-peak-avg-low",
    "avg-only-equal-gains-low",
    "avg-only-diff-gains-low",
    "high-intensity",
)


@dataclass(frozen=True)
class DegradationParams:
    """Derived gaps between the two receivers.

    Attributes
    ----------
    lambda_d : float
        ``lambda_e - lambda_b`` for equal gains, otherwise
        ``(alpha_b/alpha_e)*lambda_e - lambda_b``.
    alpha_tilde : float
        ``alpha_b - alpha_e``.
    lambda_tilde : float
        ``(alpha_b/alpha_e - 1)*lambda_e``.
    """

    lambda_d: float
    alpha_tilde: float
    lambda_tilde: float


@dataclass(frozen=True)
class AsymptoticReport:
    regime: str
    value_or_bounds: Union[float, tuple[float, float]]
    scaling_law: str
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise DomainError(f"unknown regime {self.regime!r}")
        if isinstance(self.value_or_bounds, tuple):
            lo, hi = self.value_or_bounds
            if lo > hi:
                raise DomainError("lower bound exceeds upper bound")

    def to_dict(self) -> dict:
        out = {"regime": self.regime, "scaling_law": self.scaling_law, "notes": list(self.notes)}
        if isinstance(self.value_or_bounds, tuple):
            out["lower"], out["upper"] = self.value_or_bounds
        else:
            out["value"] = self.value_or_bounds
        return out


def _equal_gains(params: ChannelParams) -> bool:
    return math.isclose(params.alpha_b, params.alpha_e, rel_tol=1e-12, abs_tol=0.0)


def _require_degraded(params: ChannelParams) -> None:
    if not params.is_weakly_degraded:
        raise DomainError(
            "channel is not degraded: need alpha_b >= alpha_e and "
            "lambda_b/alpha_b <= lambda_e/alpha_e"
        )


def degradation_params(params: ChannelParams) -> DegradationParams:
    ratio = params.alpha_b / params.alpha_e
    if _equal_gains(params):
        lambda_d = params.lambda_e - params.lambda_b
    else:
        lambda_d = ratio * params.lambda_e - params.lambda_b
    return DegradationParams(lambda_d=lambda_d, alpha_tilde=params.alpha_b - params.alpha_e,
                             lambda_tilde=(ratio - 1.0) * params.lambda_e)


def _side_phi(alpha: float, lam: float, x: float) -> float:
    return (alpha + lam / x) * math.log1p(alpha * x / lam)


def phi(x: float, params: ChannelParams) -> float:
    """Per-unit-cost slope ``Phi(x)``, strictly increasing with ``Phi(0+) = 0``."""
    if not x > 0.0:
        raise DomainError(f"phi needs x > 0, got {x!r}")
    return ((params.alpha_e - params.alpha_b)
            + _side_phi(params.alpha_b, params.lambda_b, x)
            - _side_phi(params.alpha_e, params.lambda_e, x))


def _curvature_gap(params: ChannelParams) -> float:
    return params.alpha_b ** 2 / params.lambda_b - params.alpha_e ** 2 / params.lambda_e


def low_intensity_quadratic(params: ChannelParams, p: float) -> float:
    """Coefficient ``c`` in ``C_S ~ c*A**2`` as ``A -> 0`` with ``E = p*A``."""
    _require_degraded(params)
    if not 0.0 < p <= 1.0:
        raise DomainError(f"ratio p = E/A must lie in (0, 1], got {p!r}")
    if params.is_identical:
        return 0.0
    if p >= 0.5:
        return _curvature_gap(params) / 8.0
    return 0.5 * p * (1.0 - p) * _curvature_gap(params)


def low_intensity_linear_slope(params: ChannelParams, peak: float) -> float:
    """Slope of ``C_S`` in ``E`` as ``E -> 0`` with the peak held at ``A``."""
    return phi(peak, params)


def avg_only_equal_gains_slope(params: ChannelParams) -> float:
    """Slope ``alpha*log(lambda_e/lambda_b)`` for equal gains, average-only."""
    if not _equal_gains(params):
        raise WrongRegimeError("the linear average-only law needs alpha_b == alpha_e")
    return params.alpha_b * math.log(params.lambda_e / params.lambda_b)


def loglog_zeta(params: ChannelParams, avg: float) -> float:
    """Nonzero mass point of the binary input used in the loglog lower bound."""
    return math.sqrt(params.lambda_b / (params.alpha_b ** 2 * params.delta) * math.log(1.0 / avg))


def avg_only_diff_gains_bounds(params: ChannelParams, avg: float) -> tuple[float, float]:
    """Lower and upper bounds on ``C_S`` for unequal gains and a small average.

    The lower bound is the exact secrecy rate of the binary input on
    ``{0, zeta}`` with mean ``avg``.  The upper bound keeps the linear and
    the ``loglog`` term of the auxiliary-channel argument; only its leading
    order is guaranteed, so at moderate ``avg`` it is a heuristic.
    """
    if not params.alpha_b > params.alpha_e:
        raise WrongRegimeError("the loglog law needs alpha_b > alpha_e")
    if not params.is_weakly_degraded:
        raise WrongRegimeError("the loglog law needs a degraded channel")
    if not 0.0 < avg < math.exp(-1.0):
        raise WrongRegimeError(f"the loglog law needs 0 < E < 1/e, got {avg!r}")
    zeta = loglog_zeta(params, avg)
    if avg >= zeta:
        raise WrongRegimeError(f"E = {avg:g} is not below zeta = {zeta:g}")
    q = avg / zeta
    _, _, lower = rates(DiscreteDistribution([0.0, zeta], [1.0 - q, q]), params)
    loglog = math.log(math.log(1.0 / avg))
    ratio = params.lambda_e * params.alpha_b / (params.lambda_b * params.alpha_e)
    upper = (params.alpha_b * math.log(ratio) * avg
             + 2.0 * (params.alpha_b - params.alpha_e) * avg * loglog)
    return lower, upper


def high_intensity_bound(params: ChannelParams) -> float:
    """Constant that bounds ``C_S`` however large the intensity constraints are."""
    _require_degraded(params)
    lam_d = degradation_params(params).lambda_d
    bound = (lam_d ** 2 / 2.0 + lam_d / params.delta) / params.lambda_b
    if not _equal_gains(params):
        bound += math.log(params.alpha_b / params.alpha_e) / params.delta
    return bound


def _root_side(alpha: float, lam: float, peak: float, p: float) -> float:
    # A*k'(pA) - (k(A) - k(0)) for k(x) = (alpha*x + lam)*log(alpha*x + lam),
    # rewritten with log1p so that small peaks do not cancel catastrophically
    u = alpha * peak / lam
    return lam * (u * (1.0 + math.log1p((p - 1.0) * u / (1.0 + u))) - math.log1p(u))


def _value_side(alpha: float, lam: float, peak: float, p: float) -> float:
    # p*k(A) + (1-p)*k(0) - k(pA); terms linear in x cancel
    def h(x: float) -> float:
        u = alpha * x / lam
        return lam * (1.0 + u) * math.log1p(u)

    return p * h(peak) - h(p * peak)


def ct_secrecy_capacity(params: ChannelParams, peak: float,
                        average: Optional[float] = None) -> tuple[float, float]:
    """Secrecy capacity of the continuous-time channel with the same parameters.

    The optimal input is on-off keying with duty cycle ``p``.  ``p`` solves
    ``K(A) - K(0) = A*K'(pA)`` with ``K(x) = k_B(x) - k_E(x)``; the average
    constraint caps it at ``E/A``.

    Returns
    -------
    (value, p_star)
        ``value`` in nats per second of continuous time.
    """
    _require_degraded(params)
    if not peak > 0.0:
        raise DomainError(f"peak must be positive, got {peak!r}")
    if average is not None and not average > 0.0:
        raise DomainError(f"average must be positive, got {average!r}")
    if params.is_identical:
        p_star = 0.5 if average is None else min(0.5, average / peak)
        return 0.0, p_star

    def equation(p: float) -> float:
        return (_root_side(params.alpha_b, params.lambda_b, peak, p)
                - _root_side(params.alpha_e, params.lambda_e, peak, p))

    lo, hi = 1e-12, 1.0
    f_lo, f_hi = equation(lo), equation(hi)
    if not f_lo * f_hi < 0.0:
        raise BracketError(
            f"duty-cycle equation does not change sign on [{lo:g}, {hi:g}]: "
            f"values {f_lo:.3e}, {f_hi:.3e} (peak={peak:g})"
        )
    p_star = bisect(equation, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    if average is not None:
        p_star = min(p_star, average / peak)
    value = (_value_side(params.alpha_b, params.lambda_b, peak, p_star)
             - _value_side(params.alpha_e, params.lambda_e, peak, p_star))
    return value, p_star


def classify_regime(params: ChannelParams, constraints: IntensityConstraints, *,
                    limit: str = "low", vary: Optional[str] = None) -> AsymptoticReport:
    """Pick the asymptotic law matching a constraint set and evaluate it.

    Parameters
    ----------
    limit
        ``"low"`` for the vanishing-intensity laws, ``"high"`` for the
        constant bound.
    vary
        Needed only when both a peak and an average are given in the low
        limit: ``"both"`` shrinks ``A`` at a fixed ratio ``E/A``,
        ``"average"`` shrinks ``E`` at a fixed ``A``.
    """
    _require_degraded(params)
    if limit not in ("low", "high"):
        raise DomainError(f"limit must be 'low' or 'high', got {limit!r}")
    if limit == "high":
        return AsymptoticReport("high-intensity", high_intensity_bound(params), "C_S = O(1)")

    peak, avg = constraints.peak, constraints.average
    if peak is not None and avg is None:
        return AsymptoticReport("peak-only-low", low_intensity_quadratic(params, 1.0),
                                "C_S ~ c*A^2")
    if peak is not None:
        if vary is None:
            raise DomainError("ambiguous constraint set: both peak and average given; "
                              "missing field 'vary' ('both' or 'average')")
        if vary == "both":
            return AsymptoticReport("peak-avg-ratio-low",
                                    low_intensity_quadratic(params, avg / peak), "C_S ~ c*A^2")
        if vary == "average":
            return AsymptoticReport("fixed-peak-avg-low",
                                    low_intensity_linear_slope(params, peak), "C_S ~ c*E")
        raise DomainError(f"vary must be 'both' or 'average', got {vary!r}")
    if _equal_gains(params):
        return AsymptoticReport("avg-only-equal-gains-low", avg_only_equal_gains_slope(params),
                                "C_S ~ c*E")
    bounds = avg_only_diff_gains_bounds(params, avg)
    return AsymptoticReport(
        "avg-only-diff-gains-low", bounds, "C_S ~ c*E*loglog(1/E)",
        notes=("upper bound keeps the finite-E linear term; only its leading order is proven",),
    )
