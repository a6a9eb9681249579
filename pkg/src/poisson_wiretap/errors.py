"""Exception types raised by the solver stack."""

from __future__ import annotations

from typing import Any


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class TruncationOverflowError(DomainError):
    """The certified Poisson truncation index exceeds the configured cap."""

    def __init__(self, mean: float, required: int, cap: int):
        self.mean = mean
        self.required = required
        self.cap = cap
        super().__init__(
            f"Poisson mean {mean:g} needs truncation index {required} > y_max_cap={cap}"
        )


class UnsupportedRegimeError(DomainError):
    """The numerical optimizer cannot handle the requested constraint set."""


class WrongRegimeError(DomainError):
    """A closed-form asymptotic formula was called outside its regime."""


class UndefinedMultiplierError(DomainError):
    """The Lagrange multiplier cannot be identified from the given support."""


class BracketError(RuntimeError):
    """A scalar root could not be bracketed."""


class SolverStallError(RuntimeError):
    """The optimizer stopped before producing a KKT certificate.

    The best iterate found so far is kept on ``best`` so callers can inspect
    or warm-start from it.
    """

    def __init__(self, message: str, best: Any = None, diagnostics: dict | None = None):
        super().__init__(message)
        self.best = best
        self.diagnostics = diagnostics or {}
