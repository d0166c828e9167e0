"""F-beta family and its multiplicative decomposition.

All functions work on plain floats. ``f_beta_general`` also broadcasts over
numpy arrays of ``beta`` so the knee search can evaluate a whole grid at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput


@dataclass(frozen=True)
class PrecisionRecall:
    precision: float
    recall: float

    def __post_init__(self):
        for name in ("precision", "recall"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        object.__setattr__(self, "precision", float(self.precision))
        object.__setattr__(self, "recall", float(self.recall))

    @property
    def r_prime(self) -> float:
        """p * r, the location of the numerator variable."""
        return self.precision * self.recall


@dataclass(frozen=True)
class GeneralOrder:
    """Derivative order n used by the generalized F-beta. n > 0, n != 2."""

    n: float = 1.0

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError(f"order must be positive, got {self.n!r}")
        if self.n == 2:
            raise ValueError("order n = 2 collapses to p = r and is not allowed")

    @property
    def exponent(self) -> float:
        return -2.0 / (self.n - 2.0)


CLASSIC = GeneralOrder(1.0)


@dataclass(frozen=True)
class Decomposition:
    r_prime: float
    beta_prime: float
    beta_double_prime: float

    def reconstruct(self, recall: float) -> float:
        """(r' + beta') / (beta'' + r)."""
        return (self.r_prime + self.beta_prime) / (self.beta_double_prime + recall)


def effectiveness(pr: PrecisionRecall, alpha: float) -> float:
    """van Rijsbergen's E = 1 - 1 / (alpha/p + (1 - alpha)/r)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    p, r = pr.precision, pr.recall
    if p == 0.0 or r == 0.0:
        raise DegenerateInput("effectiveness needs p > 0 and r > 0")
    return 1.0 - 1.0 / (alpha / p + (1.0 - alpha) / r)


def _beta_weight(beta, order: GeneralOrder):
    return np.power(beta, order.exponent)


def f_beta_general(pr: PrecisionRecall, beta, order: GeneralOrder = CLASSIC):
    """Generalized F-beta of derivative order n.

    ``((c + 1) p r) / (c p + r)`` with ``c = beta ** (-2 / (n - 2))``; at n = 1
    this is the usual F-beta. ``beta`` may be a scalar or an array.
    """
    p, r = pr.precision, pr.recall
    if p == 0.0 and r == 0.0:
        raise DegenerateInput("F-beta is 0/0 at p = r = 0")
    beta_arr = np.asarray(beta, dtype=float)
    if np.any(beta_arr <= 0):
        raise ValueError("beta must be positive")
    c = _beta_weight(beta_arr, order)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = ((c + 1.0) * p * r) / (c * p + r)
    if p == 0.0 or r == 0.0:
        # the numerator vanishes; skip a 0/0 when c p underflows
        out = np.zeros_like(out)
    elif p == r:
        # exact identity; rounding noise here would fake a knee downstream
        out = np.full_like(out, p)
    return float(out) if out.ndim == 0 else out


def alpha_n(beta: float, order: GeneralOrder = CLASSIC) -> float:
    """alpha_n = 1 / (beta ** (-2 / (n - 2)) + 1)."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    if order.n == 1.0:
        # exact form 1 / (beta^2 + 1)
        return 1.0 / (beta * beta + 1.0)
    return 1.0 / (beta ** order.exponent + 1.0)


def decompose(pr: PrecisionRecall, beta: float) -> Decomposition:
    if not beta > 0:
        raise ValueError("beta must be positive")
    p, r = pr.precision, pr.recall
    b2 = beta * beta
    return Decomposition(r_prime=p * r, beta_prime=b2 * p * r, beta_double_prime=b2 * p)


def harmonic_f1(p: float, r: float) -> float:
    """2pr / (p + r), with 0 when p + r = 0."""
    s = p + r
    return 0.0 if s == 0 else 2.0 * p * r / s
