"""Closed-form CDFs Pr(F_beta <= z) under the two mixture assumptions.

F_beta = X1 * X2 with X1 = r' + beta', X2 = 1 / (beta'' + r).

* U & IU: beta', beta'' ~ U(0, beta_star).
* Ga & IE: beta' ~ N(0, sigma2), beta'' ~ Exponential(lambda).

Every evaluator accepts scalar or array ``z`` and returns the same shape.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegenerateInput, NumericalUnderflow
from .fbeta import PrecisionRecall

log = logging.getLogger(__name__)

CLAMP_REPORT_THRESHOLD = 1e-6


@dataclass(frozen=True)
class UniformMixture:
    beta_star: float

    def __post_init__(self):
        if not self.beta_star > 0:
            raise ValueError(f"beta_star must be positive, got {self.beta_star!r}")


@dataclass(frozen=True)
class GaussInvExpMixture:
    lam: float
    sigma2: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2!r}")


@dataclass(frozen=True)
class CdfQuery:
    z: float
    pr: PrecisionRecall


def norm_cdf(x, mu=0.0, sigma2=1.0):
    """Gaussian CDF Phi(x; mu, sigma2), parameterized by variance."""
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    out = special.ndtr((np.asarray(x, dtype=float) - mu) / math.sqrt(sigma2))
    return float(out) if np.ndim(out) == 0 else out


def _clamp(values: np.ndarray, label: str) -> np.ndarray:
    excess = np.maximum(values - 1.0, 0.0) + np.maximum(-values, 0.0)
    worst = float(np.max(excess)) if excess.size else 0.0
    if worst > CLAMP_REPORT_THRESHOLD:
        log.warning("%s: clamped a CDF value by %.3g", label, worst)
    return np.clip(values, 0.0, 1.0)


def _as_output(values: np.ndarray, scalar: bool):
    return float(values[0]) if scalar else values


# ---------------------------------------------------------------------------
# U & IU
# ---------------------------------------------------------------------------

def uiu_support(pr: PrecisionRecall, model: UniformMixture) -> tuple[float, float]:
    """[r' / (r + beta*), (r' + beta*) / r]."""
    r, rp, bs = pr.recall, pr.r_prime, model.beta_star
    if r == 0.0:
        raise DegenerateInput("U&IU support is unbounded at recall r = 0 (upper end 1/r)")
    return rp / (r + bs), (rp + bs) / r


def uiu_branch(z, p, r, beta_star):
    """Which indicator of the U&IU CDF holds.

    Returns 1 for ``z <= p and (r+b)z/(r'+b) <= 1``, 2 for ``z > p and ... > 1``,
    3 for ``z > p and ... <= 1`` and 0 for the combination shown never to occur.
    """
    z = np.asarray(z, dtype=float)
    rp = p * r
    below_p = z <= p
    inside = (r + beta_star) * z / (rp + beta_star) <= 1.0
    return np.where(
        below_p & inside, 1, np.where(~below_p & ~inside, 2, np.where(~below_p & inside, 3, 0))
    )


def _uiu_upper_part(z, r, rp, bs):
    # integral over [r', rz] of 1 plus integral over [rz, r'+b] of the IU cdf,
    # divided by b
    a = rp + bs
    return (r * z - rp) / bs + ((r + bs) * (a - r * z) - (a * a - r * r * z * z) / (2.0 * z)) / (bs * bs)


def _uiu_inner(z, r, rp, bs):
    # upper part minus the piece beyond (r + b) z, where the IU cdf is 0;
    # the 1/z terms cancel exactly, leaving a linear function of z
    return (r * z - rp) / bs + z / 2.0


def uiu_cdf_values(z, pr: PrecisionRecall, model: UniformMixture):
    """Vectorized U&IU CDF over ``z`` for a fixed (p, r, beta*)."""
    lo, hi = uiu_support(pr, model)
    p, r, rp, bs = pr.precision, pr.recall, pr.r_prime, model.beta_star
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)

    out = np.empty_like(z_arr)
    out[z_arr <= lo] = 0.0
    out[z_arr >= hi] = 1.0
    mid = (z_arr > lo) & (z_arr < hi)
    zm = z_arr[mid]
    branch = uiu_branch(zm, p, r, bs)
    if np.any(branch == 0):
        raise AssertionError("impossible U&IU indicator combination inside the support")
    vals = np.empty_like(zm)
    b1 = branch == 1
    z1 = zm[b1]
    vals[b1] = (z1 / 2.0) * (r + bs - rp / z1) ** 2 / (bs * bs)
    b2 = branch == 2
    vals[b2] = _uiu_upper_part(zm[b2], r, rp, bs)
    b3 = branch == 3
    vals[b3] = _uiu_inner(zm[b3], r, rp, bs)
    out[mid] = vals
    return _as_output(_clamp(out, "cdf_uiu"), scalar)


def cdf_uiu(query: CdfQuery, model: UniformMixture) -> float:
    return uiu_cdf_values(query.z, query.pr, model)


# ---------------------------------------------------------------------------
# Ga & IE
# ---------------------------------------------------------------------------

def _log_scaled_tail(u):
    # log(Q(u)) + u^2 / 2 for the upper normal tail Q, stable for any u
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    pos = u >= 0
    out[pos] = np.log(special.erfcx(u[pos] / math.sqrt(2.0)) / 2.0)
    neg = ~pos
    out[neg] = special.log_ndtr(-u[neg]) + u[neg] * u[neg] / 2.0
    return out


def gaie_cdf_values(z, pr: PrecisionRecall, model: GaussInvExpMixture):
    """Vectorized Ga&IE CDF; valid for negative, zero and positive ``z``.

    The correction term ``exp(w) * tail`` has a huge exponent and a tiny tail
    for small ``|z|``. The Gaussian parts of both cancel in closed form, so the
    product is evaluated as ``exp(-d^2 / 2) * erfcx(u / sqrt 2) / 2`` with
    ``d = (rz - r') / sigma``, which never forms either factor on its own.
    """
    r, rp = pr.recall, pr.r_prime
    lam, s2 = model.lam, model.sigma2
    sigma = math.sqrt(s2)
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    out = np.empty_like(z_arr)

    zero = z_arr == 0.0
    out[zero] = norm_cdf(0.0, rp, s2)

    nz = ~zero
    zn = z_arr[nz]
    with np.errstate(over="ignore", divide="ignore"):
        shift = lam * s2 / zn
    bad = ~np.isfinite(shift)
    if np.any(bad):
        raise NumericalUnderflow(
            f"Ga&IE shift lambda*sigma2/z not representable at z={zn[bad][0]!r}"
        )
    d = (r * zn - rp) / sigma
    t = (r * zn - rp + shift) / sigma
    pos = zn > 0
    # upper tail 1 - Phi(t) for z > 0, lower tail Phi(t) = Q(-t) for z < 0
    log_term = -d * d / 2.0 + _log_scaled_tail(np.where(pos, t, -t))
    term = np.exp(log_term)
    base = special.ndtr(d)
    out[nz] = np.where(pos, base + term, base - term)
    return _as_output(_clamp(out, "cdf_gaie"), scalar)


def cdf_gaie(query: CdfQuery, model: GaussInvExpMixture) -> float:
    return gaie_cdf_values(query.z, query.pr, model)


def cdf_values(z, pr: PrecisionRecall, model):
    """Dispatch on mixture type."""
    if isinstance(model, UniformMixture):
        return uiu_cdf_values(z, pr, model)
    if isinstance(model, GaussInvExpMixture):
        return gaie_cdf_values(z, pr, model)
    raise TypeError(f"unknown mixture {model!r}")
