"""Brute-force Monte-Carlo estimates of Pr(F_beta <= z).

Samples the decomposition F_beta = (r' + beta') / (beta'' + r) directly, with
no reference to the closed forms in :mod:`cdf`.

Random numbers come from numpy's PCG64 bit generator seeded with the given
integer. Two uniform streams of length ``count`` are drawn in a fixed order
and mapped through inverse CDFs, so the stream consumed never depends on the
mixture parameters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .cdf import GaussInvExpMixture, UniformMixture
from .errors import DegenerateInput
from .fbeta import PrecisionRecall

MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class OracleEstimate:
    probability: float
    standard_error: float
    sample_count: int
    seed: int

    @classmethod
    def from_hits(cls, hits: int, count: int, seed: int) -> "OracleEstimate":
        prob = hits / count
        return cls(prob, math.sqrt(prob * (1.0 - prob) / count), count, seed)

    def agrees_with(self, value: float, n_sigma: float = 3.0) -> bool:
        """|value - probability| within n_sigma standard errors (one-count floor)."""
        se = max(self.standard_error, 1.0 / self.sample_count)
        return abs(value - self.probability) <= n_sigma * se


def _uniform_streams(count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if count < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {count}")
    rng = np.random.Generator(np.random.PCG64(seed))
    u1 = rng.random(count)
    u2 = rng.random(count)
    return u1, u2


def sample_products(pr: PrecisionRecall, model, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` realizations of X1 * X2 under ``model``."""
    r, rp = pr.recall, pr.r_prime
    u1, u2 = _uniform_streams(count, seed)
    if isinstance(model, UniformMixture):
        if r == 0.0:
            raise DegenerateInput("U&IU sampling needs recall > 0")
        beta1 = model.beta_star * u1
        beta2 = model.beta_star * u2
    elif isinstance(model, GaussInvExpMixture):
        # u in [0, 1): ndtri(0) = -inf, so reflect onto (0, 1]
        beta1 = math.sqrt(model.sigma2) * special.ndtri(1.0 - u1)
        beta2 = -np.log1p(-u2) / model.lam
        if r == 0.0:
            rng = np.random.Generator(np.random.PCG64([seed, 1]))
            zero = beta2 == 0.0
            while np.any(zero):
                beta2[zero] = -np.log1p(-rng.random(int(zero.sum()))) / model.lam
                zero = beta2 == 0.0
    else:
        raise TypeError(f"unknown mixture {model!r}")
    return (rp + beta1) / (beta2 + r)


def estimate_from_samples(samples: np.ndarray, z: float, seed: int) -> OracleEstimate:
    hits = int(np.count_nonzero(samples <= z))
    return OracleEstimate.from_hits(hits, samples.size, seed)


def sample_uiu(pr: PrecisionRecall, model: UniformMixture, z: float, count: int, seed: int) -> OracleEstimate:
    return estimate_from_samples(sample_products(pr, model, count, seed), z, seed)


def sample_gaie(pr: PrecisionRecall, model: GaussInvExpMixture, z: float, count: int, seed: int) -> OracleEstimate:
    return estimate_from_samples(sample_products(pr, model, count, seed), z, seed)
