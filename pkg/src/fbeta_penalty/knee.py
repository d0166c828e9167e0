"""Knee search for the per-batch penalty parameter beta_opt.

For a single (precision, recall) pair the search walks a grid of candidate
betas, evaluates z = F_beta(p, r) and the mixture CDF at z, normalizes the
resulting curve into the unit square and averages the heights of the strict
interior local maxima of the difference curve. Any degenerate path falls
back to ``KneeConfig.default_beta``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .cdf import GaussInvExpMixture, UniformMixture, cdf_values
from .errors import FBetaPenaltyError
from .fbeta import PrecisionRecall, f_beta_general

PenaltyModel = Union[UniformMixture, GaussInvExpMixture]

GAIE_BETA_MAX = 16.0


@dataclass(frozen=True)
class KneeConfig:
    grid_size: int = 300
    beta_max: float = 16.0
    default_beta: float = 1.0

    def __post_init__(self):
        if self.grid_size <= 0:
            raise ValueError("grid_size must be positive")
        if not self.beta_max > 0:
            raise ValueError("beta_max must be positive")


def config_for(model: PenaltyModel, grid_size: int = 300) -> KneeConfig:
    """M1 searches up to its own beta*; M2 uses the fixed beta_max of 16."""
    if isinstance(model, UniformMixture):
        return KneeConfig(grid_size=grid_size, beta_max=model.beta_star)
    return KneeConfig(grid_size=grid_size, beta_max=GAIE_BETA_MAX)


def parse_model(name: str) -> PenaltyModel:
    """Parse ``m1_16`` or ``m2_0.5_2`` style names."""
    parts = name.lower().split("_")
    try:
        if parts[0] == "m1" and len(parts) == 2:
            return UniformMixture(float(parts[1]))
        if parts[0] == "m2" and len(parts) == 3:
            return GaussInvExpMixture(float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad model spec {name!r}: {exc}") from None
    raise ValueError(f"bad model spec {name!r}; expected m1_<beta*> or m2_<lambda>_<sigma2>")


def model_name(model: PenaltyModel) -> str:
    if isinstance(model, UniformMixture):
        return f"m1_{model.beta_star:g}"
    return f"m2_{model.lam:g}_{model.sigma2:g}"


_EMPTY = np.empty(0)


@dataclass
class KneeTrace:
    b_s: np.ndarray = field(default_factory=lambda: _EMPTY)
    p_s: np.ndarray = field(default_factory=lambda: _EMPTY)
    b_sn: np.ndarray = field(default_factory=lambda: _EMPTY)
    p_sn: np.ndarray = field(default_factory=lambda: _EMPTY)
    b_d: np.ndarray = field(default_factory=lambda: _EMPTY)
    p_d: np.ndarray = field(default_factory=lambda: _EMPTY)
    b_lmx: np.ndarray = field(default_factory=lambda: _EMPTY)
    p_lmx: np.ndarray = field(default_factory=lambda: _EMPTY)
    beta_opt: float = 1.0
    used_default: bool = True
    reason: str = ""


def beta_grid(config: KneeConfig) -> np.ndarray:
    """``grid_size`` equally spaced candidates from beta_max/n up to beta_max."""
    n = config.grid_size
    grid = config.beta_max * np.arange(1, n + 1) / n
    grid[-1] = config.beta_max
    return grid


def _fallback(trace: KneeTrace, config: KneeConfig, reason: str):
    trace.beta_opt = config.default_beta
    trace.used_default = True
    trace.reason = reason
    return trace.beta_opt, trace


def knee_beta_opt(pr: PrecisionRecall, model: PenaltyModel, config: KneeConfig):
    """Return ``(beta_opt, trace)`` for one precision/recall pair."""
    trace = KneeTrace()
    b_s = beta_grid(config)
    trace.b_s = b_s
    p, r = pr.precision, pr.recall
    try:
        z = f_beta_general(pr, b_s)
        p_s = np.asarray(cdf_values(z, pr, model), dtype=float)
    except FBetaPenaltyError as exc:
        return _fallback(trace, config, f"cdf: {exc}")

    if r < p:
        p_s = p_s.max() - p_s
    trace.p_s = p_s

    b_min, b_max = b_s.min(), b_s.max()
    p_min, p_max = p_s.min(), p_s.max()
    if b_max == b_min or p_max == p_min:
        return _fallback(trace, config, "flat curve")

    b_sn = (b_s - b_min) / (b_max - b_min)
    p_sn = (p_s - p_min) / (p_max - p_min)
    p_d = p_sn - b_sn
    trace.b_sn, trace.p_sn, trace.b_d, trace.p_d = b_sn, p_sn, b_sn, p_d

    centre = p_d[1:-1]
    peak = np.flatnonzero((p_d[:-2] < centre) & (p_d[2:] < centre)) + 1
    trace.p_lmx = p_d[peak]
    trace.b_lmx = b_sn[peak]
    if peak.size == 0:
        return _fallback(trace, config, "no local maxima")

    # plain left-to-right sum, so a naive list version agrees bit for bit
    total = 0.0
    for v in trace.p_lmx.tolist():
        total += v
    mean = total / peak.size
    if not mean > 0:
        return _fallback(trace, config, "nonpositive mean")
    trace.beta_opt = mean
    trace.used_default = False
    return mean, trace


def beta_opt_surface(model: PenaltyModel, config: KneeConfig, resolution: int = 50) -> np.ndarray:
    """beta_opt on the grid p, r in {1/res, ..., 1}; rows index p, columns r."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    ticks = np.arange(1, resolution + 1) / resolution
    out = np.empty((resolution, resolution))
    for i, p in enumerate(ticks):
        for j, r in enumerate(ticks):
            out[i, j], _ = knee_beta_opt(PrecisionRecall(p, r), model, config)
    return out
