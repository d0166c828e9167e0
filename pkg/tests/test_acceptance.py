"""Acceptance criteria, one test per criterion.

Each test records a ``[Cn] PASS|FAIL ...`` line; pytest prints them in an
"acceptance criteria" section of the terminal summary, and running this file
as a script prints them directly.
"""
import statistics
import time

import numpy as np
import pytest
from scipy import stats

from fbeta_penalty.cdf import GaussInvExpMixture, UniformMixture, uiu_branch
from fbeta_penalty.cli import VERIFY_MODELS, run_cell, verify_grid
from fbeta_penalty.fbeta import GeneralOrder, PrecisionRecall, f_beta_general, harmonic_f1
from fbeta_penalty.knee import KneeConfig, beta_opt_surface, config_for, knee_beta_opt
from fbeta_penalty.loss import BatchPrediction, PenaltyWeight, weighted_bce, weighted_bce_grad
from fbeta_penalty.trainer import init_net, loss_and_grads

from conftest import ACCEPTANCE_LINES
from reference_knee import reference_beta_opt

SEEDS = range(5)


def record(tag, ok, detail):
    line = f"[{tag}] {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def median_best_f1(scenario, model):
    return statistics.median(run_cell(scenario, model, s, 30, 0.5, 1200, 0.25).best_f1 for s in SEEDS)


def test_c1_cdf_matches_monte_carlo():
    assert len(VERIFY_MODELS) == 6
    start = time.perf_counter()
    worst, total, failed = verify_grid(10**6, 42)
    elapsed = time.perf_counter() - start
    ok = worst <= 0.005 and elapsed <= 120
    record("C1", ok, f"CDF vs Monte-Carlo: {total} points, max |delta| {worst:.2e} <= 5e-3, "
                     f"{failed} outside 3 SE, {elapsed:.1f}s <= 120s")


def test_c2_branches_exhaustive_and_exclusive():
    rng = np.random.default_rng(2024)
    n = 10**6
    p = rng.uniform(1e-6, 1, n)
    r = rng.uniform(1e-6, 1, n)
    bs = rng.uniform(0.01, 64, n)
    rp = p * r
    lo, hi = rp / (r + bs), (rp + bs) / r
    z = lo + (hi - lo) * rng.random(n)
    below_p = z <= p
    inside = (r + bs) * z / (rp + bs) <= 1.0
    conditions = np.stack([below_p & inside, ~below_p & ~inside, ~below_p & inside])
    impossible = int(np.count_nonzero(below_p & ~inside))
    exactly_one = bool(np.all(conditions.sum(axis=0) == 1))
    branch = uiu_branch(z, p, r, bs)
    ok = impossible == 0 and exactly_one and not np.any(branch == 0)
    record("C2", ok, f"U&IU indicators over {n} draws: impossible case seen {impossible} times, "
                     f"exactly one branch holds: {exactly_one}")


def test_c3_limit_is_f1():
    grid = [(p, r) for p in (0.1, 0.3, 0.5, 0.7, 0.9) for r in (0.1, 0.3, 0.5, 0.7, 0.9)]
    orders = [10.0**k for k in range(1, 7)]
    worst, monotone = 0.0, True
    for beta in (2.0, 16.0):
        for p, r in grid:
            f1 = harmonic_f1(p, r)
            gaps = [abs(f_beta_general(PrecisionRecall(p, r), beta, GeneralOrder(n)) - f1) for n in orders]
            worst = max(worst, gaps[-1])
            monotone &= all(a >= b for a, b in zip(gaps, gaps[1:]))
    ok = worst <= 1e-4 and monotone
    record("C3", ok, f"generalized F-beta -> F1: max gap at n=1e6 {worst:.2e} <= 1e-4, "
                     f"gap nonincreasing in n: {monotone}")


def test_c4_knee_matches_literal_transcription():
    rng = np.random.default_rng(99)
    models = [UniformMixture(8.0), UniformMixture(16.0), UniformMixture(32.0), GaussInvExpMixture(0.5, 0.5),
              GaussInvExpMixture(0.5, 2.0), GaussInvExpMixture(2.0, 0.5), GaussInvExpMixture(2.0, 2.0),
              GaussInvExpMixture(0.01, 0.01), GaussInvExpMixture(5.0, 5.0)]
    mismatches = 0
    for _ in range(1000):
        p, r = rng.uniform(0, 1, 2)
        model = models[int(rng.integers(len(models)))]
        cfg = config_for(model)
        got, _ = knee_beta_opt(PrecisionRecall(p, r), model, cfg)
        want, _ = reference_beta_opt(p, r, model, cfg.grid_size, cfg.beta_max)
        mismatches += got != want
    degenerate = [
        knee_beta_opt(PrecisionRecall(0.5, 0.5), UniformMixture(16.0), KneeConfig(300, 16.0))[0],
        knee_beta_opt(PrecisionRecall(0.4, 0.0), UniformMixture(16.0), KneeConfig(300, 16.0))[0],
        knee_beta_opt(PrecisionRecall(0.0, 0.0), GaussInvExpMixture(0.5, 0.5), KneeConfig(300, 16.0))[0],
        knee_beta_opt(PrecisionRecall(0.3, 0.8), GaussInvExpMixture(2.0, 2.0), KneeConfig(1, 16.0))[0],
    ]
    ok = mismatches == 0 and all(d == 1.0 for d in degenerate)
    record("C4", ok, f"knee vs literal transcription: {mismatches}/1000 mismatches, "
                     f"degenerate inputs give {degenerate}")


def test_c5_gradients():
    rng = np.random.default_rng(5)
    h = 1e-6
    worst_elem = 0.0
    for b in (0.0, 1.0, 3.0):
        weight = PenaltyWeight(b)
        for _ in range(200):
            f = rng.uniform(0.01, 0.99, 32)
            y = rng.integers(0, 2, 32).astype(float)
            g = weighted_bce_grad(BatchPrediction(f, y), weight)
            for i in np.flatnonzero(np.abs((1 - f) - 0.5) >= 1e-4):
                up, dn = f.copy(), f.copy()
                up[i] += h
                dn[i] -= h
                num = (weighted_bce(BatchPrediction(up, y), weight)
                       - weighted_bce(BatchPrediction(dn, y), weight)) / (2 * h)
                worst_elem = max(worst_elem, abs(num - g[i]) / max(1.0, abs(g[i])))

    worst_net = 0.0
    for b in (0.0, 3.0):
        net = init_net(3, 11)
        x = rng.normal(size=(64, 3))
        y = rng.integers(0, 2, 64).astype(float)
        weight = PenaltyWeight(b)
        _, gw, gb, _ = loss_and_grads(net, x, y, weight)
        grads = [g for pair in zip(gw, gb) for g in pair]
        params = net.parameters()
        checked = 0
        while checked < 20:
            k = int(rng.integers(len(params)))
            idx = tuple(int(rng.integers(s)) for s in params[k].shape)
            orig = params[k][idx]
            params[k][idx] = orig + 1e-5
            up = loss_and_grads(net, x, y, weight)[0]
            params[k][idx] = orig - 1e-5
            dn = loss_and_grads(net, x, y, weight)[0]
            params[k][idx] = orig
            num, ana = (up - dn) / 2e-5, grads[k][idx]
            if max(abs(num), abs(ana)) < 1e-8:
                continue
            worst_net = max(worst_net, abs(num - ana) / max(abs(num), abs(ana)))
            checked += 1
    ok = worst_elem <= 1e-5 and worst_net <= 1e-4
    record("C5", ok, f"gradients vs central differences: element rel err {worst_elem:.1e} <= 1e-5, "
                     f"end-to-end rel err {worst_net:.1e} <= 1e-4")


@pytest.mark.parametrize("scenario", ["cve-easy", "chveh-easy"])
def test_c6_ust_easy(scenario):
    start = time.perf_counter()
    base = median_best_f1(scenario, "mb")
    penalties = {m: median_best_f1(scenario, m) for m in ("m1_8", "m2_0.5_0.5", "m2_0.01_0.01")}
    per_run = (time.perf_counter() - start) / (4 * len(SEEDS))
    best_model = max(penalties, key=penalties.get)
    ok = base >= 0.90 and penalties[best_model] >= base - 0.02 and per_run <= 120
    record("C6", ok, f"{scenario}: baseline median {base:.4f} >= 0.90, best penalty {best_model} "
                     f"{penalties[best_model]:.4f} >= baseline - 0.02, {per_run:.2f}s per run")


def test_c7_pressure_vessel():
    easy = median_best_f1("pv-easy", "mb")
    models = ["mb", "m1_8", "m1_16", "m1_32", "m2_0.5_0.5", "m2_0.5_2", "m2_2_0.5", "m2_2_2",
              "m2_0.01_0.01", "m2_5_5"]
    hard = {m: median_best_f1("pv-hard", m) for m in models}
    worst_model = max(hard, key=hard.get)
    ok = easy >= 0.95 and hard[worst_model] <= 0.85
    record("C7", ok, f"pv-easy baseline median {easy:.4f} >= 0.95; pv-hard highest median "
                     f"{worst_model} {hard[worst_model]:.4f} <= 0.85")


def test_c9_surfaces():
    specs = {
        "m1_8": (UniformMixture(8.0), KneeConfig(300, 8.0)),
        "m1_16": (UniformMixture(16.0), KneeConfig(300, 16.0)),
        "m2_0.5_0.5": (GaussInvExpMixture(0.5, 0.5), KneeConfig(300, 16.0)),
        "m2_2_2": (GaussInvExpMixture(2.0, 2.0), KneeConfig(300, 16.0)),
    }
    surfaces = {k: beta_opt_surface(m, c, 50) for k, (m, c) in specs.items()}
    in_range = all(np.all(np.isfinite(s)) and np.all((s > 0) & (s <= 1)) for s in surfaces.values())
    rho = stats.spearmanr(surfaces["m1_8"].ravel(), surfaces["m1_16"].ravel()).statistic
    ok = in_range and rho > 0
    record("C9", ok, f"50x50 surfaces finite in (0, 1]: {in_range}; Spearman rho(M1^8, M1^16) {rho:.3f} > 0")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
