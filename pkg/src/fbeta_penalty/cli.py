"""Command-line front end. Every subcommand writes CSV (stdout or ``--out``).

Exit codes: 0 success, 1 domain or runtime error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager

import numpy as np

from .cdf import GaussInvExpMixture, UniformMixture, cdf_values
from .errors import FBetaPenaltyError
from .fbeta import PrecisionRecall
from .knee import KneeConfig, beta_opt_surface, config_for, model_name, parse_model
from .oracle import MIN_SAMPLES, estimate_from_samples, sample_products
from .simulators import (
    PV_EASY,
    SCENARIOS,
    UST_EASY,
    SimConfig,
    read_csv,
    simulate_pv,
    simulate_ust,
    write_csv,
)
from .trainer import Baseline, Penalty, TrainConfig, init_net, train

VERIFY_GRID = tuple(k / 10 for k in range(1, 10))
VERIFY_Z = (0.4, 0.8)
VERIFY_MODELS = (
    UniformMixture(8.0),
    UniformMixture(16.0),
    GaussInvExpMixture(0.5, 0.5),
    GaussInvExpMixture(0.5, 2.0),
    GaussInvExpMixture(2.0, 0.5),
    GaussInvExpMixture(2.0, 2.0),
)
BENCH_MODELS = (
    "mb", "m1_16", "m2_0.5_0.5", "m2_0.5_2", "m2_2_0.5", "m2_2_2",
    "m1_8", "m1_32", "m2_0.01_0.01", "m2_5_5",
)
VAL_FRACTION = 0.2


class UsageError(Exception):
    pass


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# cdf
# ---------------------------------------------------------------------------

def _mixture_from_args(args):
    if args.model == "uiu":
        return UniformMixture(args.beta_star)
    return GaussInvExpMixture(args.lam, args.sigma2)


def cmd_cdf(args) -> int:
    model = _mixture_from_args(args)
    if args.grid:
        ticks = [k / args.grid for k in range(1, args.grid + 1)]
        ps, rs = ticks, ticks
    else:
        ps, rs = args.p, args.r
    rows = []
    for p in ps:
        for r in rs:
            pr = PrecisionRecall(p, r)
            probs = np.atleast_1d(cdf_values(np.asarray(args.z, dtype=float), pr, model))
            rows.extend([args.model, _fmt(p), _fmt(r), _fmt(z), _fmt(prob)] for z, prob in zip(args.z, probs))
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["model", "p", "r", "z", "prob"])
        w.writerows(rows)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def verify_grid(samples: int, seed: int, corrupt: float = 0.0, report=None):
    """Closed form vs Monte-Carlo over the verification grid.

    Returns ``(max_abs_delta, n_points, n_failed)``.
    """
    worst, total, failed = 0.0, 0, 0
    for model in VERIFY_MODELS:
        for p in VERIFY_GRID:
            for r in VERIFY_GRID:
                pr = PrecisionRecall(p, r)
                draws = sample_products(pr, model, samples, seed)
                closed = np.atleast_1d(cdf_values(np.asarray(VERIFY_Z), pr, model)) + corrupt
                for z, cf in zip(VERIFY_Z, closed):
                    est = estimate_from_samples(draws, z, seed)
                    ok = est.agrees_with(cf)
                    delta = abs(cf - est.probability)
                    worst = max(worst, delta)
                    total += 1
                    failed += not ok
                    if report is not None:
                        report.writerow([model_name(model), _fmt(p), _fmt(r), _fmt(z), _fmt(cf),
                                         _fmt(est.probability), _fmt(est.standard_error),
                                         "pass" if ok else "FAIL"])
    return worst, total, failed


def cmd_verify(args) -> int:
    if args.samples < MIN_SAMPLES:
        raise UsageError(f"--samples must be at least {MIN_SAMPLES}")
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["model", "p", "r", "z", "closed_form", "monte_carlo", "std_error", "status"])
        worst, total, failed = verify_grid(args.samples, args.seed, args.corrupt, w)
    print(f"points={total} failed={failed} max_abs_delta={worst:.6g}", file=sys.stderr)
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------
# surface
# ---------------------------------------------------------------------------

def cmd_surface(args) -> int:
    if args.resolution < 2:
        raise UsageError("--resolution must be at least 2")
    if args.model == "m1":
        model = UniformMixture(args.beta_max)
    else:
        model = GaussInvExpMixture(args.lam, args.sigma2)
    config = KneeConfig(grid_size=args.grid_size, beta_max=args.beta_max)
    surf = beta_opt_surface(model, config, args.resolution)
    ticks = np.arange(1, args.resolution + 1) / args.resolution
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["p", "r", "beta_opt"])
        for i, p in enumerate(ticks):
            for j, r in enumerate(ticks):
                w.writerow([_fmt(p), _fmt(r), _fmt(surf[i, j])])
    return 0


# ---------------------------------------------------------------------------
# simulate / train / bench
# ---------------------------------------------------------------------------

def _simulate_from_args(args):
    cfg = SimConfig(args.size, args.imbalance, args.seed)
    if args.scenario == "pv":
        return simulate_pv(cfg, args.ts, args.th)
    return simulate_ust(cfg, args.a, args.b, endcaps=args.scenario == "chveh")


def cmd_simulate(args) -> int:
    data = _simulate_from_args(args)
    with _output(args.out) as fh:
        write_csv(data, fh)
    return 0


def _loss_mode(name: str):
    if name in ("baseline", "mb"):
        return Baseline()
    return Penalty(parse_model(name))


def run_cell(scenario: str, model: str, seed: int, epochs: int, lr: float, size: int,
             imbalance: float):
    """One (scenario, model, seed) training run; returns the TrainResult."""
    data = SCENARIOS[scenario](SimConfig(size, imbalance, seed))
    train_set, val_set = data.split(1.0 - VAL_FRACTION, seed)
    net = init_net(data.features.shape[1], seed)
    config = TrainConfig(epochs=epochs, learning_rate=lr, seed=seed, loss_mode=_loss_mode(model))
    return train(net, train_set, val_set, config)


def _bench_cell(cell):
    scenario, model, seed, epochs, lr, size, imbalance = cell
    result = run_cell(scenario, model, seed, epochs, lr, size, imbalance)
    return scenario, model, seed, result.best_f1


def cmd_train(args) -> int:
    if args.data:
        data = read_csv(args.data)
        train_set, val_set = data.split(1.0 - VAL_FRACTION, args.seed)
    else:
        if args.scenario not in SCENARIOS:
            raise UsageError(f"--scenario must be one of {sorted(SCENARIOS)}")
        data = SCENARIOS[args.scenario](SimConfig(args.size, args.imbalance, args.seed))
        train_set, val_set = data.split(1.0 - VAL_FRACTION, args.seed)
    net = init_net(data.features.shape[1], args.seed)
    config = TrainConfig(epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr,
                         seed=args.seed, loss_mode=_loss_mode(args.loss))
    result = train(net, train_set, val_set, config)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["epoch", "train_loss", "precision", "recall", "f1", "mean_beta_opt",
                    "default_fraction"])
        for m in result.history:
            w.writerow([m.epoch, _fmt(m.train_loss), _fmt(m.precision), _fmt(m.recall), _fmt(m.f1),
                        _fmt(m.mean_beta_opt), _fmt(m.default_fraction)])
    best = result.best
    print(f"best_f1={best.f1:.4f} epoch={best.epoch}", file=sys.stderr)
    return 0


def bench_rows(scenarios, models, seeds, epochs, lr, size, imbalance, jobs=1):
    cells = [(s, m, seed, epochs, lr, size, imbalance) for s in scenarios for m in models for seed in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(c) for c in cells]
    order = {m: i for i, m in enumerate(models)}
    return sorted(rows, key=lambda row: (scenarios.index(row[0]), order[row[1]], row[2]))


def bench_summary(rows):
    """Per scenario: median best-F1 per model and the winning model."""
    by_cell: dict[tuple[str, str], list[float]] = {}
    for scenario, model, _, f1 in rows:
        by_cell.setdefault((scenario, model), []).append(f1)
    medians = {k: statistics.median(v) for k, v in by_cell.items()}
    winners = {}
    for (scenario, model), med in medians.items():
        if scenario not in winners or med > winners[scenario][1]:
            winners[scenario] = (model, med)
    return medians, winners


def cmd_bench(args) -> int:
    scenarios = [s.strip() for s in args.scenarios.split(",") if s.strip()]
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    if not scenarios or not models:
        raise UsageError("scenario and model lists must be nonempty")
    for s in scenarios:
        if s not in SCENARIOS:
            raise UsageError(f"unknown scenario {s!r}; choose from {sorted(SCENARIOS)}")
    for m in models:
        _loss_mode(m)
    seeds = list(range(args.seeds))
    rows = bench_rows(scenarios, models, seeds, args.epochs, args.lr, args.size, args.imbalance, args.jobs)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["scenario", "model", "seed", "best_f1"])
        for scenario, model, seed, f1 in rows:
            w.writerow([scenario, model, seed, _fmt(f1)])
    medians, winners = bench_summary(rows)
    print("scenario,winner,median_best_f1,baseline_median", file=sys.stderr)
    for s in scenarios:
        model, med = winners[s]
        base = medians.get((s, "mb"))
        base_txt = f"{base:.4f}" if base is not None else ""
        print(f"{s},{model},{med:.4f},{base_txt}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbeta-penalty", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cdf", help="evaluate Pr(F_beta <= z)")
    p.add_argument("--model", choices=("uiu", "gaie"), required=True)
    p.add_argument("--beta-star", type=float, default=16.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--sigma2", type=float, default=0.5)
    p.add_argument("--p", type=float, nargs="+", default=[0.5])
    p.add_argument("--r", type=float, nargs="+", default=[0.5])
    p.add_argument("--z", type=float, nargs="+", default=list(VERIFY_Z))
    p.add_argument("--grid", type=_positive_int, help="use p, r = k/N for k = 1..N")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("verify", help="closed-form CDFs vs Monte-Carlo on the verification grid")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", help="per-point report CSV (default stdout)")
    p.add_argument("--corrupt", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("surface", help="beta_opt surface over the (p, r) grid")
    p.add_argument("--model", choices=("m1", "m2"), required=True)
    p.add_argument("--beta-max", type=float, default=16.0,
                   help="knee grid end point; also beta* for m1")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--sigma2", type=float, default=0.5)
    p.add_argument("--resolution", type=int, default=50)
    p.add_argument("--grid-size", type=_positive_int, default=300)
    p.add_argument("--out")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("simulate", help="generate a labeled dataset CSV")
    p.add_argument("--scenario", choices=("pv", "cve", "chveh"), required=True)
    p.add_argument("--a", type=float, default=UST_EASY[0])
    p.add_argument("--b", type=float, default=UST_EASY[1])
    p.add_argument("--ts", type=float, default=PV_EASY[0])
    p.add_argument("--th", type=float, default=PV_EASY[1])
    p.add_argument("--size", type=_positive_int, default=1200)
    p.add_argument("--imbalance", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train the 20-10-1 network, per-epoch metrics CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", choices=sorted(SCENARIOS))
    src.add_argument("--data", help="dataset CSV written by `simulate`")
    p.add_argument("--loss", default="baseline", help="baseline, m1_<b> or m2_<lambda>_<sigma2>")
    p.add_argument("--epochs", type=_positive_int, default=30)
    p.add_argument("--batch-size", type=_positive_int, default=128)
    p.add_argument("--lr", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--size", type=_positive_int, default=1200)
    p.add_argument("--imbalance", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="desk-scale benchmark sweep")
    p.add_argument("--scenarios", default=",".join(SCENARIOS))
    p.add_argument("--models", default=",".join(BENCH_MODELS))
    p.add_argument("--seeds", type=_positive_int, default=5, help="run seeds 0..N-1")
    p.add_argument("--epochs", type=_positive_int, default=30)
    p.add_argument("--lr", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--size", type=_positive_int, default=1200)
    p.add_argument("--imbalance", type=float, default=0.25)
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (FBetaPenaltyError, ValueError, OSError) as exc:
        print(f"fbeta-penalty {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
