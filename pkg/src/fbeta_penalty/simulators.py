"""Pressure-vessel and underground-storage-tank classification datasets.

Label 0 comes from a baseline design and label 1 from a perturbed one. Both
generators are deterministic for a given seed (numpy PCG64).
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OutOfRangeHeight

# HAOASMA optimum used as the label-0 vessel design
PV_BASELINE = {"t_s": 1.8048, "t_h": 0.0939, "radius": 13.8360, "length": 123.2019}
PV_EASY = (1.7887, 0.0313)
PV_HARD = (1.7887, 0.2817)

UST_RADIUS = 4.0
UST_LENGTH = 32.0
UST_EASY = (3.2, 5.0)
UST_HARD = (3.8, 4.2105)
UST_VOLUME_NOISE_VAR = 2.0
UST_HEIGHT_NOISE = 0.05


@dataclass(frozen=True)
class VesselParams:
    t_s: float
    t_h: float
    radius: float
    length: float

    def __post_init__(self):
        # zeros are accepted so degenerate designs evaluate to their limit
        for name in ("t_s", "t_h", "radius", "length"):
            if np.any(np.asarray(getattr(self, name)) < 0):
                raise ValueError(f"{name} must be nonnegative")


def pv_cost(params: VesselParams):
    """Material, forming and welding cost; broadcasts over array fields."""
    x1, x2, x3, x4 = params.t_s, params.t_h, params.radius, params.length
    return 0.6224 * x1 * x3 * x4 + 1.7781 * x2 * x3**2 + 3.1661 * x1**2 * x4 + 19.84 * x1**2 * x3


class TankShape(enum.Enum):
    CYLINDER = "cylinder"
    CYLINDER_HEMI_CAPS = "cylinder_hemi_caps"
    ELLIPSE = "ellipse"
    ELLIPSE_HEMI_CAPS = "ellipse_hemi_caps"


@dataclass(frozen=True)
class TankGeometry:
    shape: TankShape
    length: float
    r: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        dims = (self.r,) if self.is_circular else (self.a, self.b)
        if self.length <= 0 or any(d <= 0 for d in dims):
            raise ValueError(f"tank dimensions must be positive: {self}")

    @property
    def is_circular(self) -> bool:
        return self.shape in (TankShape.CYLINDER, TankShape.CYLINDER_HEMI_CAPS)

    @property
    def max_height(self) -> float:
        return 2.0 * (self.r if self.is_circular else self.a)

    @classmethod
    def cylinder(cls, r, length, endcaps=False):
        shape = TankShape.CYLINDER_HEMI_CAPS if endcaps else TankShape.CYLINDER
        return cls(shape, length, r=r)

    @classmethod
    def ellipse(cls, a, b, length, endcaps=False):
        shape = TankShape.ELLIPSE_HEMI_CAPS if endcaps else TankShape.ELLIPSE
        return cls(shape, length, a=a, b=b)


def _safe_acos(x):
    return np.arccos(np.clip(x, -1.0, 1.0))


def cylinder_volume(r, length, h):
    return length * (r * r * _safe_acos((r - h) / r) - (r - h) * np.sqrt(np.maximum(2 * r * h - h * h, 0.0)))


def cylinder_caps_volume(r, length, h):
    return cylinder_volume(r, length, h) + math.pi * h * h * (3 * r - h) / 3.0


def _ellipse_radius(a, b, h):
    # distance from centre to where the fill line meets the wall
    return np.sqrt(a * a + (h * h - 2 * h * a) * (1.0 - b * b / (a * a)))


def ellipse_volume(a, b, length, h):
    rho = _ellipse_radius(a, b, h)
    seg = a * b * _safe_acos((a - h) / rho)
    tri = b * (a - h) * np.sqrt(np.maximum(1.0 - (1.0 - h / a) ** 2, 0.0))
    return length * (seg - tri)


def ellipse_caps_volume(a, b, length, h):
    rho = _ellipse_radius(a, b, h)
    caps = (2 * math.pi * a**3 + math.pi * (a - h) * (h * b * b / a) * ((h - 2 * a) / a)) / 3.0
    caps -= 2 * math.pi * a**3 * (a - h) / (3.0 * rho)
    return ellipse_volume(a, b, length, h) + caps


def tank_volume(geom: TankGeometry, h):
    """Fill volume at height ``h`` (scalar or array) for the given tank."""
    h_arr = np.asarray(h, dtype=float)
    if np.any(h_arr < 0) or np.any(h_arr > geom.max_height):
        raise OutOfRangeHeight(f"height outside [0, {geom.max_height}]")
    if geom.shape is TankShape.CYLINDER:
        out = cylinder_volume(geom.r, geom.length, h_arr)
    elif geom.shape is TankShape.CYLINDER_HEMI_CAPS:
        out = cylinder_caps_volume(geom.r, geom.length, h_arr)
    elif geom.shape is TankShape.ELLIPSE:
        out = ellipse_volume(geom.a, geom.b, geom.length, h_arr)
    else:
        out = ellipse_caps_volume(geom.a, geom.b, geom.length, h_arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SimConfig:
    size: int = 1200
    imbalance: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("size must be positive")
        if not 0.0 < self.imbalance < 1.0:
            raise ValueError("imbalance must lie in (0, 1)")

    @property
    def s0(self) -> int:
        return math.floor(self.size * (1.0 - self.imbalance))

    @property
    def s1(self) -> int:
        return self.size - self.s0


@dataclass
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    columns: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features must be 2-D with one row per label")
        if not self.columns:
            self.columns = tuple(f"x{i}" for i in range(self.features.shape[1]))

    def __len__(self):
        return self.labels.shape[0]

    def subset(self, idx) -> "LabeledDataset":
        return LabeledDataset(self.features[idx], self.labels[idx], self.columns)

    def split(self, fraction: float, seed: int) -> tuple["LabeledDataset", "LabeledDataset"]:
        """Seeded stratified split into (first, second) with ``fraction`` in the first."""
        rng = np.random.default_rng(seed)
        first, second = [], []
        for label in (0.0, 1.0):
            idx = np.flatnonzero(self.labels == label)
            rng.shuffle(idx)
            k = int(round(fraction * idx.size))
            first.append(idx[:k])
            second.append(idx[k:])
        return self.subset(np.sort(np.concatenate(first))), self.subset(np.sort(np.concatenate(second)))


def simulate_pv(config: SimConfig, t_s_v: float, t_h_v: float) -> LabeledDataset:
    if not (t_s_v > 0 and t_h_v > 0):
        raise ValueError("thickness variations must be positive")
    rng = np.random.default_rng(config.seed)
    base = PV_BASELINE
    blocks = []
    for n, (t_s, t_h) in ((config.s0, (base["t_s"], base["t_h"])), (config.s1, (t_s_v, t_h_v))):
        radius = rng.normal(base["radius"], 1.0, n)
        length = rng.normal(base["length"], 1.0, n)
        cost = pv_cost(VesselParams(t_s, t_h, radius, length))
        blocks.append(np.column_stack([radius, length, cost]))
    labels = np.concatenate([np.zeros(config.s0), np.ones(config.s1)])
    return LabeledDataset(np.vstack(blocks), labels, ("R", "L", "cost"))


def simulate_ust(config: SimConfig, a: float, b: float, endcaps: bool = False) -> LabeledDataset:
    if not (a > 0 and b > 0):
        raise ValueError("ellipse axes must be positive")
    rng = np.random.default_rng(config.seed)
    baseline = TankGeometry.cylinder(UST_RADIUS, UST_LENGTH, endcaps)
    deformed = TankGeometry.ellipse(a, b, UST_LENGTH, endcaps)
    noise_sd = math.sqrt(UST_VOLUME_NOISE_VAR)
    blocks = []
    for n, geom in ((config.s0, baseline), (config.s1, deformed)):
        eps = rng.normal(0.0, noise_sd, n)
        gamma = rng.uniform(-UST_HEIGHT_NOISE, UST_HEIGHT_NOISE, n)
        h = rng.uniform(1.0, geom.max_height - 1.0, n)
        volume = tank_volume(geom, h) + eps
        blocks.append(np.column_stack([volume, h + gamma]))
    labels = np.concatenate([np.zeros(config.s0), np.ones(config.s1)])
    return LabeledDataset(np.vstack(blocks), labels, ("volume", "height"))


# scenario name -> generator for the desk-scale table
SCENARIOS = {
    "cve-easy": lambda cfg: simulate_ust(cfg, *UST_EASY, endcaps=False),
    "cve-hard": lambda cfg: simulate_ust(cfg, *UST_HARD, endcaps=False),
    "chveh-easy": lambda cfg: simulate_ust(cfg, *UST_EASY, endcaps=True),
    "chveh-hard": lambda cfg: simulate_ust(cfg, *UST_HARD, endcaps=True),
    "pv-easy": lambda cfg: simulate_pv(cfg, *PV_EASY),
    "pv-hard": lambda cfg: simulate_pv(cfg, *PV_HARD),
}


def write_csv(data: LabeledDataset, target) -> None:
    """Write features then label; ``target`` is a path or an open text stream."""
    if hasattr(target, "write"):
        _write_rows(data, target)
        return
    with open(target, "w", newline="") as fh:
        _write_rows(data, fh)


def _write_rows(data: LabeledDataset, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([*data.columns, "label"])
    for row, label in zip(data.features.tolist(), data.labels.tolist()):
        # repr gives the shortest round-tripping decimal
        writer.writerow([repr(v) for v in row] + [int(label)])


def read_csv(path) -> LabeledDataset:
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != "label":
            raise ValueError(f"{path}: last column must be 'label'")
        rows = [[float(v) for v in row] for row in reader if row]
    arr = np.asarray(rows, dtype=float).reshape(-1, len(header))
    return LabeledDataset(arr[:, :-1], arr[:, -1], tuple(header[:-1]))
