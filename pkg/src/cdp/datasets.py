"""Point clouds, synthetic generators and CSV input/output.

Every generator draws from ``numpy.random.Generator(PCG64(seed))`` in a fixed
order, so a ``DatasetSpec`` maps to bit-identical coordinates on any platform
numpy supports.
"""

from __future__ import annotations

import csv
import inspect
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Callable

import numpy as np

from .errors import CDPError, CSVFormatError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class PointCloud:
    """N points in R^d with an optional plotting parameter and labels."""

    points: np.ndarray
    color: np.ndarray | None = None
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise CDPError(f"points must be an N x d matrix with N, d >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            bad = int(np.argwhere(~np.isfinite(pts))[0, 0])
            raise CDPError(f"point {bad} has a non-finite coordinate")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.color is not None:
            color = np.array(self.color, dtype=float).reshape(-1)
            if color.shape[0] != pts.shape[0]:
                raise CDPError(f"color has length {color.shape[0]}, expected {pts.shape[0]}")
            color.setflags(write=False)
            object.__setattr__(self, "color", color)
        if self.names is not None:
            names = tuple(str(s) for s in self.names)
            if len(names) != pts.shape[0]:
                raise CDPError(f"names has length {len(names)}, expected {pts.shape[0]}")
            object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def label(self, i: int) -> str:
        return self.names[i] if self.names is not None else str(i)

    def subset(self, idx) -> "PointCloud":
        idx = np.asarray(idx, dtype=int)
        return PointCloud(
            self.points[idx],
            None if self.color is None else self.color[idx],
            None if self.names is None else tuple(self.names[i] for i in idx),
        )

    def with_points(self, points) -> "PointCloud":
        """Same color and names, new coordinates (e.g. after standardizing or projecting)."""
        return PointCloud(points, self.color, self.names)


# ---------------------------------------------------------------- generators

def swiss_roll(n, rng, t_min=1.5 * np.pi, t_max=4.5 * np.pi, height=21.0):
    t = t_min + (t_max - t_min) * rng.random(n)
    h = height * rng.random(n)
    return np.column_stack([t * np.cos(t), h, t * np.sin(t)]), t


def torus(n, rng, major_radius=2.0, minor_radius=0.5):
    theta = TWO_PI * rng.random(n)
    phi = TWO_PI * rng.random(n)
    ring = major_radius + minor_radius * np.cos(phi)
    pts = np.column_stack([ring * np.cos(theta), ring * np.sin(theta), minor_radius * np.sin(phi)])
    return pts, theta


def s_curve(n, rng, height=2.0):
    t = 3.0 * np.pi * (rng.random(n) - 0.5)
    y = height * rng.random(n)
    return np.column_stack([np.sin(t), y, np.sign(t) * (np.cos(t) - 1.0)]), t


def helix(n, rng, radius=1.0, rise_per_turn=1.0, turns=3.0, noise=0.0):
    t = TWO_PI * turns * rng.random(n)
    pts = np.column_stack([radius * np.cos(t), radius * np.sin(t), rise_per_turn * t / TWO_PI])
    if noise > 0:
        pts = pts + noise * rng.standard_normal((n, 3))
    return pts, t


def mobius(n, rng, radius=1.0, half_width=0.5):
    u = TWO_PI * rng.random(n)
    v = half_width * (2.0 * rng.random(n) - 1.0)
    ring = radius + v * np.cos(u / 2)
    return np.column_stack([ring * np.cos(u), ring * np.sin(u), v * np.sin(u / 2)]), u


def klein(n, rng, radius=2.0):
    # figure-8 immersion of the Klein bottle
    u = TWO_PI * rng.random(n)
    v = TWO_PI * rng.random(n)
    c, s = np.cos(u / 2), np.sin(u / 2)
    ring = radius + c * np.sin(v) - s * np.sin(2 * v)
    z = s * np.sin(v) + c * np.sin(2 * v)
    return np.column_stack([ring * np.cos(u), ring * np.sin(u), z]), u


def annulus_obstacle_accepts(x, y, r_inner=1.0, r_outer=3.0,
                             obstacle_center=(2.0, 0.0), obstacle_radius=0.8):
    """Rejection predicate of the annulus generator: inside the band, outside the obstacle."""
    rad = np.hypot(x, y)
    clear = np.hypot(x - obstacle_center[0], y - obstacle_center[1]) > obstacle_radius
    return (rad >= r_inner) & (rad <= r_outer) & clear


def annulus_obstacle(n, rng, r_inner=1.0, r_outer=3.0, obstacle_center=(2.0, 0.0),
                     obstacle_radius=0.8, thickness=0.5):
    chunks, angles, have = [], [], 0
    batch = max(2 * n, 64)
    while have < n:
        rad = np.sqrt(r_inner**2 + (r_outer**2 - r_inner**2) * rng.random(batch))
        ang = TWO_PI * rng.random(batch)
        z = thickness * (rng.random(batch) - 0.5)
        x, y = rad * np.cos(ang), rad * np.sin(ang)
        keep = annulus_obstacle_accepts(x, y, r_inner, r_outer, obstacle_center, obstacle_radius)
        chunks.append(np.column_stack([x, y, z])[keep])
        angles.append(ang[keep])
        have += int(keep.sum())
    return np.concatenate(chunks)[:n], np.concatenate(angles)[:n]


TOY5_POINTS = np.array([
    [0.0, 0.0, 0.0],
    [1.0, 0.2, 0.0],
    [2.0, 0.0, 0.0],
    [2.0, 1.0, 0.0],
    [1.0, 0.5, 1.0],
])
TOY5_NAMES = ("A", "B", "C", "D", "E")


def toy5() -> PointCloud:
    return PointCloud(TOY5_POINTS.copy(), names=TOY5_NAMES)


GENERATORS: dict[str, Callable] = {
    "swiss_roll": swiss_roll,
    "torus": torus,
    "s_curve": s_curve,
    "helix": helix,
    "mobius": mobius,
    "klein": klein,
    "annulus_obstacle": annulus_obstacle,
}
KINDS = tuple(GENERATORS) + ("toy5",)


@dataclass(frozen=True)
class DatasetSpec:
    kind: str
    n_points: int = 1000
    seed: int = 0
    params: dict = field(default_factory=dict)


def generator_parameters(kind: str) -> dict:
    """Shape parameters of a generator and their defaults."""
    if kind == "toy5":
        return {}
    sig = inspect.signature(GENERATORS[kind])
    return {name: p.default for name, p in list(sig.parameters.items())[2:]}


def generate(spec: DatasetSpec) -> PointCloud:
    """Build the cloud described by ``spec``; ``color`` carries the generator's manifold parameter."""
    if spec.kind == "toy5":
        return toy5()
    if spec.kind not in GENERATORS:
        raise CDPError(f"unknown dataset kind {spec.kind!r}; expected one of {', '.join(KINDS)}")
    if isinstance(spec.n_points, bool) or not isinstance(spec.n_points, (int, np.integer)) or spec.n_points < 1:
        raise CDPError(f"n_points must be a positive integer, got {spec.n_points!r}")
    if not 0 <= int(spec.seed) < 2**64:
        raise CDPError(f"seed must be a 64-bit unsigned integer, got {spec.seed!r}")
    fn = GENERATORS[spec.kind]
    allowed = list(inspect.signature(fn).parameters)[2:]
    unknown = sorted(set(spec.params) - set(allowed))
    if unknown:
        raise CDPError(f"{spec.kind} has no parameter {unknown[0]!r}; known: {', '.join(allowed)}")
    rng = np.random.Generator(np.random.PCG64(int(spec.seed)))
    pts, color = fn(int(spec.n_points), rng, **spec.params)
    return PointCloud(pts, color)


# ---------------------------------------------------------------------- CSV

def _parse_row(row):
    try:
        return [float(c) for c in row]
    except ValueError:
        return None


def load_csv(path: str | PathLike) -> PointCloud:
    """Read a comma-separated cloud; an optional header row may name a trailing ``color`` column."""
    with open(path, newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if row]
    if not rows:
        raise CSVFormatError(f"{path}: empty file")

    header = None
    if _parse_row(rows[0][1]) is None:
        header = [c.strip().lower() for c in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise CSVFormatError(f"{path}: header but no data rows")

    width = len(header) if header is not None else len(rows[0][1])
    values = []
    for lineno, row in rows:
        if len(row) != width:
            raise CSVFormatError(f"{path}: row {lineno} has {len(row)} columns, expected {width}")
        parsed = _parse_row(row)
        if parsed is None:
            raise CSVFormatError(f"{path}: row {lineno} has a non-numeric cell")
        if not all(math.isfinite(v) for v in parsed):
            raise CSVFormatError(f"{path}: row {lineno} has a non-finite value")
        values.append(parsed)

    data = np.array(values, dtype=float)
    if header is not None and header[-1] == "color":
        if width < 2:
            raise CSVFormatError(f"{path}: a color column needs at least one coordinate column")
        return PointCloud(data[:, :-1], data[:, -1])
    return PointCloud(data)


def write_csv(cloud: PointCloud, fh) -> None:
    """Write ``cloud`` to an open text stream with shortest round-trip float formatting."""
    header = [f"x{a}" for a in range(cloud.d)]
    if cloud.color is not None:
        header.append("color")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for i in range(cloud.n):
        row = [repr(float(v)) for v in cloud.points[i]]
        if cloud.color is not None:
            row.append(repr(float(cloud.color[i])))
        w.writerow(row)


def save_csv(cloud: PointCloud, path: str | PathLike) -> None:
    """Write ``cloud`` to ``path``; ``load_csv`` recovers the coordinates exactly."""
    with open(path, "w", newline="") as fh:
        write_csv(cloud, fh)
