"""Planar arc-line kinematics for cable-steered growing inflated beams.

Geometry convention: x/y in millimetres, headings in radians measured
counter-clockwise from +x, "left" turns increase the heading.  Polylines are
plain (N, 2) float arrays; a shape is a sequence of Line/Arc primitives laid
out tip-ward from a base pose.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence, Union

import numpy as np

from .errors import DomainError

Turn = Literal["left", "right"]
LEFT: Turn = "left"
RIGHT: Turn = "right"

#: Default centerline sampling density: one point per 5 mm.
DEFAULT_SAMPLES_PER_MM = 0.2

#: Curvatures closer than this (1/mm) are treated as identical.
CURVATURE_TOL = 1e-9


def normalize_angle(angle: float) -> float:
    """Map an angle to the half-open interval (-pi, pi]."""
    r = math.remainder(angle, math.tau)
    if r <= -math.pi:
        r += math.tau
    return r


def turn_sign(turn: Turn) -> int:
    if turn == LEFT:
        return 1
    if turn == RIGHT:
        return -1
    raise DomainError(f"unknown turn direction: {turn!r}")


@dataclass(frozen=True)
class StopperSpec:
    """Cable-stopper geometry: segment length and inter-stopper gap, mm."""

    stopper_len: float
    gap_len: float

    def __post_init__(self):
        if self.stopper_len < 0 or self.gap_len < 0:
            raise DomainError("stopper and gap lengths must be non-negative")
        if self.stopper_len == 0 and self.gap_len == 0:
            raise DomainError("stopper spec is degenerate: both lengths zero")


@dataclass(frozen=True)
class Line:
    """Straight centerline segment of positive length (mm)."""

    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise DomainError(f"line length must be > 0, got {self.length}")


@dataclass(frozen=True)
class Arc:
    """Constant-curvature segment: radius (mm), subtended angle (rad), turn."""

    radius: float
    angle: float
    turn: Turn

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"arc radius must be > 0, got {self.radius}")
        if not 0 < self.angle < math.tau:
            raise DomainError(f"arc angle must be in (0, 2*pi), got {self.angle}")
        turn_sign(self.turn)

    @property
    def curvature(self) -> float:
        """Signed curvature, 1/mm; positive turns left."""
        return turn_sign(self.turn) / self.radius


ShapePrimitive = Union[Line, Arc]


@dataclass(frozen=True)
class Pose:
    """Planar pose: position in mm, heading normalized to (-pi, pi]."""

    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(self.heading))


ORIGIN = Pose(0.0, 0.0, 0.0)


def primitive_length(prim: ShapePrimitive) -> float:
    """Centerline length of a primitive, mm (an arc contributes R*theta)."""
    if isinstance(prim, Line):
        return prim.length
    return prim.radius * prim.angle


def shape_length(shape: Iterable[ShapePrimitive]) -> float:
    return float(sum(primitive_length(p) for p in shape))


def contraction_ratio(stoppers: StopperSpec) -> float:
    """Fraction of one side's length removable by closing all stopper gaps."""
    return stoppers.gap_len / (stoppers.stopper_len + stoppers.gap_len)


def min_bend_radius(beam_radius: float, ratio: float) -> float:
    """Tightest centerline bend radius achievable at a contraction ratio."""
    if not beam_radius > 0:
        raise DomainError(f"beam radius must be > 0, got {beam_radius}")
    if not 0 < ratio <= 1:
        raise DomainError(f"contraction ratio must be in (0, 1], got {ratio}")
    return beam_radius * (2.0 - ratio) / ratio


def bend_angle_from_lengths(outer_len: float, inner_len: float, beam_radius: float) -> float:
    """Bend angle from outer/inner wall arc lengths of a bent beam."""
    if not beam_radius > 0:
        raise DomainError(f"beam radius must be > 0, got {beam_radius}")
    if inner_len < 0:
        raise DomainError(f"inner wall length must be >= 0, got {inner_len}")
    if outer_len <= inner_len:
        raise DomainError(
            f"outer wall ({outer_len} mm) must exceed inner wall ({inner_len} mm)"
        )
    return (outer_len - inner_len) / (2.0 * beam_radius)


def growth_for_bend(bend_radius: float, beam_radius: float, theta: float) -> float:
    """Outer-wall length to evert, under held tension, for a bend of angle theta."""
    if not beam_radius > 0:
        raise DomainError(f"beam radius must be > 0, got {beam_radius}")
    if bend_radius < beam_radius:
        raise DomainError(
            f"bend radius {bend_radius} mm is tighter than the beam radius {beam_radius} mm"
        )
    if not theta > 0:
        raise DomainError(f"bend angle must be > 0, got {theta}")
    return (bend_radius + beam_radius) * theta


def arc_length_stations(total: float, samples_per_mm: float) -> np.ndarray:
    """Arc-length sample stations 0..total at fixed spacing, endpoint included.

    Stations depend only on the total length, never on how a curve is split
    into primitives, so two decompositions of one curve sample identically.
    """
    if not samples_per_mm > 0:
        raise DomainError(f"sampling density must be > 0, got {samples_per_mm}")
    if total <= 0:
        return np.zeros(1)
    step = 1.0 / samples_per_mm
    n = int(math.floor(total / step + 1e-12))
    stations = np.arange(n + 1, dtype=float) * step
    if total - stations[-1] > 1e-9 * max(1.0, total):
        stations = np.append(stations, total)
    else:
        stations[-1] = total
    return stations


def _pose_after(pose: Pose, prim: ShapePrimitive) -> Pose:
    if isinstance(prim, Line):
        return Pose(
            pose.x + prim.length * math.cos(pose.heading),
            pose.y + prim.length * math.sin(pose.heading),
            pose.heading,
        )
    sign = turn_sign(prim.turn)
    kappa = sign / prim.radius
    h1 = pose.heading + sign * prim.angle
    return Pose(
        pose.x + (math.sin(h1) - math.sin(pose.heading)) / kappa,
        pose.y - (math.cos(h1) - math.cos(pose.heading)) / kappa,
        h1,
    )


def _points_along(pose: Pose, prim: ShapePrimitive, s: np.ndarray) -> np.ndarray:
    """Points at arc lengths ``s`` into a primitive starting at ``pose``."""
    pts = np.empty((s.size, 2))
    if isinstance(prim, Line):
        pts[:, 0] = pose.x + s * math.cos(pose.heading)
        pts[:, 1] = pose.y + s * math.sin(pose.heading)
        return pts
    kappa = turn_sign(prim.turn) / prim.radius
    h = pose.heading + kappa * s
    pts[:, 0] = pose.x + (np.sin(h) - math.sin(pose.heading)) / kappa
    pts[:, 1] = pose.y - (np.cos(h) - math.cos(pose.heading)) / kappa
    return pts


def end_pose(shape: Sequence[ShapePrimitive], base: Pose = ORIGIN) -> Pose:
    """Pose at the tip of a shape grown from ``base``."""
    pose = base
    for prim in shape:
        pose = _pose_after(pose, prim)
    return pose


def forward_kinematics(
    shape: Sequence[ShapePrimitive],
    base: Pose = ORIGIN,
    samples_per_mm: float = DEFAULT_SAMPLES_PER_MM,
) -> np.ndarray:
    """Sample the centerline of a shape into an (N, 2) polyline.

    The polyline starts exactly at ``base`` and ends exactly at the closed-form
    tip position; interior points sit at fixed global arc-length stations.
    A zero-length shape yields a single point.
    """
    lengths = [primitive_length(p) for p in shape]
    total = float(sum(lengths))
    if not shape or total <= 0:
        if samples_per_mm <= 0:
            raise DomainError(f"sampling density must be > 0, got {samples_per_mm}")
        return np.array([[base.x, base.y]])
    stations = arc_length_stations(total, samples_per_mm)
    bounds = np.cumsum(lengths)
    idx = np.minimum(
        np.searchsorted(bounds, stations, side="left"), len(shape) - 1
    )
    pts = np.empty((stations.size, 2))
    pose = base
    start = 0.0
    for k, prim in enumerate(shape):
        mask = idx == k
        if mask.any():
            pts[mask] = _points_along(pose, prim, stations[mask] - start)
        pose = _pose_after(pose, prim)
        start = bounds[k]
    return pts


def as_polyline(points) -> np.ndarray:
    """Validate and normalize points into an (N>=2, 2) float array.

    Consecutive duplicate points are dropped.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2:
        raise DomainError(f"polyline must be an (N, 2) array, got shape {p.shape}")
    if not np.isfinite(p).all():
        raise DomainError("polyline contains non-finite coordinates")
    if len(p) > 1:
        keep = np.ones(len(p), dtype=bool)
        keep[1:] = (np.diff(p, axis=0) != 0).any(axis=1)
        p = p[keep]
    if len(p) < 2:
        raise DomainError("polyline needs at least 2 distinct points")
    return p


def polyline_length(points: np.ndarray) -> float:
    p = np.asarray(points, dtype=float)
    if len(p) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1)))


def resample_evenly(points, n: int) -> np.ndarray:
    """Resample a polyline to ``n`` points at equal chordal arc-length spacing."""
    if n < 2:
        raise DomainError(f"resampling needs n >= 2, got {n}")
    p = as_polyline(points)
    seg = np.linalg.norm(np.diff(p, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    target = np.linspace(0.0, cum[-1], n)
    out = np.column_stack(
        [np.interp(target, cum, p[:, 0]), np.interp(target, cum, p[:, 1])]
    )
    out[0] = p[0]
    out[-1] = p[-1]
    return out


def mean_config_error(deployed, desired, n: int = 100) -> float:
    """Mean distance between index-paired, evenly resampled centerline points."""
    a = resample_evenly(deployed, n)
    b = resample_evenly(desired, n)
    return float(np.mean(np.linalg.norm(a - b, axis=1)))
