"""Command scheduling and arc-line fitting for target shapes.

``plan_from_shape`` turns a feasible arc-line shape into a tension/grow
schedule whose simulated rollout reproduces the shape exactly.  The schedule
compensates for the unlocked window: the first grow overfills by one window
length so locking starts at the right place, and the final primitive ends as
window content instead of being grown out.

``fit_shape`` inverts the composition: it segments waypoints by dynamic
programming over per-segment line/arc fit costs, chains the segments into a
tangent-continuous arc spline, and refines the spline against the waypoints
with a damped Gauss-Newton polish under the curvature bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    InfeasibleCurvatureError,
    InfeasibleShapeError,
    LengthBudgetError,
    UnreachableToleranceError,
)
from .kinematics import (
    CURVATURE_TOL,
    DEFAULT_SAMPLES_PER_MM,
    ORIGIN,
    Arc,
    Line,
    Pose,
    ShapePrimitive,
    as_polyline,
    forward_kinematics,
    mean_config_error,
    primitive_length,
    resample_evenly,
)
from .lsq import solve_least_squares
from .simulation import (
    DEFAULT_PRESSURE_KPA,
    DesignParams,
    Command,
    Grow,
    SetTension,
    apply,
    new_session,
    snapshot,
)
from .statics import separation_pressure

#: Most primitives a single fit will consider.
DEFAULT_PRIMITIVE_BUDGET = 32

_EVAL_POINTS = 100


@dataclass(frozen=True)
class Plan:
    """A command schedule plus the shape it deploys."""

    steps: tuple[Command, ...]
    predicted_shape: tuple[ShapePrimitive, ...]
    total_growth: float
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class FitReport:
    """Arc-line fit of a waypoint polyline."""

    shape: tuple[ShapePrimitive, ...]
    residual: float
    primitive_count: int
    base: Pose


def _check_curvature(shape: Sequence[ShapePrimitive], design: DesignParams, binary: bool):
    for i, prim in enumerate(shape):
        if not isinstance(prim, (Line, Arc)):
            raise DomainError(f"shape[{i}] is not a Line or Arc: {prim!r}")
        if not isinstance(prim, Arc):
            continue
        if design.max_curvature == 0.0:
            raise InfeasibleCurvatureError(
                i, f"shape[{i}]: design has no contraction, arcs are impossible"
            )
        r_min = design.r_min
        if prim.radius < r_min - 1e-9:
            raise InfeasibleCurvatureError(
                i,
                f"shape[{i}]: radius {prim.radius:.3f} mm is below the "
                f"{r_min:.3f} mm minimum bend radius",
            )
        if binary and abs(prim.radius - r_min) > 1e-9:
            raise InfeasibleCurvatureError(
                i,
                f"shape[{i}]: binary tension only deploys radius "
                f"{r_min:.3f} mm, got {prim.radius:.3f} mm",
            )


def plan_from_shape(
    shape: Sequence[ShapePrimitive],
    design: DesignParams,
    pressure: float = DEFAULT_PRESSURE_KPA,
    tension_mode: str = "proportional",
) -> Plan:
    """Schedule tension and growth commands that deploy the given shape.

    Proportional mode scales tension with curvature; binary mode only allows
    arcs at the minimum bend radius and always pulls at full tension.  Raises
    when a primitive bends too tightly, when the final primitive is shorter
    than the unlocked window (the window locks at a single curvature, so it
    must end inside the last primitive), or when the material budget runs out.
    """
    if tension_mode not in ("proportional", "binary"):
        raise DomainError(f"unknown tension mode: {tension_mode!r}")
    shape = tuple(shape)
    _check_curvature(shape, design, binary=tension_mode == "binary")
    if not shape:
        return Plan(steps=(), predicted_shape=(), total_growth=0.0)

    leg = design.leg_len
    lengths = [primitive_length(p) for p in shape]
    n = len(shape)
    if n >= 2 and lengths[-1] < leg - 1e-9:
        raise InfeasibleShapeError(
            f"final primitive is {lengths[-1]:.3f} mm of centerline but the "
            f"unlocked window holds {leg:.3f} mm; it would refold part of the "
            "previous primitive"
        )

    t_full = design.stiffness.t_full
    steps: list[Command] = []
    total = 0.0
    warnings: list[str] = []
    for i, prim in enumerate(shape):
        if isinstance(prim, Arc):
            if tension_mode == "binary":
                tension = t_full
            else:
                tension = t_full * design.r_min / prim.radius
            steps.append(SetTension(prim.turn, tension))
            material_per_mm = 1.0 + design.beam_radius / prim.radius
            if prim.angle >= math.pi:
                p_min = 0.0
            else:
                p_min = separation_pressure(prim.angle, design.beam_radius, design.fastener)
            if p_min < pressure:
                warnings.append(
                    f"shape[{i}]: bend of {prim.angle:.3f} rad separates at "
                    f"{p_min:.3f} kPa, below the {pressure:.3f} kPa body pressure"
                )
        else:
            steps.append(SetTension("none", 0.0))
            material_per_mm = 1.0
        advance = lengths[i]
        if n >= 2 and i == 0:
            advance += leg
        if n >= 2 and i == n - 1:
            advance -= leg
        if advance > 1e-9:
            growth = advance * material_per_mm
            steps.append(Grow(growth))
            total += growth
    if total > design.max_length + 1e-9:
        raise LengthBudgetError(
            f"plan needs {total:.1f} mm of material but only "
            f"{design.max_length:.1f} mm of tubing is available"
        )
    return Plan(
        steps=tuple(steps),
        predicted_shape=shape,
        total_growth=total,
        warnings=tuple(warnings),
    )


def predict(
    plan: Plan,
    design: DesignParams,
    base: Pose = ORIGIN,
    samples_per_mm: float = DEFAULT_SAMPLES_PER_MM,
) -> np.ndarray:
    """Centerline the plan deploys: a pure kinematic rollout, disturbance off."""
    state = new_session(design, DEFAULT_PRESSURE_KPA)
    for cmd in plan.steps:
        state, _ = apply(state, cmd, disturbance=False)
    return snapshot(state, base, samples_per_mm).centerline


def _prefix(a: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(a)])


def _segment_costs(points: np.ndarray, min_radius: float | None):
    """Line and feasible-arc fit costs for every waypoint index pair.

    Returns (cost, use_arc): cost[i, j] is the squared-distance cost of
    covering points i..j with one primitive; use_arc marks where a circle fit
    beats the total-least-squares line.  Entries with j <= i are infinite.
    """
    centered = points - points.mean(axis=0)
    x = centered[:, 0]
    y = centered[:, 1]
    z = x * x + y * y
    px, py = _prefix(x), _prefix(y)
    pxx, pyy, pxy = _prefix(x * x), _prefix(y * y), _prefix(x * y)
    pz, pzx, pzy, pzz = _prefix(z), _prefix(z * x), _prefix(z * y), _prefix(z * z)
    n = len(points)
    idx_i = np.arange(n)[:, None]
    idx_j = np.arange(n)[None, :]

    def seg(p):
        return p[idx_j + 1] - p[idx_i]

    m = (idx_j - idx_i + 1).astype(float)
    with np.errstate(all="ignore"):
        sx, sy = seg(px), seg(py)
        sxx, syy, sxy = seg(pxx), seg(pyy), seg(pxy)
        sz, szx, szy, szz = seg(pz), seg(pzx), seg(pzy), seg(pzz)
        cxx = sxx - sx * sx / m
        cyy = syy - sy * sy / m
        cxy = sxy - sx * sy / m
        disc = np.sqrt(np.maximum((cxx - cyy) ** 2 + 4.0 * cxy * cxy, 0.0))
        line_cost = np.maximum(0.5 * ((cxx + cyy) - disc), 0.0)

        # Algebraic circle fit: minimize sum (z + D x + E y + F)^2 over the
        # segment, solved through the symmetric 3x3 normal equations.
        a, b, c = sxx, sxy, sx
        d, e, f = syy, sy, m
        det = a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c)
        i11 = d * f - e * e
        i12 = c * e - b * f
        i13 = b * e - c * d
        i22 = a * f - c * c
        i23 = b * c - a * e
        i33 = a * d - b * b
        b1, b2, b3 = -szx, -szy, -sz
        big_d = (i11 * b1 + i12 * b2 + i13 * b3) / det
        big_e = (i12 * b1 + i22 * b2 + i23 * b3) / det
        big_f = (i13 * b1 + i23 * b2 + i33 * b3) / det
        r_sq = 0.25 * (big_d * big_d + big_e * big_e) - big_f
        alg = (
            szz
            + big_d * big_d * sxx
            + big_e * big_e * syy
            + big_f * big_f * m
            + 2.0 * (big_d * szx + big_e * szy + big_f * sz)
            + 2.0 * (big_d * big_e * sxy + big_d * big_f * sx + big_e * big_f * sy)
        )
        arc_cost = np.maximum(alg, 0.0) / (4.0 * r_sq)
        if min_radius is None:
            arc_ok = np.zeros_like(arc_cost, dtype=bool)
        else:
            arc_ok = (
                np.isfinite(arc_cost)
                & (r_sq >= (min_radius - 1e-9) ** 2)
                & (m >= 3)
            )
        arc_cost = np.where(arc_ok, arc_cost, np.inf)

    use_arc = arc_cost < line_cost * (1.0 - 1e-9) - 1e-12
    cost = np.where(use_arc, arc_cost, line_cost)
    cost[idx_j <= idx_i] = np.inf
    return cost, use_arc


def _dp_breakpoints(cost: np.ndarray, k: int) -> list[int] | None:
    """Best k-segment split of points 0..n-1; segments share breakpoints."""
    n = cost.shape[0]
    if k > n - 1:
        return None
    best = cost[0].copy()
    parents = []
    for _ in range(1, k):
        stacked = best[:, None] + cost
        parent = np.argmin(stacked, axis=0)
        best = stacked[parent, np.arange(n)]
        parents.append(parent)
    if not np.isfinite(best[n - 1]):
        return None
    breaks = [n - 1]
    j = n - 1
    for parent in reversed(parents):
        j = int(parent[j])
        breaks.append(j)
    breaks.append(0)
    breaks = sorted(set(breaks))
    if len(breaks) != k + 1:
        return None
    return breaks


def _kink_breakpoints(points: np.ndarray, k: int) -> list[int] | None:
    """Segmentation that isolates sharp turns inside short segments.

    The cost-based split can land a kink exactly on a breakpoint, where its
    turn belongs to no segment and the seeded chain comes out straight.  This
    builds an alternative split that brackets each kink one waypoint to
    either side, so the turn is interior to a segment and seeds a tight arc.
    """
    n = len(points)
    if k + 1 > n:
        return None
    diffs = np.diff(points, axis=0)
    headings = np.arctan2(diffs[:, 1], diffs[:, 0])
    turn = np.abs((np.diff(headings) + math.pi) % math.tau - math.pi)
    if turn.size < 3:
        return None
    # A kink turns much harder than its neighbours; smooth arcs turn evenly.
    neighbor = np.maximum(np.roll(turn, 1), np.roll(turn, -1))
    neighbor[0] = turn[1]
    neighbor[-1] = turn[-2]
    score = turn - neighbor
    kinks = [i + 1 for i in np.argsort(-score) if score[i] > 0.08]
    if not kinks:
        return None
    bounds = {0, n - 1}
    for kink in kinks:
        add = {max(kink - 1, 0), min(kink + 1, n - 1)} - bounds
        if len(bounds) + len(add) <= k + 1:
            bounds.update(add)
    out = sorted(bounds)
    while len(out) < k + 1:
        gaps = np.diff(out)
        widest = int(np.argmax(gaps))
        if gaps[widest] < 2:
            return None
        out.insert(widest + 1, (out[widest] + out[widest + 1]) // 2)
    if len(out) != k + 1:
        return None
    return out


def _chain_init(points: np.ndarray, breaks: list[int]):
    """Tangent-continuous arc-spline seed from a waypoint segmentation.

    Per segment, length is the chord sum and curvature is the summed tangent
    turn divided by length, which is exact for points sampled from one arc.
    """
    diffs = np.diff(points, axis=0)
    chord = np.linalg.norm(diffs, axis=1)
    headings = np.arctan2(diffs[:, 1], diffs[:, 0])
    turn = np.zeros(len(points))
    raw = np.diff(headings)
    turn[1:-1] = (raw + math.pi) % math.tau - math.pi
    chord_prefix = _prefix(chord)
    turn_prefix = _prefix(turn)
    psi0 = float(headings[0])
    kappas = []
    lengths = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        length = max(float(chord_prefix[b] - chord_prefix[a]), 1e-6)
        total_turn = float(turn_prefix[b] - turn_prefix[a + 1])
        lengths.append(length)
        kappas.append(total_turn / length)
    return psi0, np.array(kappas), np.array(lengths)


def _sample_chain(x0, y0, psi0, kappas, lengths, stations):
    pts = np.empty((stations.size, 2))
    bounds = _prefix(lengths)
    idx = np.clip(np.searchsorted(bounds, stations, side="right") - 1, 0, len(lengths) - 1)
    x, y, h = x0, y0, psi0
    for s in range(len(lengths)):
        mask = idx == s
        if mask.any():
            ds = stations[mask] - bounds[s]
            k = kappas[s]
            if abs(k) < 1e-12:
                pts[mask, 0] = x + ds * math.cos(h)
                pts[mask, 1] = y + ds * math.sin(h)
            else:
                pts[mask, 0] = x + (np.sin(h + k * ds) - math.sin(h)) / k
                pts[mask, 1] = y - (np.cos(h + k * ds) - math.cos(h)) / k
        length = lengths[s]
        k = kappas[s]
        if abs(k) < 1e-12:
            x += length * math.cos(h)
            y += length * math.sin(h)
        else:
            x += (math.sin(h + k * length) - math.sin(h)) / k
            y -= (math.cos(h + k * length) - math.cos(h)) / k
            h += k * length
    return pts


def _chain_to_shape(kappas, lengths, design: DesignParams) -> tuple[ShapePrimitive, ...]:
    prims: list[ShapePrimitive] = []
    for k, length in zip(kappas, lengths):
        if length < 1e-9:
            continue
        if abs(k) < CURVATURE_TOL:
            if prims and isinstance(prims[-1], Line):
                prims[-1] = Line(prims[-1].length + length)
            else:
                prims.append(Line(length))
            continue
        radius = max(1.0 / abs(k), design.r_min)
        turn = "left" if k > 0 else "right"
        angle = length / radius
        if (
            prims
            and isinstance(prims[-1], Arc)
            and prims[-1].turn == turn
            and abs(1.0 / prims[-1].radius - 1.0 / radius) <= CURVATURE_TOL
            and prims[-1].angle + angle < math.tau - 1e-9
        ):
            prims[-1] = Arc(prims[-1].radius, prims[-1].angle + angle, turn)
            continue
        while angle >= math.tau - 1e-9:
            prims.append(Arc(radius, 0.5 * (math.tau - 1e-9), turn))
            angle -= 0.5 * (math.tau - 1e-9)
        if angle > 1e-12:
            prims.append(Arc(radius, angle, turn))
    return tuple(prims)


def _fit_candidate(points, target, breaks, design, tol):
    """Chain one segmentation and polish it against the target waypoints."""
    psi0, kappas, lengths = _chain_init(points, breaks)
    base_xy = points[0]
    k_max = design.max_curvature
    n_seg = len(lengths)
    eval_target = resample_evenly(target, _EVAL_POINTS)

    frozen = np.zeros(n_seg, dtype=bool)

    def unpack(x):
        psi = x[0]
        ks = np.clip(x[1 : 1 + n_seg], -k_max, k_max)
        ks[frozen] = 0.0
        ls = np.maximum(x[1 + n_seg :], 1e-6)
        return psi, ks, ls

    def model_points(x):
        psi, ks, ls = unpack(x)
        stations = np.linspace(0.0, float(np.sum(ls)), _EVAL_POINTS)
        return _sample_chain(base_xy[0], base_xy[1], psi, ks, ls, stations)

    def residuals(x):
        return (model_points(x) - eval_target).ravel()

    def build(x):
        psi, ks, ls = unpack(x)
        built = _chain_to_shape(ks, ls, design)
        pose = Pose(float(base_xy[0]), float(base_xy[1]), psi)
        if not built:
            return built, math.inf, pose
        err = mean_config_error(forward_kinematics(built, pose), target, _EVAL_POINTS)
        return built, err, pose

    cost_floor = _EVAL_POINTS * (0.2 * tol) ** 2
    x0 = np.concatenate([[psi0], np.clip(kappas, -k_max, k_max), lengths])
    init_cost = float(residuals(x0) @ residuals(x0))
    init_mean = math.sqrt(init_cost / _EVAL_POINTS)
    if init_mean > 0.7 * tol:
        result = solve_least_squares(residuals, x0, max_iter=40, cost_tol=cost_floor)
        x0 = result.x
    shape, residual, base = build(x0)
    if not shape:
        return None
    if residual > tol:
        return FitReport(
            shape=shape, residual=residual, primitive_count=len(shape), base=base
        )
    # Prefer straight segments: drop leftover micro-curvature from the polish
    # whenever staying straight costs nothing against the tolerance.  Other
    # parameters often lean on a slight bow, so re-polish with it frozen.
    _, ks, ls = unpack(x0)
    for i in np.argsort(np.abs(ks) * ls):
        if abs(ks[i]) < CURVATURE_TOL or abs(ks[i]) * ls[i] >= 0.15:
            continue
        frozen[i] = True
        trial = x0.copy()
        trial[1 + i] = 0.0
        built, err, pose = build(trial)
        if not built or err > residual + 0.02 * tol:
            refit = solve_least_squares(residuals, trial, max_iter=60)
            trial = refit.x
            built, err, pose = build(trial)
        if built and err <= min(residual + 0.1 * tol, max(residual, 0.98 * tol)):
            x0 = trial
            shape, residual, base = built, err, pose
            _, ks, ls = unpack(x0)
        else:
            frozen[i] = False
    if not shape:
        return None
    return FitReport(
        shape=shape, residual=residual, primitive_count=len(shape), base=base
    )


def fit_shape(
    waypoints,
    design: DesignParams,
    tol: float,
    max_primitives: int = DEFAULT_PRIMITIVE_BUDGET,
) -> FitReport:
    """Fit an arc-line shape to waypoints within a mean-distance tolerance.

    Tries segmentations of increasing size, so the returned shape has the
    fewest primitives among the candidates that met the tolerance.  Raises
    with the best report attached when the budget is exhausted.
    """
    if not tol > 0:
        raise DomainError(f"tolerance must be > 0, got {tol}")
    if max_primitives < 1:
        raise DomainError(f"primitive budget must be >= 1, got {max_primitives}")
    target = as_polyline(waypoints)
    if len(target) > 150:
        work = resample_evenly(target, 150)
    elif len(target) < 30:
        work = resample_evenly(target, 60)
    else:
        work = target
    min_radius = None if design.max_curvature == 0.0 else design.r_min
    cost, _ = _segment_costs(work, min_radius)
    best: FitReport | None = None
    for k in range(1, max_primitives + 1):
        splits = [_dp_breakpoints(cost, k)]
        if splits[0] is None:
            break
        kink = _kink_breakpoints(work, k)
        if kink is not None and kink != splits[0]:
            splits.append(kink)
        round_best: FitReport | None = None
        for breaks in splits:
            report = _fit_candidate(work, target, breaks, design, tol)
            if report is None:
                continue
            if round_best is None or report.residual < round_best.residual:
                round_best = report
        if round_best is None:
            continue
        if best is None or round_best.residual < best.residual:
            best = round_best
        if round_best.residual <= tol:
            return round_best
    detail = f"best residual {best.residual:.3f} mm" if best else "no candidate found"
    raise UnreachableToleranceError(
        f"no arc-line fit within {tol} mm over {max_primitives} primitives: {detail}",
        best_report=best,
    )
