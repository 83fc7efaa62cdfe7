"""Deployment state machine for a growing, passively shape-locking beam.

Only the distal window (spanned by the tip-mount legs) can bend: cable
tension folds the whole window to one curvature, growth everts new material
through it, and material pushed out of the window proximally keeps whatever
curvature it exited with.  Pressure never moves geometry here; it is checked
against each locked bend's separation limit and surfaced as events.

Growth commands are given in everted material length (the outer-wall length
fed through the tip), which advances the centerline by a factor
1/(1 + r|kappa|) while the window is curved.  State bookkeeping (everted_len,
locked primitives, the window) is all in centerline mm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal, Union

import numpy as np

from .errors import DomainError, InvalidDesignError, SessionFinishedError
from .kinematics import (
    CURVATURE_TOL,
    DEFAULT_SAMPLES_PER_MM,
    ORIGIN,
    Arc,
    Line,
    Pose,
    ShapePrimitive,
    StopperSpec,
    arc_length_stations,
    contraction_ratio,
    forward_kinematics,
    min_bend_radius,
    primitive_length,
    turn_sign,
)
from .statics import (
    LOCKED,
    FastenerParams,
    StiffnessParams,
    separation_pressure,
    tip_deflection,
)

Side = Literal["left", "right", "none"]
NO_SIDE: Side = "none"

#: Typical body gauge pressure for these vines, kPa.
DEFAULT_PRESSURE_KPA = 7.0

SEPARATION_RISK = "separation_risk"
MAX_LENGTH_REACHED = "max_length_reached"
TENSION_CAPPED = "tension_capped"


@dataclass(frozen=True)
class DesignParams:
    """Fabrication and model constants for one vine build."""

    beam_radius: float = 54.0
    stoppers: StopperSpec = StopperSpec(19.0, 19.0)
    leg_len: float = 200.0
    fastener: FastenerParams = FastenerParams()
    stiffness: StiffnessParams = StiffnessParams()
    max_length: float = 2300.0

    def __post_init__(self):
        if not self.beam_radius > 0:
            raise InvalidDesignError(f"beam radius must be > 0, got {self.beam_radius}")
        if not self.leg_len > 0:
            raise InvalidDesignError(f"leg length must be > 0, got {self.leg_len}")
        if not self.max_length > self.leg_len:
            raise InvalidDesignError(
                f"available tubing ({self.max_length} mm) must exceed the "
                f"unlocked window ({self.leg_len} mm)"
            )

    @property
    def contraction(self) -> float:
        return contraction_ratio(self.stoppers)

    @property
    def r_min(self) -> float:
        """Tightest achievable bend radius; undefined without contraction."""
        return min_bend_radius(self.beam_radius, self.contraction)

    @property
    def max_curvature(self) -> float:
        """Curvature magnitude at full contraction; 0 for gapless stoppers."""
        if self.contraction == 0:
            return 0.0
        return 1.0 / self.r_min


@dataclass(frozen=True)
class Grow:
    """Evert delta_len mm of material through the tip."""

    delta_len: float

    def __post_init__(self):
        if not self.delta_len > 0:
            raise DomainError(f"growth must be > 0, got {self.delta_len}")


@dataclass(frozen=True)
class SetTension:
    """Pull one steering cable at the given tension; the window refolds."""

    side: Side
    tension: float

    def __post_init__(self):
        if self.side not in ("left", "right", "none"):
            raise DomainError(f"unknown cable side: {self.side!r}")
        if self.tension < 0:
            raise DomainError(f"cable tension must be >= 0, got {self.tension}")


@dataclass(frozen=True)
class SetPressure:
    """Change body gauge pressure and re-check locked bends against it."""

    gauge: float

    def __post_init__(self):
        if not self.gauge > 0:
            raise DomainError(f"gauge pressure must be > 0, got {self.gauge}")


Command = Union[Grow, SetTension, SetPressure]


@dataclass(frozen=True)
class Event:
    kind: str
    at_len: float
    arc_index: int | None = None
    p_min: float | None = None


@dataclass(frozen=True)
class CableTension:
    side: Side = NO_SIDE
    newtons: float = 0.0


@dataclass(frozen=True)
class VineState:
    """Immutable deployment state; ``apply`` returns updated copies."""

    design: DesignParams
    pressure: float
    everted_len: float = 0.0
    material_used: float = 0.0
    locked: tuple[ShapePrimitive, ...] = ()
    unlocked_len: float = 0.0
    unlocked_curvature: float = 0.0
    tension: CableTension = CableTension()
    events: tuple[Event, ...] = ()
    finished: bool = False

    @property
    def locked_len(self) -> float:
        return float(sum(primitive_length(p) for p in self.locked))


@dataclass(frozen=True)
class Snapshot:
    shape: tuple[ShapePrimitive, ...]
    centerline: np.ndarray
    lock_boundary_index: int


def new_session(design: DesignParams, pressure: float) -> VineState:
    """Fresh zero-length deployment at the given body pressure."""
    if not isinstance(design, DesignParams):
        raise InvalidDesignError(f"expected DesignParams, got {type(design).__name__}")
    if not pressure > 0:
        raise DomainError(f"gauge pressure must be > 0, got {pressure}")
    return VineState(design=design, pressure=pressure)


def _window_primitive(state: VineState) -> ShapePrimitive | None:
    if state.unlocked_len <= 0:
        return None
    kappa = state.unlocked_curvature
    if abs(kappa) < CURVATURE_TOL:
        return Line(state.unlocked_len)
    radius = 1.0 / abs(kappa)
    turn = "left" if kappa > 0 else "right"
    return Arc(radius, state.unlocked_len * abs(kappa), turn)


def _split_angle(angle: float) -> list[float]:
    """Split an arc angle into equal chunks below a full turn."""
    limit = math.tau - 1e-9
    if angle < limit:
        return [angle]
    n = int(math.floor(angle / limit)) + 1
    chunk = angle / n
    parts = [chunk] * (n - 1)
    parts.append(angle - chunk * (n - 1))
    return parts


def _append_locked(
    locked: tuple[ShapePrimitive, ...], exit_len: float, kappa: float
) -> tuple[ShapePrimitive, ...]:
    """Lock exit_len mm of centerline at signed curvature kappa."""
    if exit_len <= 0:
        return locked
    out = list(locked)
    straight = abs(kappa) < CURVATURE_TOL
    if out:
        last = out[-1]
        if straight and isinstance(last, Line):
            out[-1] = Line(last.length + exit_len)
            return tuple(out)
        if not straight and isinstance(last, Arc):
            same = abs(last.curvature - kappa) <= CURVATURE_TOL
            merged_angle = last.angle + exit_len / last.radius
            if same and merged_angle < math.tau - 1e-9:
                out[-1] = Arc(last.radius, merged_angle, last.turn)
                return tuple(out)
    if straight:
        out.append(Line(exit_len))
    else:
        radius = 1.0 / abs(kappa)
        turn = "left" if kappa > 0 else "right"
        for part in _split_angle(exit_len * abs(kappa)):
            out.append(Arc(radius, part, turn))
    return tuple(out)


def _disturb_locked(
    locked: tuple[ShapePrimitive, ...], side: Side, deflection_rad: float
) -> tuple[ShapePrimitive, ...]:
    """Relax the most distal locked arc opposing the pulled side.

    The disturbed bend keeps its centerline length: its angle shrinks and its
    radius grows to match; a bend disturbed past straight becomes a line.
    """
    if deflection_rad <= 0 or side == NO_SIDE:
        return locked
    opposing = "right" if side == "left" else "left"
    for i in range(len(locked) - 1, -1, -1):
        prim = locked[i]
        if isinstance(prim, Arc) and prim.turn == opposing:
            length = prim.radius * prim.angle
            new_angle = prim.angle - deflection_rad
            out = list(locked)
            if new_angle <= 1e-12:
                out[i] = Line(length)
            else:
                out[i] = Arc(length / new_angle, new_angle, prim.turn)
            return tuple(out)
    return locked


def check_separation(state: VineState) -> list[Event]:
    """Locked arcs whose separation pressure is below the body pressure.

    A bend at or past a half fold has no holding margin at any pressure and
    is reported with p_min 0.
    """
    events = []
    fastener = state.design.fastener
    r = state.design.beam_radius
    for i, prim in enumerate(state.locked):
        if not isinstance(prim, Arc):
            continue
        if prim.angle >= math.pi:
            p_min = 0.0
        else:
            p_min = separation_pressure(prim.angle, r, fastener)
        if p_min < state.pressure:
            events.append(
                Event(SEPARATION_RISK, at_len=state.everted_len, arc_index=i, p_min=p_min)
            )
    return events


def _apply_grow(state: VineState, cmd: Grow, events: list[Event]) -> VineState:
    design = state.design
    remaining = design.max_length - state.material_used
    delta_material = min(cmd.delta_len, remaining)
    kappa = state.unlocked_curvature
    advance = delta_material / (1.0 + design.beam_radius * abs(kappa))
    everted = state.everted_len + advance
    window = min(everted, design.leg_len)
    exit_len = state.unlocked_len + advance - window
    locked = _append_locked(state.locked, exit_len, kappa)
    material_used = state.material_used + delta_material
    finished = state.finished
    if material_used >= design.max_length - 1e-9:
        material_used = design.max_length
        events.append(Event(MAX_LENGTH_REACHED, at_len=everted))
        finished = True
    return replace(
        state,
        everted_len=everted,
        material_used=material_used,
        locked=locked,
        unlocked_len=window,
        finished=finished,
    )


def _apply_tension(
    state: VineState, cmd: SetTension, events: list[Event], disturbance: bool
) -> VineState:
    design = state.design
    t_full = design.stiffness.t_full
    tension = cmd.tension
    if tension > t_full:
        tension = t_full
        events.append(Event(TENSION_CAPPED, at_len=state.everted_len))
    if cmd.side == NO_SIDE:
        kappa = 0.0
    else:
        kappa = turn_sign(cmd.side) * (tension / t_full) * design.max_curvature
    locked = state.locked
    if disturbance and tension > 0:
        deflection_deg = tip_deflection(tension, LOCKED, design.stiffness)
        locked = _disturb_locked(locked, cmd.side, math.radians(deflection_deg))
    return replace(
        state,
        unlocked_curvature=kappa,
        tension=CableTension(side=cmd.side, newtons=tension),
        locked=locked,
    )


def apply(
    state: VineState, cmd: Command, disturbance: bool = False
) -> tuple[VineState, list[Event]]:
    """Apply one command, returning the next state and newly emitted events.

    The returned state also carries the new events appended to its log.
    Raises once the session has consumed all tubing.
    """
    if state.finished:
        raise SessionFinishedError("session is finished: all tubing everted")
    events: list[Event] = []
    if isinstance(cmd, Grow):
        state = _apply_grow(state, cmd, events)
    elif isinstance(cmd, SetTension):
        state = _apply_tension(state, cmd, events, disturbance)
    elif isinstance(cmd, SetPressure):
        state = replace(state, pressure=cmd.gauge)
        events.extend(check_separation(state))
    else:
        raise DomainError(f"unknown command: {cmd!r}")
    if events:
        state = replace(state, events=state.events + tuple(events))
    return state, events


def snapshot(
    state: VineState,
    base: Pose = ORIGIN,
    samples_per_mm: float = DEFAULT_SAMPLES_PER_MM,
) -> Snapshot:
    """Full body shape from the base: locked primitives plus the window.

    ``lock_boundary_index`` counts centerline points on the locked region, so
    ``centerline[:lock_boundary_index]`` is locked and the rest is the window.
    """
    shape = list(state.locked)
    window = _window_primitive(state)
    if window is not None:
        shape.append(window)
    centerline = forward_kinematics(shape, base, samples_per_mm)
    locked_len = state.locked_len
    total = float(sum(primitive_length(p) for p in shape))
    if total <= 0:
        boundary = len(centerline)
    else:
        stations = arc_length_stations(total, samples_per_mm)
        boundary = int(np.searchsorted(stations, locked_len + 1e-9))
    return Snapshot(
        shape=tuple(shape), centerline=centerline, lock_boundary_index=boundary
    )
