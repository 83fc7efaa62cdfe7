"""File formats: JSON documents, CSV tables, and their validation.

Structured artifacts (designs, plans, scenarios, waypoint targets) are JSON;
tabular data (calibration samples, centerlines, model sweeps) is CSV with
unit-suffixed headers; geometry exports are SVG in millimeter user units.
Units are fixed by the field and header names (mm, kPa, N, rad), never
autodetected.  Structural problems raise SchemaError carrying a JSON-pointer
style path to the offending value.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import SchemaError
from .kinematics import (
    DEFAULT_SAMPLES_PER_MM,
    ORIGIN,
    Arc,
    Line,
    Pose,
    ShapePrimitive,
    StopperSpec,
)
from .planner import Plan
from .simulation import (
    Command,
    DEFAULT_PRESSURE_KPA,
    DesignParams,
    Grow,
    SetPressure,
    SetTension,
)
from .statics import CalibrationSample, FastenerParams, StiffnessParams

DEFAULT_FIT_TOL_MM = 5.0

_MISSING = object()


def _describe(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    if isinstance(value, dict):
        return "object"
    return type(value).__name__


def _expect_object(value, pointer: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(pointer, f"expected object, got {_describe(value)}")
    return value


def _expect_array(value, pointer: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(pointer, f"expected array, got {_describe(value)}")
    return value


def _expect_number(value, pointer: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(pointer, f"expected number, got {_describe(value)}")
    number = float(value)
    if not np.isfinite(number):
        raise SchemaError(pointer, "expected finite number")
    return number


def _expect_bool(value, pointer: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaError(pointer, f"expected boolean, got {_describe(value)}")
    return value


def _expect_string(value, pointer: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(pointer, f"expected string, got {_describe(value)}")
    return value


def _check_keys(obj: dict, pointer: str, allowed) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise SchemaError(pointer, f"unknown field {unknown[0]!r}")


def _build(pointer: str, factory, /, **kwargs):
    """Construct a validated domain object, mapping its errors to the file."""
    try:
        return factory(**kwargs)
    except ValueError as err:
        raise SchemaError(pointer, str(err)) from err


# ---------------------------------------------------------------------------
# design files


def decode_stoppers(obj, pointer: str) -> StopperSpec:
    body = _expect_object(obj, pointer)
    _check_keys(body, pointer, ("stopper_len", "gap_len"))
    kwargs = {}
    for name in ("stopper_len", "gap_len"):
        if name in body:
            kwargs[name] = _expect_number(body[name], f"{pointer}/{name}")
    return _build(pointer, StopperSpec, **kwargs)


def decode_fastener(obj, pointer: str) -> FastenerParams:
    body = _expect_object(obj, pointer)
    names = (
        "width",
        "thickness",
        "sigma_star",
        "tau_star",
        "pinch_offset",
        "calibrated",
    )
    _check_keys(body, pointer, names)
    kwargs = {}
    for name in names[:-1]:
        if name in body:
            kwargs[name] = _expect_number(body[name], f"{pointer}/{name}")
    if "calibrated" in body:
        kwargs["calibrated"] = _expect_bool(body["calibrated"], f"{pointer}/calibrated")
    return _build(pointer, FastenerParams, **kwargs)


def decode_stiffness(obj, pointer: str) -> StiffnessParams:
    body = _expect_object(obj, pointer)
    names = ("k_unlocked", "k_locked", "s_unlocked", "s_locked", "t_full")
    _check_keys(body, pointer, names)
    kwargs = {
        name: _expect_number(body[name], f"{pointer}/{name}")
        for name in names
        if name in body
    }
    return _build(pointer, StiffnessParams, **kwargs)


def decode_design(obj, pointer: str = "") -> DesignParams:
    body = _expect_object(obj, pointer)
    names = (
        "beam_radius",
        "stoppers",
        "leg_len",
        "fastener",
        "stiffness",
        "max_length",
    )
    _check_keys(body, pointer, names)
    kwargs = {}
    for name in ("beam_radius", "leg_len", "max_length"):
        if name in body:
            kwargs[name] = _expect_number(body[name], f"{pointer}/{name}")
    if "stoppers" in body:
        kwargs["stoppers"] = decode_stoppers(body["stoppers"], f"{pointer}/stoppers")
    if "fastener" in body:
        kwargs["fastener"] = decode_fastener(body["fastener"], f"{pointer}/fastener")
    if "stiffness" in body:
        kwargs["stiffness"] = decode_stiffness(body["stiffness"], f"{pointer}/stiffness")
    return _build(pointer, DesignParams, **kwargs)


def encode_design(design: DesignParams) -> dict:
    return {
        "beam_radius": design.beam_radius,
        "stoppers": {
            "stopper_len": design.stoppers.stopper_len,
            "gap_len": design.stoppers.gap_len,
        },
        "leg_len": design.leg_len,
        "fastener": {
            "width": design.fastener.width,
            "thickness": design.fastener.thickness,
            "sigma_star": design.fastener.sigma_star,
            "tau_star": design.fastener.tau_star,
            "pinch_offset": design.fastener.pinch_offset,
            "calibrated": design.fastener.calibrated,
        },
        "stiffness": {
            "k_unlocked": design.stiffness.k_unlocked,
            "k_locked": design.stiffness.k_locked,
            "s_unlocked": design.stiffness.s_unlocked,
            "s_locked": design.stiffness.s_locked,
            "t_full": design.stiffness.t_full,
        },
        "max_length": design.max_length,
    }


# ---------------------------------------------------------------------------
# commands and shape primitives (tagged single-key objects)


def decode_command(obj, pointer: str = "") -> Command:
    body = _expect_object(obj, pointer)
    if len(body) != 1:
        raise SchemaError(pointer, "expected exactly one command tag")
    ((tag, payload),) = body.items()
    inner = f"{pointer}/{tag}"
    fields = _expect_object(payload, inner)
    if tag == "Grow":
        _check_keys(fields, inner, ("delta_len",))
        if "delta_len" not in fields:
            raise SchemaError(inner, "missing field 'delta_len'")
        delta = _expect_number(fields["delta_len"], f"{inner}/delta_len")
        return _build(inner, Grow, delta_len=delta)
    if tag == "SetTension":
        _check_keys(fields, inner, ("side", "tension"))
        for name in ("side", "tension"):
            if name not in fields:
                raise SchemaError(inner, f"missing field {name!r}")
        side = _expect_string(fields["side"], f"{inner}/side")
        tension = _expect_number(fields["tension"], f"{inner}/tension")
        return _build(inner, SetTension, side=side, tension=tension)
    if tag == "SetPressure":
        _check_keys(fields, inner, ("gauge",))
        if "gauge" not in fields:
            raise SchemaError(inner, "missing field 'gauge'")
        gauge = _expect_number(fields["gauge"], f"{inner}/gauge")
        return _build(inner, SetPressure, gauge=gauge)
    raise SchemaError(pointer, f"unknown command tag {tag!r}")


def encode_command(cmd: Command) -> dict:
    if isinstance(cmd, Grow):
        return {"Grow": {"delta_len": cmd.delta_len}}
    if isinstance(cmd, SetTension):
        return {"SetTension": {"side": cmd.side, "tension": cmd.tension}}
    if isinstance(cmd, SetPressure):
        return {"SetPressure": {"gauge": cmd.gauge}}
    raise TypeError(f"not a command: {cmd!r}")


def decode_primitive(obj, pointer: str = "") -> ShapePrimitive:
    body = _expect_object(obj, pointer)
    if len(body) != 1:
        raise SchemaError(pointer, "expected exactly one primitive tag")
    ((tag, payload),) = body.items()
    inner = f"{pointer}/{tag}"
    fields = _expect_object(payload, inner)
    if tag == "Line":
        _check_keys(fields, inner, ("length",))
        if "length" not in fields:
            raise SchemaError(inner, "missing field 'length'")
        length = _expect_number(fields["length"], f"{inner}/length")
        return _build(inner, Line, length=length)
    if tag == "Arc":
        _check_keys(fields, inner, ("radius", "angle", "turn"))
        for name in ("radius", "angle", "turn"):
            if name not in fields:
                raise SchemaError(inner, f"missing field {name!r}")
        radius = _expect_number(fields["radius"], f"{inner}/radius")
        angle = _expect_number(fields["angle"], f"{inner}/angle")
        turn = _expect_string(fields["turn"], f"{inner}/turn")
        return _build(inner, Arc, radius=radius, angle=angle, turn=turn)
    raise SchemaError(pointer, f"unknown primitive tag {tag!r}")


def encode_primitive(prim: ShapePrimitive) -> dict:
    if isinstance(prim, Line):
        return {"Line": {"length": float(prim.length)}}
    if isinstance(prim, Arc):
        return {
            "Arc": {
                "radius": float(prim.radius),
                "angle": float(prim.angle),
                "turn": prim.turn,
            }
        }
    raise TypeError(f"not a shape primitive: {prim!r}")


# ---------------------------------------------------------------------------
# plans, waypoints, scenarios


def decode_pose(obj, pointer: str = "") -> Pose:
    body = _expect_object(obj, pointer)
    _check_keys(body, pointer, ("x", "y", "heading"))
    kwargs = {}
    for name in ("x", "y", "heading"):
        if name in body:
            kwargs[name] = _expect_number(body[name], f"{pointer}/{name}")
    return _build(pointer, Pose, **kwargs)


def encode_pose(pose: Pose) -> dict:
    return {"x": float(pose.x), "y": float(pose.y), "heading": float(pose.heading)}


def decode_plan(obj, pointer: str = "") -> Plan:
    body = _expect_object(obj, pointer)
    _check_keys(
        body, pointer, ("steps", "predicted_shape", "total_growth", "warnings", "base")
    )
    if "steps" not in body:
        raise SchemaError(pointer, "missing field 'steps'")
    steps = tuple(
        decode_command(item, f"{pointer}/steps/{i}")
        for i, item in enumerate(_expect_array(body["steps"], f"{pointer}/steps"))
    )
    shape = ()
    if "predicted_shape" in body:
        raw = _expect_array(body["predicted_shape"], f"{pointer}/predicted_shape")
        shape = tuple(
            decode_primitive(item, f"{pointer}/predicted_shape/{i}")
            for i, item in enumerate(raw)
        )
    warnings = ()
    if "warnings" in body:
        raw = _expect_array(body["warnings"], f"{pointer}/warnings")
        warnings = tuple(
            _expect_string(item, f"{pointer}/warnings/{i}")
            for i, item in enumerate(raw)
        )
    total = sum(step.delta_len for step in steps if isinstance(step, Grow))
    return Plan(
        steps=steps, predicted_shape=shape, total_growth=total, warnings=warnings
    )


def decode_plan_base(obj, pointer: str = "") -> Pose:
    """The optional anchor pose of a plan file; origin when absent."""
    body = _expect_object(obj, pointer)
    if "base" not in body:
        return ORIGIN
    return decode_pose(body["base"], f"{pointer}/base")


def encode_plan(plan: Plan, base: Pose | None = None) -> dict:
    out = {
        "steps": [encode_command(step) for step in plan.steps],
        "predicted_shape": [encode_primitive(p) for p in plan.predicted_shape],
        "total_growth": float(plan.total_growth),
        "warnings": list(plan.warnings),
    }
    if base is not None:
        out["base"] = encode_pose(base)
    return out


def decode_waypoints(obj, pointer: str = "") -> np.ndarray:
    rows = _expect_array(obj, pointer)
    if len(rows) < 2:
        raise SchemaError(pointer, "expected at least 2 waypoints")
    out = np.empty((len(rows), 2))
    for i, row in enumerate(rows):
        pair = _expect_array(row, f"{pointer}/{i}")
        if len(pair) != 2:
            raise SchemaError(f"{pointer}/{i}", "expected [x_mm, y_mm] pair")
        out[i, 0] = _expect_number(pair[0], f"{pointer}/{i}/0")
        out[i, 1] = _expect_number(pair[1], f"{pointer}/{i}/1")
    return out


def encode_waypoints(points) -> list:
    return [[float(x), float(y)] for x, y in np.asarray(points)]


@dataclass(frozen=True)
class Scenario:
    """A simulate run: design, pressure, a command source, and options."""

    design: DesignParams
    pressure: float
    commands: tuple[Command, ...] | None = None
    plan: Plan | None = None
    waypoints: np.ndarray | None = None
    base: Pose = ORIGIN
    disturbance: bool = False
    samples_per_mm: float = DEFAULT_SAMPLES_PER_MM
    tol_mm: float = DEFAULT_FIT_TOL_MM


def decode_scenario(obj, pointer: str = "") -> Scenario:
    body = _expect_object(obj, pointer)
    _check_keys(body, pointer, ("design", "pressure", "source", "options"))
    for name in ("design", "pressure", "source"):
        if name not in body:
            raise SchemaError(pointer, f"missing field {name!r}")
    design = decode_design(body["design"], f"{pointer}/design")
    pressure = _expect_number(body["pressure"], f"{pointer}/pressure")
    if pressure <= 0:
        raise SchemaError(f"{pointer}/pressure", "pressure must be > 0 kPa")

    source = _expect_object(body["source"], f"{pointer}/source")
    if len(source) != 1:
        raise SchemaError(
            f"{pointer}/source",
            "expected exactly one of 'CommandScript', 'Plan', 'TargetWaypoints'",
        )
    ((tag, payload),) = source.items()
    src = f"{pointer}/source/{tag}"
    commands = plan = waypoints = None
    base = ORIGIN
    if tag == "CommandScript":
        commands = tuple(
            decode_command(item, f"{src}/{i}")
            for i, item in enumerate(_expect_array(payload, src))
        )
    elif tag == "Plan":
        plan = decode_plan(payload, src)
        base = decode_plan_base(payload, src)
    elif tag == "TargetWaypoints":
        waypoints = decode_waypoints(payload, src)
    else:
        raise SchemaError(f"{pointer}/source", f"unknown source tag {tag!r}")

    disturbance = False
    samples_per_mm = DEFAULT_SAMPLES_PER_MM
    tol_mm = DEFAULT_FIT_TOL_MM
    if "options" in body:
        options = _expect_object(body["options"], f"{pointer}/options")
        _check_keys(
            options, f"{pointer}/options", ("disturbance", "samples_per_mm", "tol_mm")
        )
        if "disturbance" in options:
            disturbance = _expect_bool(
                options["disturbance"], f"{pointer}/options/disturbance"
            )
        if "samples_per_mm" in options:
            samples_per_mm = _expect_number(
                options["samples_per_mm"], f"{pointer}/options/samples_per_mm"
            )
            if samples_per_mm <= 0:
                raise SchemaError(
                    f"{pointer}/options/samples_per_mm", "must be > 0 points per mm"
                )
        if "tol_mm" in options:
            tol_mm = _expect_number(options["tol_mm"], f"{pointer}/options/tol_mm")
            if tol_mm <= 0:
                raise SchemaError(f"{pointer}/options/tol_mm", "must be > 0 mm")
    return Scenario(
        design=design,
        pressure=pressure,
        commands=commands,
        plan=plan,
        waypoints=waypoints,
        base=base,
        disturbance=disturbance,
        samples_per_mm=samples_per_mm,
        tol_mm=tol_mm,
    )


# ---------------------------------------------------------------------------
# whole-file helpers


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError("", f"invalid JSON in {path}: {err}") from err


def save_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def load_design(path) -> DesignParams:
    return decode_design(load_json(path))


def save_design(path, design: DesignParams) -> None:
    save_json(path, encode_design(design))


def load_plan(path) -> Plan:
    return decode_plan(load_json(path))


def save_plan(path, plan: Plan, base: Pose | None = None) -> None:
    save_json(path, encode_plan(plan, base))


def load_waypoints(path) -> np.ndarray:
    return decode_waypoints(load_json(path))


def load_scenario(path) -> Scenario:
    return decode_scenario(load_json(path))


# ---------------------------------------------------------------------------
# CSV tables

SAMPLES_HEADER = ("theta_rad", "p_sep_kpa")
CENTERLINE_HEADER = ("x_mm", "y_mm", "locked")
SWEEP_HEADER = ("theta_rad", "p_min_kpa")
STIFFNESS_HEADER = ("tension_n", "deflection_deg")


def _read_rows(path, header: tuple[str, ...]) -> list[list[float]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}:1", "empty CSV file")
    found = tuple(name.strip() for name in rows[0][: len(header)])
    if found != header:
        raise SchemaError(
            f"{path}:1", f"expected header {','.join(header)}, got {','.join(found)}"
        )
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < len(header):
            raise SchemaError(f"{path}:{lineno}", f"expected {len(header)} columns")
        try:
            out.append([float(cell) for cell in row[: len(header)]])
        except ValueError as err:
            raise SchemaError(f"{path}:{lineno}", str(err)) from err
    return out


def _write_rows(path, header: tuple[str, ...], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(cell) for cell in row) + "\n")


def _format_cell(cell) -> str:
    if isinstance(cell, (bool, np.bool_)):
        return str(int(cell))
    if isinstance(cell, (int, np.integer)):
        return str(int(cell))
    return repr(float(cell))


def read_samples_csv(path) -> list[CalibrationSample]:
    samples = []
    for lineno, row in enumerate(_read_rows(path, SAMPLES_HEADER), start=2):
        try:
            samples.append(CalibrationSample(theta=row[0], p_sep=row[1]))
        except ValueError as err:
            raise SchemaError(f"{path}:{lineno}", str(err)) from err
    return samples


def write_samples_csv(path, samples) -> None:
    _write_rows(path, SAMPLES_HEADER, [(s.theta, s.p_sep) for s in samples])


def read_polyline_csv(path) -> np.ndarray:
    rows = _read_rows(path, ("x_mm", "y_mm"))
    return np.array(rows, dtype=float)


def write_centerline_csv(path, centerline, lock_boundary_index: int) -> None:
    points = np.asarray(centerline, dtype=float)
    rows = [
        (x, y, 1 if i < lock_boundary_index else 0)
        for i, (x, y) in enumerate(points)
    ]
    _write_rows(path, CENTERLINE_HEADER, rows)


def write_sweep_csv(path, thetas, pressures) -> None:
    _write_rows(path, SWEEP_HEADER, zip(thetas, pressures))


def write_stiffness_csv(path, tensions, deflections) -> None:
    _write_rows(path, STIFFNESS_HEADER, zip(tensions, deflections))
