"""Line-delimited JSON protocol wrapping a simulator session.

Inbound messages are either commands or resets:

    {"type": "command", "seq": 3, "cmd": {"Grow": {"delta_len": 100}}}
    {"type": "reset", "design": {...}, "pressure": 7.0}

Every inbound line is answered by exactly one outbound line, either a state
message echoing the seq or an error message (seq null when the line never
parsed far enough to have one).  Malformed input never ends the session.
"""
from __future__ import annotations

import json
from typing import Any

from .errors import SchemaError, VineError
from .io import _expect_bool, _expect_number, decode_command, decode_design, decode_pose
from .kinematics import DEFAULT_SAMPLES_PER_MM, ORIGIN, Pose
from .simulation import (
    DEFAULT_PRESSURE_KPA,
    DesignParams,
    VineState,
    apply,
    new_session,
    snapshot,
)


def encode_state_message(
    seq, state: VineState, events, samples_per_mm: float, base: Pose = ORIGIN
) -> dict:
    snap = snapshot(state, base, samples_per_mm=samples_per_mm)
    payload = {
        "centerline": [[float(x), float(y)] for x, y in snap.centerline],
        "lock_boundary_index": int(snap.lock_boundary_index),
        "everted_len": float(state.everted_len),
        "pressure": float(state.pressure),
        "tension": {
            "side": state.tension.side,
            "newtons": float(state.tension.newtons),
        },
    }
    out_events = []
    for event in events:
        entry: dict[str, Any] = {"kind": event.kind, "at_len": float(event.at_len)}
        if event.arc_index is not None:
            entry["arc_index"] = int(event.arc_index)
        if event.p_min is not None:
            entry["p_min"] = float(event.p_min)
        out_events.append(entry)
    return {"type": "state", "seq": seq, "snapshot": payload, "events": out_events}


def encode_error_message(seq, message: str) -> dict:
    return {"type": "error", "seq": seq, "message": message}


class SessionHandler:
    """One protocol session: a design, a live state, and message handling."""

    def __init__(
        self,
        design: DesignParams | None = None,
        pressure: float = DEFAULT_PRESSURE_KPA,
        disturbance: bool = False,
        samples_per_mm: float = DEFAULT_SAMPLES_PER_MM,
    ):
        self.design = design if design is not None else DesignParams()
        self.pressure = pressure
        self.disturbance = disturbance
        self.samples_per_mm = samples_per_mm
        self.base = ORIGIN
        self.state = new_session(self.design, pressure)

    def handle_message(self, message) -> dict:
        """Answer one decoded inbound message with one outbound message."""
        if not isinstance(message, dict):
            return encode_error_message(None, "expected a JSON object")
        seq = message.get("seq")
        kind = message.get("type")
        try:
            if kind == "command":
                if "cmd" not in message:
                    raise SchemaError("/cmd", "missing field 'cmd'")
                cmd = decode_command(message["cmd"], "/cmd")
                self.state, events = apply(self.state, cmd, self.disturbance)
                return encode_state_message(
                    seq, self.state, events, self.samples_per_mm, self.base
                )
            if kind == "reset":
                return self._reset(message, seq)
            raise SchemaError("/type", f"unknown message type {kind!r}")
        except (SchemaError, VineError, ValueError) as err:
            return encode_error_message(seq, str(err))

    def _reset(self, message: dict, seq) -> dict:
        design = self.design
        pressure = self.pressure
        samples_per_mm = self.samples_per_mm
        if message.get("design") is not None:
            design = decode_design(message["design"], "/design")
        if message.get("pressure") is not None:
            pressure = _expect_number(message["pressure"], "/pressure")
        if message.get("samples_per_mm") is not None:
            samples_per_mm = _expect_number(
                message["samples_per_mm"], "/samples_per_mm"
            )
            if samples_per_mm <= 0:
                raise SchemaError("/samples_per_mm", "must be > 0 points per mm")
        if message.get("disturbance") is not None:
            self.disturbance = _expect_bool(message["disturbance"], "/disturbance")
        base = self.base
        if message.get("base") is not None:
            base = decode_pose(message["base"], "/base")
        state = new_session(design, pressure)
        self.design = design
        self.pressure = pressure
        self.samples_per_mm = samples_per_mm
        self.base = base
        self.state = state
        return encode_state_message(seq, state, (), samples_per_mm, base)

    def handle_line(self, line: str) -> str:
        """Answer one raw inbound line with one serialized outbound line."""
        try:
            message = json.loads(line)
        except json.JSONDecodeError as err:
            return json.dumps(encode_error_message(None, f"invalid JSON: {err}"))
        return json.dumps(self.handle_message(message))
