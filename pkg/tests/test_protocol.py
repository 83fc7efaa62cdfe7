"""Protocol session handling and the socket/stdio transports."""
import io as stringio
import json
import math
import socket
import subprocess
import sys

import numpy as np
import pytest

from vinesim import io as vio
from vinesim.cli import main
from vinesim.kinematics import Arc, Pose, forward_kinematics
from vinesim.protocol import SessionHandler
from vinesim.server import ProtocolServer, serve_stdio
from vinesim.simulation import DesignParams


def command(seq, cmd) -> dict:
    return {"type": "command", "seq": seq, "cmd": cmd}


def grow(seq, delta) -> dict:
    return command(seq, {"Grow": {"delta_len": delta}})


# ---------------------------------------------------------------------------
# session handler


def test_grow_reply_carries_state():
    session = SessionHandler()
    reply = session.handle_message(grow(1, 300.0))
    assert reply["type"] == "state"
    assert reply["seq"] == 1
    snap = reply["snapshot"]
    assert snap["everted_len"] == pytest.approx(300.0)
    assert snap["pressure"] == pytest.approx(7.0)
    assert snap["tension"] == {"side": "none", "newtons": 0.0}
    assert snap["centerline"][0] == [0.0, 0.0]
    assert snap["centerline"][-1][0] == pytest.approx(300.0)
    assert 0 <= snap["lock_boundary_index"] <= len(snap["centerline"])
    assert reply["events"] == []


def test_malformed_json_line_gets_null_seq():
    session = SessionHandler()
    reply = json.loads(session.handle_line("{this is not json"))
    assert reply["type"] == "error"
    assert reply["seq"] is None
    assert "invalid JSON" in reply["message"]


def test_non_object_message_gets_null_seq():
    session = SessionHandler()
    reply = json.loads(session.handle_line("[1, 2, 3]"))
    assert reply["type"] == "error"
    assert reply["seq"] is None


def test_command_validation_error_echoes_seq():
    session = SessionHandler()
    reply = session.handle_message(command(9, {"Shrink": {"delta_len": 5.0}}))
    assert reply["type"] == "error"
    assert reply["seq"] == 9
    assert "Shrink" in reply["message"]

    reply = session.handle_message(command(10, {"Grow": {"delta_len": -5.0}}))
    assert reply["type"] == "error"
    assert "/cmd/Grow" in reply["message"]


def test_session_survives_errors():
    session = SessionHandler()
    assert session.handle_message(grow(1, 100.0))["type"] == "state"
    assert json.loads(session.handle_line("garbage"))["type"] == "error"
    assert session.handle_message({"type": "bogus", "seq": 2})["type"] == "error"
    reply = session.handle_message(grow(3, 100.0))
    assert reply["type"] == "state"
    assert reply["snapshot"]["everted_len"] == pytest.approx(200.0)


def test_unknown_message_type():
    session = SessionHandler()
    reply = session.handle_message({"type": "halt", "seq": 4})
    assert reply["type"] == "error"
    assert reply["seq"] == 4
    assert "halt" in reply["message"]


def test_reset_defaults_are_sticky():
    design = DesignParams(leg_len=120.0)
    session = SessionHandler(design, pressure=5.0)
    session.handle_message(grow(1, 400.0))
    reply = session.handle_message({"type": "reset", "seq": 2})
    assert reply["type"] == "state"
    assert reply["snapshot"]["everted_len"] == 0.0
    assert reply["snapshot"]["pressure"] == pytest.approx(5.0)
    assert session.design.leg_len == pytest.approx(120.0)

    reply = session.handle_message({"type": "reset", "seq": 3, "pressure": 9.0})
    assert reply["snapshot"]["pressure"] == pytest.approx(9.0)
    # the override becomes the new session default
    reply = session.handle_message({"type": "reset", "seq": 4})
    assert reply["snapshot"]["pressure"] == pytest.approx(9.0)


def test_reset_rejects_bad_pressure():
    session = SessionHandler()
    reply = session.handle_message({"type": "reset", "seq": 1, "pressure": "high"})
    assert reply["type"] == "error"
    assert reply["seq"] == 1


def test_reset_base_anchors_snapshot():
    session = SessionHandler()
    base = {"x": 40.0, "y": -30.0, "heading": 0.7}
    reply = session.handle_message({"type": "reset", "seq": 1, "base": base})
    assert reply["snapshot"]["centerline"][0] == [40.0, -30.0]
    reply = session.handle_message(grow(2, 100.0))
    tip = reply["snapshot"]["centerline"][-1]
    assert tip[0] == pytest.approx(40.0 + 100.0 * math.cos(0.7))
    assert tip[1] == pytest.approx(-30.0 + 100.0 * math.sin(0.7))


def test_finished_session_errors_until_reset():
    design = DesignParams(max_length=300.0, leg_len=200.0)
    session = SessionHandler(design)
    reply = session.handle_message(grow(1, 400.0))
    assert reply["type"] == "state"
    assert any(e["kind"] == "max_length_reached" for e in reply["events"])

    reply = session.handle_message(grow(2, 10.0))
    assert reply["type"] == "error"
    assert "finished" in reply["message"]

    assert session.handle_message({"type": "reset", "seq": 3})["type"] == "state"
    assert session.handle_message(grow(4, 10.0))["type"] == "state"


def test_tension_cap_event_in_reply():
    session = SessionHandler()
    reply = session.handle_message(
        command(1, {"SetTension": {"side": "left", "tension": 25.0}})
    )
    assert reply["type"] == "state"
    assert any(e["kind"] == "tension_capped" for e in reply["events"])
    assert reply["snapshot"]["tension"] == {"side": "left", "newtons": 10.0}


def test_separation_event_after_pressure_raise():
    session = SessionHandler(pressure=2.0)
    session.handle_message(command(1, {"SetTension": {"side": "left", "tension": 10.0}}))
    session.handle_message(grow(2, 650.0))
    reply = session.handle_message(command(3, {"SetPressure": {"gauge": 7.0}}))
    assert reply["type"] == "state"
    risks = [e for e in reply["events"] if e["kind"] == "separation_risk"]
    assert len(risks) == 1
    assert risks[0]["arc_index"] == 0
    assert 0.0 < risks[0]["p_min"] < 7.0


# ---------------------------------------------------------------------------
# trace replay

TWO_BEND_SHAPE = [Arc(220.0, 1.2, "left"), Arc(260.0, 1.4, "right")]


def test_trace_replay_reproduces_centerline_exactly(tmp_path):
    target = forward_kinematics(TWO_BEND_SHAPE, Pose(40.0, -30.0, 0.7))
    scenario_path = tmp_path / "scenario.json"
    scenario = {
        "design": vio.encode_design(DesignParams()),
        "pressure": 7.0,
        "source": {"TargetWaypoints": vio.encode_waypoints(target)},
        "options": {"tol_mm": 1.0},
    }
    with open(scenario_path, "w", encoding="utf-8") as fh:
        json.dump(scenario, fh)
    out_dir = tmp_path / "run"
    assert main(["simulate", str(scenario_path), "--out", str(out_dir)]) == 0

    trace_text = (out_dir / "trace.jsonl").read_text()
    assert json.loads(trace_text.splitlines()[0]).get("base") is not None

    replies = stringio.StringIO()
    serve_stdio(stdin=stringio.StringIO(trace_text), stdout=replies)
    lines = replies.getvalue().strip().splitlines()
    assert len(lines) == len(trace_text.strip().splitlines())
    final = json.loads(lines[-1])
    assert final["type"] == "state"

    with open(out_dir / "centerline.csv", encoding="utf-8") as fh:
        rows = [line.split(",") for line in fh.read().strip().splitlines()[1:]]
    csv_points = [[float(r[0]), float(r[1])] for r in rows]
    boundary = sum(int(r[2]) for r in rows)
    # bit-identical, not merely close: same code path, round-tripped floats
    assert final["snapshot"]["centerline"] == csv_points
    assert final["snapshot"]["lock_boundary_index"] == boundary


def test_stdio_skips_blank_lines():
    stdin = stringio.StringIO("\n" + json.dumps(grow(1, 50.0)) + "\n\n")
    stdout = stringio.StringIO()
    serve_stdio(stdin=stdin, stdout=stdout)
    lines = stdout.getvalue().strip().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0])["seq"] == 1


# ---------------------------------------------------------------------------
# socket transports


def ask(stream, message) -> dict:
    stream.write((json.dumps(message) + "\n").encode("utf-8"))
    stream.flush()
    return json.loads(stream.readline().decode("utf-8"))


@pytest.fixture
def server():
    srv = ProtocolServer()
    srv.start()
    yield srv
    srv.close()


def connect_raw(port):
    sock = socket.create_connection(("127.0.0.1", port), timeout=5.0)
    return sock, sock.makefile("rwb")


def test_tcp_connections_are_isolated(server):
    sock_a, a = connect_raw(server.port)
    sock_b, b = connect_raw(server.port)
    try:
        reply = ask(a, grow(1, 300.0))
        assert reply["type"] == "state"
        assert reply["snapshot"]["everted_len"] == pytest.approx(300.0)

        reply = ask(b, grow(1, 100.0))
        assert reply["snapshot"]["everted_len"] == pytest.approx(100.0)

        # a keeps its own session state
        reply = ask(a, grow(2, 100.0))
        assert reply["snapshot"]["everted_len"] == pytest.approx(400.0)
    finally:
        sock_a.close()
        sock_b.close()


def test_tcp_malformed_line_keeps_connection(server):
    sock, stream = connect_raw(server.port)
    try:
        stream.write(b"not json at all\n")
        stream.flush()
        reply = json.loads(stream.readline().decode("utf-8"))
        assert reply["type"] == "error"
        assert reply["seq"] is None

        reply = ask(stream, grow(1, 25.0))
        assert reply["type"] == "state"
    finally:
        sock.close()


def test_websocket_matches_raw_tcp(server):
    websockets = pytest.importorskip("websockets.sync.client")
    script = [
        command(1, {"SetTension": {"side": "right", "tension": 5.0}}),
        grow(2, 500.0),
        command(3, {"SetTension": {"side": "none", "tension": 0.0}}),
        grow(4, 200.0),
    ]
    sock, stream = connect_raw(server.port)
    try:
        raw_replies = [ask(stream, msg) for msg in script]
    finally:
        sock.close()

    with websockets.connect(f"ws://127.0.0.1:{server.port}") as ws:
        ws_replies = []
        for msg in script:
            ws.send(json.dumps(msg))
            ws_replies.append(json.loads(ws.recv()))

    assert ws_replies == raw_replies
    # 500 mm of material everts 500 / (1 + 54/324) mm at half tension
    everted = ws_replies[-1]["snapshot"]["everted_len"]
    assert everted == pytest.approx(500.0 / (1.0 + 54.0 / 324.0) + 200.0)


def test_websocket_error_reply(server):
    websockets = pytest.importorskip("websockets.sync.client")
    with websockets.connect(f"ws://127.0.0.1:{server.port}") as ws:
        ws.send("{broken")
        reply = json.loads(ws.recv())
        assert reply["type"] == "error"
        assert reply["seq"] is None
        ws.send(json.dumps(grow(1, 10.0)))
        assert json.loads(ws.recv())["type"] == "state"


def test_cli_serve_stdio_subprocess():
    lines = json.dumps(grow(1, 120.0)) + "\n" + json.dumps({"type": "reset", "seq": 2}) + "\n"
    proc = subprocess.run(
        [sys.executable, "-m", "vinesim", "serve", "--stdio"],
        input=lines,
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    replies = [json.loads(line) for line in proc.stdout.strip().splitlines()]
    assert len(replies) == 2
    assert replies[0]["type"] == "state"
    assert replies[0]["snapshot"]["everted_len"] == pytest.approx(120.0)
    assert replies[1]["snapshot"]["everted_len"] == 0.0
