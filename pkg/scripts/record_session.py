"""Record a scripted steering session as a frontend test fixture.

Drives the protocol handler through a three-bend deployment and writes every
sent/received pair, so UI tests replay exactly what a live server would say.
"""
from __future__ import annotations

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from vinesim.protocol import SessionHandler

SCRIPT = [
    {"type": "reset", "seq": 1, "pressure": 7.0},
    {"type": "command", "seq": 2, "cmd": {"SetTension": {"side": "left", "tension": 10.0}}},
    {"type": "command", "seq": 3, "cmd": {"Grow": {"delta_len": 500.0}}},
    {"type": "command", "seq": 4, "cmd": {"SetTension": {"side": "none", "tension": 0.0}}},
    {"type": "command", "seq": 5, "cmd": {"Grow": {"delta_len": 300.0}}},
    {"type": "command", "seq": 6, "cmd": {"SetTension": {"side": "right", "tension": 10.0}}},
    {"type": "command", "seq": 7, "cmd": {"Grow": {"delta_len": 500.0}}},
    {"type": "command", "seq": 8, "cmd": {"SetTension": {"side": "left", "tension": 6.0}}},
    {"type": "command", "seq": 9, "cmd": {"Grow": {"delta_len": 400.0}}},
]


def main() -> None:
    session = SessionHandler()
    transcript = []
    for message in SCRIPT:
        reply = json.loads(session.handle_line(json.dumps(message)))
        transcript.append({"sent": message, "received": reply})

    out_dir = os.path.join(
        os.path.dirname(__file__), "..", "frontend", "tests", "fixtures"
    )
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "three_bend_session.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"transcript": transcript}, fh, indent=2)
        fh.write("\n")

    final = transcript[-1]["received"]["snapshot"]
    print(
        f"wrote {os.path.abspath(path)}: {len(transcript)} exchanges, "
        f"{len(final['centerline'])} final centerline points, "
        f"lock boundary {final['lock_boundary_index']}"
    )


if __name__ == "__main__":
    main()
