"""Regenerate the demo inputs under demo/ from one reference deployment."""
from __future__ import annotations

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from vinesim import io as vio
from vinesim.kinematics import Arc, Line, forward_kinematics
from vinesim.simulation import DesignParams
from vinesim.statics import CalibrationSample, FastenerParams, separation_pressure

DEMO_SHAPE = [
    Line(250.0),
    Arc(220.0, 1.0, "left"),
    Line(180.0),
    Arc(260.0, 1.2, "right"),
    Line(280.0),
]

BENCH_FASTENER = FastenerParams(sigma_star=62.0, tau_star=38.0, pinch_offset=7.0)


def main() -> None:
    out = os.path.join(os.path.dirname(__file__), "..", "demo")
    os.makedirs(out, exist_ok=True)
    design = DesignParams()

    vio.save_design(os.path.join(out, "design.json"), design)

    waypoints = forward_kinematics(DEMO_SHAPE, samples_per_mm=0.035)
    with open(os.path.join(out, "target_waypoints.json"), "w", encoding="utf-8") as fh:
        json.dump(vio.encode_waypoints(waypoints), fh, indent=2)
        fh.write("\n")

    scenario = {
        "design": vio.encode_design(design),
        "pressure": 7.0,
        "source": {"TargetWaypoints": vio.encode_waypoints(waypoints)},
        "options": {"tol_mm": 2.0},
    }
    vio.save_json(os.path.join(out, "scenario_waypoints.json"), scenario)

    script = {
        "design": vio.encode_design(design),
        "pressure": 7.0,
        "source": {
            "CommandScript": [
                {"SetTension": {"side": "none", "tension": 0.0}},
                {"Grow": {"delta_len": 400.0}},
                {"SetTension": {"side": "left", "tension": 10.0}},
                {"Grow": {"delta_len": 450.0}},
                {"SetTension": {"side": "right", "tension": 6.0}},
                {"Grow": {"delta_len": 380.0}},
                {"SetPressure": {"gauge": 9.0}},
            ]
        },
    }
    vio.save_json(os.path.join(out, "scenario_script.json"), script)

    samples = [
        CalibrationSample(
            float(t), separation_pressure(float(t), design.beam_radius, BENCH_FASTENER)
        )
        for t in np.linspace(0.15, 2.9, 18)
    ]
    vio.write_samples_csv(os.path.join(out, "separation_samples.csv"), samples)
    print(f"wrote demo inputs to {os.path.abspath(out)}")


if __name__ == "__main__":
    main()
