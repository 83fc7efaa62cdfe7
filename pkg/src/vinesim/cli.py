"""Command-line frontend.

Subcommands: simulate, plan, models, calibrate, evaluate, serve.  Exit codes
separate the failure classes: 0 success, 2 schema or file errors, 3 fit
tolerance unreachable, 4 domain or simulation errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .errors import SchemaError, UnreachableToleranceError, VineError
from .kinematics import ORIGIN, as_polyline, forward_kinematics, mean_config_error
from .planner import fit_shape, plan_from_shape
from .server import ProtocolServer, serve_stdio
from .simulation import DEFAULT_PRESSURE_KPA, DesignParams, apply, new_session, snapshot
from .statics import calibrate_fastener, separation_pressure, tip_deflection
from .svg import write_deployment_svg

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_UNREACHABLE = 3
EXIT_DOMAIN = 4


def _load_design(path) -> DesignParams:
    return io.load_design(path) if path else DesignParams()


def cmd_simulate(args) -> int:
    from . import figures

    scenario = io.load_scenario(args.scenario)
    disturbance = scenario.disturbance
    if args.disturbance is not None:
        disturbance = args.disturbance == "on"

    design = scenario.design
    target = None
    base = scenario.base
    if scenario.commands is not None:
        commands = scenario.commands
    elif scenario.plan is not None:
        commands = scenario.plan.steps
        if scenario.plan.predicted_shape:
            target = forward_kinematics(scenario.plan.predicted_shape, base)
    else:
        report = fit_shape(scenario.waypoints, design, scenario.tol_mm)
        plan = plan_from_shape(report.shape, design, pressure=scenario.pressure)
        for warning in plan.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        commands = plan.steps
        base = report.base
        target = scenario.waypoints

    state = new_session(design, scenario.pressure)
    all_events = []
    for cmd in commands:
        state, events = apply(state, cmd, disturbance=disturbance)
        all_events.extend(events)
    snap = snapshot(state, base, samples_per_mm=scenario.samples_per_mm)

    os.makedirs(args.out, exist_ok=True)
    trace_path = os.path.join(args.out, "trace.jsonl")
    with open(trace_path, "w", encoding="utf-8", newline="\n") as fh:
        reset = {
            "type": "reset",
            "design": io.encode_design(design),
            "pressure": scenario.pressure,
            "samples_per_mm": scenario.samples_per_mm,
            "disturbance": disturbance,
        }
        if base != ORIGIN:
            reset["base"] = io.encode_pose(base)
        fh.write(json.dumps(reset) + "\n")
        for seq, cmd in enumerate(commands, start=1):
            line = {"type": "command", "seq": seq, "cmd": io.encode_command(cmd)}
            fh.write(json.dumps(line) + "\n")

    io.write_centerline_csv(
        os.path.join(args.out, "centerline.csv"), snap.centerline, snap.lock_boundary_index
    )
    write_deployment_svg(
        os.path.join(args.out, "deploy.svg"),
        snap.centerline,
        snap.lock_boundary_index,
        beam_radius=design.beam_radius,
        target=target,
    )
    figures.save_deployment_figure(
        os.path.join(args.out, "deploy.png"),
        snap.centerline,
        snap.lock_boundary_index,
        target=target,
    )

    for event in all_events:
        print(f"event {event.kind} at {event.at_len:.3f} mm")
    print(
        f"deployed {state.everted_len:.3f} mm ({state.material_used:.3f} mm material), "
        f"{len(snap.centerline)} centerline points"
    )
    print(f"wrote trace.jsonl, centerline.csv, deploy.svg, deploy.png to {args.out}")
    return EXIT_OK


def cmd_plan(args) -> int:
    waypoints = io.load_waypoints(args.target)
    design = _load_design(args.design)
    report = fit_shape(waypoints, design, args.tol_mm)
    plan = plan_from_shape(
        report.shape, design, pressure=args.pressure, tension_mode=args.tension
    )
    io.save_plan(args.out, plan, base=report.base)
    for warning in plan.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"residual {report.residual:.3f} mm")
    print(f"primitives {report.primitive_count}")
    print(f"growth {plan.total_growth:.3f} mm")
    return EXIT_OK


def cmd_models(args) -> int:
    design = _load_design(args.design)
    if args.model == "pressure-curve":
        if args.theta is not None:
            thetas = np.array([args.theta])
        else:
            thetas = np.linspace(args.theta_min, args.theta_max, args.points)
        pressures = np.array(
            [
                separation_pressure(theta, design.beam_radius, design.fastener)
                for theta in thetas
            ]
        )
        if args.out:
            from . import figures

            io.write_sweep_csv(args.out, thetas, pressures)
            figure_path = os.path.splitext(args.out)[0] + ".png"
            figures.save_pressure_curve_figure(figure_path, thetas, pressures)
            print(f"wrote {args.out} and {figure_path}")
        else:
            print(",".join(io.SWEEP_HEADER))
            for theta, p in zip(thetas, pressures):
                print(f"{float(theta)!r},{float(p)!r}")
        return EXIT_OK

    tensions = np.linspace(0.0, design.stiffness.t_full, args.points)
    deflections = np.array(
        [tip_deflection(t, args.regime, design.stiffness) for t in tensions]
    )
    if args.out:
        from . import figures

        io.write_stiffness_csv(args.out, tensions, deflections)
        figure_path = os.path.splitext(args.out)[0] + ".png"
        figures.save_stiffness_figure(figure_path, tensions, deflections)
        print(f"wrote {args.out} and {figure_path}")
    else:
        print(",".join(io.STIFFNESS_HEADER))
        for t, d in zip(tensions, deflections):
            print(f"{float(t)!r},{float(d)!r}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    samples = io.read_samples_csv(args.samples)
    design = _load_design(args.design)
    result = calibrate_fastener(
        samples, design.beam_radius, design.fastener, fit_d=args.fit_d
    )
    params = result.params
    print(f"sigma_star {params.sigma_star:.6f} kPa")
    print(f"tau_star {params.tau_star:.6f} kPa")
    print(f"pinch_offset {params.pinch_offset:.6f} mm")
    print(f"rmse {result.rmse:.9f} kPa")
    print(f"converged {result.converged} after {result.iterations} iterations")
    if args.out:
        from dataclasses import replace

        io.save_design(args.out, replace(design, fastener=params))
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    deployed = as_polyline(io.read_polyline_csv(args.deployed))
    desired = as_polyline(io.read_polyline_csv(args.desired))
    error = mean_config_error(deployed, desired, args.points)
    print(f"mean config error {error:.6f} mm over {args.points} stations")
    return EXIT_OK


def cmd_serve(args) -> int:
    design = _load_design(args.design)
    disturbance = args.disturbance == "on"
    if args.stdio:
        serve_stdio(design, pressure=args.pressure, disturbance=disturbance)
        return EXIT_OK
    server = ProtocolServer(
        design,
        pressure=args.pressure,
        host=args.host,
        port=args.port,
        disturbance=disturbance,
    )
    server.start()
    print(f"listening on {server.host}:{server.port}", file=sys.stderr, flush=True)
    server.serve_forever()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vinesim",
        description="Simulate, plan, and calibrate shape-locking vine deployments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario file and write its outputs")
    p.add_argument("scenario", help="scenario JSON path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--disturbance", choices=("on", "off"), default=None,
        help="override the scenario's disturbance option",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plan", help="fit waypoints and write a deployment plan")
    p.add_argument("target", help="waypoint JSON path")
    p.add_argument("--design", help="design JSON path (defaults when omitted)")
    p.add_argument("--tol-mm", type=float, default=io.DEFAULT_FIT_TOL_MM)
    p.add_argument("--out", required=True, help="plan JSON output path")
    p.add_argument("--pressure", type=float, default=DEFAULT_PRESSURE_KPA)
    p.add_argument(
        "--tension", choices=("proportional", "binary"), default="proportional"
    )
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("models", help="emit model curves as CSV (and PNG with --out)")
    p.add_argument("model", choices=("pressure-curve", "stiffness"))
    p.add_argument("--design", help="design JSON path (defaults when omitted)")
    p.add_argument("--out", help="CSV output path; stdout when omitted")
    p.add_argument("--theta", type=float, default=None, help="single angle in rad")
    p.add_argument("--theta-min", type=float, default=0.1)
    p.add_argument("--theta-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--regime", choices=("unlocked", "locked"), default="locked")
    p.set_defaults(func=cmd_models)

    p = sub.add_parser("calibrate", help="fit fastener strengths to sample data")
    p.add_argument("samples", help="CSV of theta_rad,p_sep_kpa samples")
    p.add_argument("--design", help="design JSON path (defaults when omitted)")
    p.add_argument("--fit-d", action="store_true", help="also fit the pinch offset")
    p.add_argument("--out", help="write the updated design JSON here")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("evaluate", help="mean distance between two centerline CSVs")
    p.add_argument("deployed", help="deployed centerline CSV")
    p.add_argument("desired", help="desired centerline CSV")
    p.add_argument("--points", type=int, default=100)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="expose sessions over a socket or stdio")
    p.add_argument("--design", help="design JSON path (defaults when omitted)")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--pressure", type=float, default=DEFAULT_PRESSURE_KPA)
    p.add_argument("--stdio", action="store_true", help="speak on stdin/stdout")
    p.add_argument("--disturbance", choices=("on", "off"), default="off")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SCHEMA
    except UnreachableToleranceError as err:
        print(f"error: {err}", file=sys.stderr)
        best = err.best_report
        if best is not None:
            print(
                f"best residual {best.residual:.3f} mm with "
                f"{best.primitive_count} primitives",
                file=sys.stderr,
            )
        return EXIT_UNREACHABLE
    except VineError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
