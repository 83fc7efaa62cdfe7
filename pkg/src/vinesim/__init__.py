"""2D simulation, planning, and model calibration for shape-locking vine robots.

The robot grows by everting material at its tip; a passive tip mount presses
hook-and-loop fastener together a fixed distance behind the tip, freezing
each bend as it exits the unlocked window.  This package models the planar
kinematics of that process, the statics of fastener separation under
internal pressure, a deterministic deployment simulator, and a planner that
turns target shapes into grow/tension command schedules.
"""

from .errors import (
    DomainError,
    InfeasibleCurvatureError,
    InfeasibleShapeError,
    InsufficientSamplesError,
    InvalidDesignError,
    LengthBudgetError,
    SchemaError,
    SessionFinishedError,
    UnreachableToleranceError,
    VineError,
)
from .kinematics import (
    Arc,
    Line,
    Pose,
    StopperSpec,
    arc_length_stations,
    as_polyline,
    bend_angle_from_lengths,
    contraction_ratio,
    end_pose,
    forward_kinematics,
    growth_for_bend,
    mean_config_error,
    min_bend_radius,
    resample_evenly,
    shape_length,
)
from .planner import FitReport, Plan, fit_shape, plan_from_shape, predict
from .protocol import SessionHandler
from .simulation import (
    DesignParams,
    Event,
    Grow,
    SetPressure,
    SetTension,
    Snapshot,
    VineState,
    apply,
    check_separation,
    new_session,
    snapshot,
)
from .statics import (
    CalibrationResult,
    CalibrationSample,
    FastenerParams,
    StiffnessParams,
    beam_tip_force,
    calibrate_fastener,
    fastener_angle,
    max_fastener_tension,
    resistance_torque,
    separation_pressure,
    tip_deflection,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "CalibrationResult",
    "CalibrationSample",
    "DesignParams",
    "DomainError",
    "Event",
    "FastenerParams",
    "FitReport",
    "Grow",
    "InfeasibleCurvatureError",
    "InfeasibleShapeError",
    "InsufficientSamplesError",
    "InvalidDesignError",
    "LengthBudgetError",
    "Line",
    "Plan",
    "Pose",
    "SchemaError",
    "SessionFinishedError",
    "SessionHandler",
    "SetPressure",
    "SetTension",
    "Snapshot",
    "StiffnessParams",
    "StopperSpec",
    "UnreachableToleranceError",
    "VineError",
    "VineState",
    "apply",
    "arc_length_stations",
    "as_polyline",
    "beam_tip_force",
    "bend_angle_from_lengths",
    "calibrate_fastener",
    "check_separation",
    "contraction_ratio",
    "end_pose",
    "fastener_angle",
    "fit_shape",
    "forward_kinematics",
    "growth_for_bend",
    "max_fastener_tension",
    "mean_config_error",
    "min_bend_radius",
    "new_session",
    "plan_from_shape",
    "predict",
    "resample_evenly",
    "resistance_torque",
    "separation_pressure",
    "shape_length",
    "snapshot",
    "tip_deflection",
]
