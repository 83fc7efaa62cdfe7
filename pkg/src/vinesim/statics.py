"""Bend-holding statics for fastener-locked inflated beams.

Covers the pressure-driven straightening torque on a bent beam, the
hook-and-loop strength criterion, the minimum internal pressure that defeats
a locked bend, linear empirical stiffness and deflection models, and
least-squares calibration of fastener strength parameters from measured
separation onsets.

Units follow the field names: lengths in mm, pressures and stresses in kPa,
forces in N, torques in N*m, angles in radians unless a name says degrees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Literal

import numpy as np

from .errors import DomainError, InsufficientSamplesError
from .lsq import solve_least_squares

MM_TO_M = 1e-3
KPA_TO_PA = 1e3

Regime = Literal["unlocked", "locked"]
UNLOCKED: Regime = "unlocked"
LOCKED: Regime = "locked"


@dataclass(frozen=True)
class FastenerParams:
    """Hook-and-loop fastener geometry and strength limits.

    ``sigma_star`` and ``tau_star`` are the pure-normal and pure-shear
    separation stresses.  ``pinch_offset`` is the distance from the beam wall
    to the fastener tension line at the pinch.  The strength defaults are
    placeholders; ``calibrated`` stays False until they come from data.
    """

    width: float = 25.0
    thickness: float = 3.0
    sigma_star: float = 50.0
    tau_star: float = 50.0
    pinch_offset: float = 5.0
    calibrated: bool = False

    def __post_init__(self):
        if not self.width > 0 or not self.thickness > 0:
            raise DomainError("fastener width and thickness must be > 0")
        if not self.sigma_star > 0 or not self.tau_star > 0:
            raise DomainError("separation stresses must be > 0")
        if self.pinch_offset < 0:
            raise DomainError("pinch offset must be >= 0")

    @property
    def stressed_area_m2(self) -> float:
        """Engaged fastener area under a pinch: 8 * width * thickness."""
        return 8.0 * self.width * self.thickness * MM_TO_M * MM_TO_M


@dataclass(frozen=True)
class StiffnessParams:
    """Empirical linear tip models: stiffnesses, tension slopes, full tension.

    ``t_full`` is the cable tension at which every stopper gap closes; the
    deflection slopes are degrees of tip angle per newton of cable tension.
    """

    k_unlocked: float = 152.0
    k_locked: float = 199.0
    s_unlocked: float = 9.0
    s_locked: float = 1.0
    t_full: float = 10.0

    def __post_init__(self):
        if not self.k_locked > self.k_unlocked > 0:
            raise DomainError("need k_locked > k_unlocked > 0")
        if not self.s_unlocked > self.s_locked > 0:
            raise DomainError("need s_unlocked > s_locked > 0")
        if not self.t_full > 0:
            raise DomainError("full-contraction tension must be > 0")


@dataclass(frozen=True)
class CalibrationSample:
    """One measured (locked bend angle, separation-onset pressure) pair."""

    theta: float
    p_sep: float

    def __post_init__(self):
        if not 0 < self.theta < math.pi:
            raise DomainError(f"bend angle must be in (0, pi), got {self.theta}")
        if not self.p_sep > 0:
            raise DomainError(f"separation pressure must be > 0, got {self.p_sep}")


@dataclass(frozen=True)
class CalibrationResult:
    params: FastenerParams
    rmse: float
    converged: bool
    iterations: int


def resistance_torque(pressure: float, beam_radius: float, theta: float) -> float:
    """Straightening torque magnitude on a beam bent by theta, N*m.

    Grows as tan^2(theta/2) + 1, diverging as the bend approaches a full fold.
    """
    if pressure < 0:
        raise DomainError(f"gauge pressure must be >= 0, got {pressure}")
    if not beam_radius > 0:
        raise DomainError(f"beam radius must be > 0, got {beam_radius}")
    if not 0 <= theta < math.pi:
        raise DomainError(f"bend angle must be in [0, pi), got {theta}")
    r = beam_radius * MM_TO_M
    half = math.tan(0.5 * theta)
    return math.pi * r**3 * pressure * KPA_TO_PA * (half * half + 1.0)


def fastener_angle(theta: float) -> float:
    """Angle between the fastener tension line and the fastener plane."""
    if not 0 <= theta <= math.pi:
        raise DomainError(f"bend angle must be in [0, pi], got {theta}")
    return 0.5 * (math.pi - theta)


def max_fastener_tension(theta: float, fastener: FastenerParams) -> float:
    """Tension at which the fastener separates, N.

    The normal and shear stress components trade off along an elliptical
    strength boundary, so the limit runs between area * sigma_star (straight
    beam, pure normal) and area * tau_star (full fold, pure shear).
    """
    alpha = fastener_angle(theta)
    sigma = fastener.sigma_star * KPA_TO_PA
    tau = fastener.tau_star * KPA_TO_PA
    quad = (math.sin(alpha) / sigma) ** 2 + (math.cos(alpha) / tau) ** 2
    return fastener.stressed_area_m2 / math.sqrt(quad)


def _separation_pressure_kpa(theta, beam_radius, width, thickness, sigma_star, tau_star, pinch_offset):
    """Vectorized separation-pressure model; theta may be an ndarray."""
    theta = np.asarray(theta, dtype=float)
    half = 0.5 * theta
    alpha = 0.5 * (math.pi - theta)
    area = 8.0 * width * thickness * MM_TO_M * MM_TO_M
    quad = (np.sin(alpha) / (sigma_star * KPA_TO_PA)) ** 2 + (
        np.cos(alpha) / (tau_star * KPA_TO_PA)
    ) ** 2
    t_max = area / np.sqrt(quad)
    r = beam_radius * MM_TO_M
    d = pinch_offset * MM_TO_M
    arm = r * np.cos(alpha) + (r / np.tan(half) + d) * np.sin(alpha)
    torque_per_pa = math.pi * r**3 * (np.tan(half) ** 2 + 1.0)
    return t_max * arm / torque_per_pa / KPA_TO_PA


def separation_pressure(theta: float, beam_radius: float, fastener: FastenerParams) -> float:
    """Minimum gauge pressure that defeats a locked bend of angle theta, kPa.

    Balances the straightening torque against the fastener tension limit
    acting on its moment arm about the pinch.  The model diverges as theta
    approaches 0 and collapses to zero at a full fold, so both endpoints are
    rejected rather than extrapolated.
    """
    if not 0 < theta < math.pi:
        raise DomainError(f"bend angle must be in (0, pi), got {theta}")
    if not beam_radius > 0:
        raise DomainError(f"beam radius must be > 0, got {beam_radius}")
    return float(
        _separation_pressure_kpa(
            theta,
            beam_radius,
            fastener.width,
            fastener.thickness,
            fastener.sigma_star,
            fastener.tau_star,
            fastener.pinch_offset,
        )
    )


def _slope(regime: Regime, stiffness: StiffnessParams) -> float:
    if regime == LOCKED:
        return stiffness.s_locked
    if regime == UNLOCKED:
        return stiffness.s_unlocked
    raise DomainError(f"unknown regime: {regime!r}")


def tip_deflection(
    tension: float,
    regime: Regime,
    stiffness: StiffnessParams,
    max_angle_deg: float | None = None,
) -> float:
    """Tip-angle change in degrees from pulling a cable at the given tension.

    Linear empirical model; pass ``max_angle_deg`` to cap the result at a
    geometric limit (an unlocked window cannot bend past full contraction).
    """
    if tension < 0:
        raise DomainError(f"cable tension must be >= 0, got {tension}")
    deflection = _slope(regime, stiffness) * tension
    if max_angle_deg is not None:
        deflection = min(deflection, max_angle_deg)
    return deflection


def beam_tip_force(displacement_m: float, regime: Regime, stiffness: StiffnessParams) -> float:
    """Lateral tip force for a given tip displacement in meters, N."""
    if displacement_m < 0:
        raise DomainError(f"displacement must be >= 0, got {displacement_m}")
    k = stiffness.k_locked if regime == LOCKED else stiffness.k_unlocked
    if regime not in (LOCKED, UNLOCKED):
        raise DomainError(f"unknown regime: {regime!r}")
    return k * displacement_m


def calibrate_fastener(
    samples: Iterable[CalibrationSample],
    beam_radius: float,
    init: FastenerParams,
    fit_d: bool = False,
) -> CalibrationResult:
    """Fit fastener strength parameters to measured separation onsets.

    Fits sigma_star and tau_star (plus pinch_offset when ``fit_d``) in log
    space, so fitted values are strictly positive.  Returns the fitted
    parameters marked calibrated, with the root-mean-square pressure residual
    in kPa.  A non-converged fit still returns the best parameters found,
    flagged via ``converged``.
    """
    if not beam_radius > 0:
        raise DomainError(f"beam radius must be > 0, got {beam_radius}")
    samples = list(samples)
    thetas = np.array([s.theta for s in samples], dtype=float)
    measured = np.array([s.p_sep for s in samples], dtype=float)
    n_params = 3 if fit_d else 2
    if len(samples) < 3 or np.unique(thetas).size < n_params:
        raise InsufficientSamplesError(
            f"need at least 3 samples over {n_params} distinct angles, "
            f"got {len(samples)} over {np.unique(thetas).size}"
        )

    def unpack(x):
        # Clamp the exponent so a wild trial step yields an enormous finite
        # residual the damping loop can reject, not an overflow.  A 2-vector
        # leaves the pinch offset at its initial value.
        sigma = math.exp(min(x[0], 200.0))
        tau = math.exp(min(x[1], 200.0))
        d = init.pinch_offset
        if fit_d and len(x) == 3:
            d = math.exp(min(x[2], 200.0))
        return sigma, tau, d

    def residuals(x):
        sigma, tau, d = unpack(x)
        model = _separation_pressure_kpa(
            thetas, beam_radius, init.width, init.thickness, sigma, tau, d
        )
        return model - measured

    x0 = np.array([math.log(init.sigma_star), math.log(init.tau_star)])
    iterations = 0
    if fit_d:
        # Warm start: the strength parameters identify well on their own, and
        # releasing the offset from that point keeps it out of the flat
        # d -> 0 canyon the full problem has from a cold start.
        frozen = solve_least_squares(residuals, x0, max_step=2.0)
        iterations = frozen.iterations
        x0 = np.append(frozen.x, math.log(max(init.pinch_offset, 1e-2)))
    result = solve_least_squares(residuals, x0, max_step=2.0)
    sigma, tau, d = unpack(result.x)
    fitted = replace(
        init, sigma_star=sigma, tau_star=tau, pinch_offset=d, calibrated=True
    )
    rmse = math.sqrt(result.cost / len(samples))
    return CalibrationResult(
        params=fitted,
        rmse=rmse,
        converged=result.converged,
        iterations=iterations + result.iterations,
    )
