"""Matplotlib report figures rendered next to the delimited outputs."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

LOCKED_COLOR = "#ff7f0e"
UNLOCKED_COLOR = "#1f77b4"


def save_deployment_figure(path, centerline, lock_boundary_index, target=None) -> None:
    points = np.asarray(centerline, dtype=float)
    boundary = int(np.clip(lock_boundary_index, 0, len(points)))
    fig, ax = plt.subplots(figsize=(7, 7))
    if target is not None:
        target = np.asarray(target, dtype=float)
        ax.plot(target[:, 0], target[:, 1], "--", color="#999999", label="target")
    if boundary >= 2:
        ax.plot(points[:boundary, 0], points[:boundary, 1], color=LOCKED_COLOR,
                linewidth=3, label="locked")
    if boundary < len(points):
        start = max(boundary - 1, 0)
        ax.plot(points[start:, 0], points[start:, 1], color=UNLOCKED_COLOR,
                linewidth=3, label="unlocked window")
    ax.plot(points[0, 0], points[0, 1], "ko", markersize=6)
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_pressure_curve_figure(path, thetas, pressures) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.asarray(thetas), np.asarray(pressures), color=UNLOCKED_COLOR)
    ax.set_xlabel("bend angle (rad)")
    ax.set_ylabel("separation pressure (kPa)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_stiffness_figure(path, tensions, deflections) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.asarray(tensions), np.asarray(deflections), color=LOCKED_COLOR)
    ax.set_xlabel("cable tension (N)")
    ax.set_ylabel("tip deflection (deg)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_calibration_figure(path, samples, thetas, pressures) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.asarray(thetas), np.asarray(pressures), color=UNLOCKED_COLOR,
            label="fitted model")
    ax.plot([s.theta for s in samples], [s.p_sep for s in samples], "o",
            color=LOCKED_COLOR, label="samples")
    ax.set_xlabel("bend angle (rad)")
    ax.set_ylabel("separation pressure (kPa)")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
