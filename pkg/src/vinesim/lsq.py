"""Small dense nonlinear least-squares solver.

Damped Gauss-Newton with numeric Jacobians; when a damped step cannot reduce
the cost, one coordinate-descent sweep is tried before declaring a local
minimum.  Sized for problems with a handful of parameters and at most a few
hundred residuals, which is all this package needs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

ResidualFn = Callable[[np.ndarray], np.ndarray]


@dataclass
class LsqResult:
    x: np.ndarray
    cost: float
    iterations: int
    converged: bool


def numeric_jacobian(fn: ResidualFn, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a residual function at x."""
    x = np.asarray(x, dtype=float)
    r0 = np.asarray(fn(x), dtype=float)
    jac = np.empty((r0.size, x.size))
    for j in range(x.size):
        h = rel_step * max(abs(x[j]), 1.0)
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.asarray(fn(xp), dtype=float) - np.asarray(fn(xm), dtype=float)) / (2.0 * h)
    return jac


def _coordinate_sweep(fn: ResidualFn, x: np.ndarray, cost: float):
    """One axis-aligned probing sweep; returns an improved (x, cost) or None."""
    improved = False
    for j in range(x.size):
        base = max(abs(x[j]), 1.0)
        for scale in (1e-2, 1e-4, 1e-6):
            for sign in (1.0, -1.0):
                xn = x.copy()
                xn[j] += sign * scale * base
                rn = np.asarray(fn(xn), dtype=float)
                cn = float(rn @ rn)
                if np.isfinite(cn) and cn < cost:
                    x, cost, improved = xn, cn, True
    return (x, cost) if improved else None


def solve_least_squares(
    fn: ResidualFn,
    x0,
    max_iter: int = 500,
    rel_step_tol: float = 1e-10,
    cost_tol: float = 0.0,
    max_step: float | None = None,
) -> LsqResult:
    """Minimize sum of squared residuals of ``fn`` starting from ``x0``.

    Convergence: relative step below ``rel_step_tol``, cost at or below
    ``cost_tol``, or a full iteration (including the coordinate fallback)
    without improvement.  ``max_step`` caps the infinity norm of each update,
    which keeps log-space parameterizations from overshooting so far that
    their gradient dies.
    """
    x = np.array(x0, dtype=float)
    r = np.asarray(fn(x), dtype=float)
    cost = float(r @ r)
    floor = max(cost_tol, 1e-30)
    lam = 1e-3
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        if cost <= floor:
            converged = True
            break
        jac = numeric_jacobian(fn, x)
        grad = jac.T @ r
        hess = jac.T @ jac
        scale = np.maximum(np.diag(hess), 1e-12)
        accepted = None
        for _ in range(16):
            try:
                step = np.linalg.solve(hess + lam * np.diag(scale), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            if max_step is not None:
                widest = np.max(np.abs(step))
                if widest > max_step:
                    step = step * (max_step / widest)
            xn = x + step
            rn = np.asarray(fn(xn), dtype=float)
            cn = float(rn @ rn)
            if np.isfinite(cn) and cn <= cost:
                accepted = (xn, rn, cn, step)
                break
            lam *= 10.0
        if accepted is None:
            swept = _coordinate_sweep(fn, x, cost)
            if swept is None:
                converged = True
                break
            x, cost = swept
            r = np.asarray(fn(x), dtype=float)
            continue
        xn, rn, cn, step = accepted
        small = np.linalg.norm(step) <= rel_step_tol * max(1.0, np.linalg.norm(xn))
        x, r, cost = xn, rn, cn
        lam = max(lam / 3.0, 1e-12)
        if small:
            converged = True
            break
    return LsqResult(x=x, cost=cost, iterations=iterations, converged=converged)
