"""Dormand-Prince 5(4) integrator with PI step-size control.

The fifth-order solution is propagated (local extrapolation).  Steps are
clipped so that every requested output time is hit exactly; no dense-output
interpolation enters the samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalError, SingularityError, StepSizeUnderflow, ValidationError

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [np.asarray(row) for row in [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 10.0
BETA = 0.04
ALPHA = 0.2 - 0.75 * BETA


@dataclass
class IntegratorStats:
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0


def _initial_step(f, t0, y0, f0, rel_tol, abs_tol, direction):
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = f(t0 + direction * h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def dopri5(f: Callable[[float, np.ndarray], np.ndarray], y0, t_out, rel_tol: float = 1e-10,
           abs_tol: float = 1e-12, max_steps: int = 10_000_000):
    """Integrate ``y' = f(t, y)`` and return the states at every time in ``t_out``.

    ``t_out`` must be strictly increasing; its first entry is the initial time.
    Returns ``(Y, stats)`` with ``Y`` of shape ``(len(t_out), len(y0))``.
    """
    t_out = np.asarray(t_out, dtype=float)
    if t_out.ndim != 1 or t_out.size < 2 or np.any(np.diff(t_out) <= 0):
        raise ValidationError("output times must be strictly increasing with at least 2 samples")
    if not np.all(np.isfinite(t_out)):
        raise ValidationError("output times must be finite")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValidationError("tolerances must be positive")

    y = np.array(y0, dtype=float)
    out = np.empty((t_out.size, y.size))
    out[0] = y
    stats = IntegratorStats()

    def rhs(t, yy):
        stats.evaluations += 1
        return np.asarray(f(t, yy), dtype=float)

    t = t_out[0]
    k = np.empty((7, y.size))
    k[0] = rhs(t, y)
    h = _initial_step(rhs, t, y, k[0], rel_tol, abs_tol, 1.0)
    err_prev = 1e-4
    idx = 1
    while idx < t_out.size:
        if stats.steps + stats.rejected >= max_steps:
            raise NumericalError(f"maximum step count exceeded at t={t!r}", t=t, state=y.copy())
        target = t_out[idx]
        if h < 64 * np.spacing(max(abs(t), 1.0)):
            raise StepSizeUnderflow(f"step size underflow at t={t!r}", t=t, state=y.copy())
        landing = t + h >= target
        step = target - t if landing else h
        try:
            for s in range(1, 7):
                ys = y + step * (A[s] @ k[:s])
                k[s] = rhs(t + C[s] * step, ys)
        except SingularityError as exc:
            raise SingularityError(f"{exc} (last valid t={t!r})", t=t, state=y.copy()) from None
        y_new = ys  # stage 7 point is the 5th-order solution (FSAL)
        err_vec = step * (E @ k)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(np.abs(err_vec / scale)))
        if not np.isfinite(err):
            err = np.inf

        if err <= 1.0:
            fac = max(err, 1e-10) ** ALPHA / err_prev ** BETA
            fac = min(1 / FAC_MIN, max(1 / FAC_MAX, fac / SAFETY))
            h_next = step / fac
            err_prev = max(err, 1e-4)
            t = target if landing else t + step
            y = y_new
            k[0] = k[6]
            stats.steps += 1
            if landing:
                out[idx] = y
                idx += 1
                # a clipped landing step says nothing about the natural step size
                h = max(h, h_next) if step < h else h_next
            else:
                h = h_next
        else:
            stats.rejected += 1
            fac = min(1 / FAC_MIN, (err ** ALPHA) / SAFETY) if np.isfinite(err) else 1 / FAC_MIN
            h = step / fac
    return out, stats
