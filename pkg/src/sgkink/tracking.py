"""Kink-center selection, velocity estimation, and decay diagnostics.

Two center definitions are exposed: the orthogonality condition
int (f - Q(.; beta, c)) sech(gamma(x - beta t - c)) dx = 0 and the pi-level
condition f(beta t + c) = pi.  Their mutual distance is itself a diagnostic:
for small perturbations it decays like t^(-1/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .evolve import Trajectory
from .exact import KinkParams, kink_identities
from .fields import (
    Field,
    L2PlusLinf,
    Lp,
    PairEnergy,
    State,
    Topology,
    norm,
    spatial_derivative,
)

__all__ = [
    "CenterMode",
    "TrackRecord",
    "TrackedTrajectory",
    "solve_center",
    "center_velocity",
    "track",
    "exterior_decay_check",
    "fit_decay_exponent",
]


class CenterMode(Enum):
    ORTHOGONALITY = "orthogonality"
    PI_LEVEL = "pi-level"


@dataclass(frozen=True)
class TrackRecord:
    time: float
    center: float
    center_velocity: float
    diff_linf: float
    diff_deriv_l2plinf: float
    diff_pair_energy: float
    exterior_l2: dict  # R -> exterior L2 of the difference over |x| >= t+R


@dataclass(frozen=True)
class TrackedTrajectory:
    beta: float
    records: tuple

    def series(self, attr: str) -> np.ndarray:
        return np.array([(r.time, getattr(r, attr)) for r in self.records])


def _orthogonality_residual(f: Field, beta: float, t: float, c: float) -> float:
    ids = kink_identities(KinkParams(beta, c), t, f.grid.x)
    integrand = (f.values - ids["Q"]) * ids["sin_half"]
    return float(np.trapezoid(integrand, dx=f.grid.dx))


def solve_center(f: Field, beta: float, t: float, guess: float,
                 mode: CenterMode = CenterMode.ORTHOGONALITY) -> float:
    if mode is CenterMode.ORTHOGONALITY:
        c = guess
        # Newton; the slope is approx -4 near a kink
        for _ in range(80):
            g_val = _orthogonality_residual(f, beta, t, c)
            if abs(g_val) < 1e-12:
                return c
            h = 1e-6
            slope = (_orthogonality_residual(f, beta, t, c + h)
                     - _orthogonality_residual(f, beta, t, c - h)) / (2.0 * h)
            if abs(slope) < 0.5:
                raise RuntimeError(f"degenerate center slope {slope:.3e}")
            c -= g_val / slope
        if abs(_orthogonality_residual(f, beta, t, c)) > 1e-10:
            raise RuntimeError("orthogonality center solve did not converge")
        return c
    # pi-level: root of f(beta t + c) - pi on a monotone window around guess
    spline = CubicSpline(f.grid.x, f.values)

    def level(c):
        return float(spline(beta * t + c)) - np.pi

    lo, hi = guess - 0.5, guess + 0.5
    for _ in range(12):
        if level(lo) * level(hi) < 0:
            break
        lo -= 0.5
        hi += 0.5
    else:
        raise RuntimeError("no sign change bracketing the pi-level center")
    return float(brentq(level, lo, hi, xtol=1e-13))


def center_velocity(f: State, beta: float, center: float) -> float:
    ids = kink_identities(KinkParams(beta, center), f.time, f.grid.x)
    w = ids["sin_half"]
    dx = f.grid.dx
    f_x = spatial_derivative(f.phi, 1).values
    num = float(np.trapezoid((f.phi_t.values + beta * f_x) * w, dx=dx))
    den = float(np.trapezoid(f_x * w, dx=dx))
    if abs(den) < 1.0:
        raise RuntimeError(f"center-velocity denominator too small: {den:.3e}")
    return -num / den


def _kink_reference(grid, beta: float, center: float, t: float) -> State:
    ids = kink_identities(KinkParams(beta, center), t, grid.x)
    return State(Field(grid, ids["Q"]), Field(grid, ids["Q_t"]), t,
                 Topology.KINK)


def track(traj: Trajectory, beta: float, x0_guess: float,
          mode: CenterMode = CenterMode.ORTHOGONALITY,
          exterior_R: tuple = ()) -> TrackedTrajectory:
    """Per-snapshot center tracking with continuation seeding."""
    records = []
    guess = x0_guess
    for s in traj.states:
        c = solve_center(s.phi, beta, s.time, guess, mode)
        if records and abs(c - records[-1].center) > 0.5:
            raise RuntimeError(
                f"center jumped by {abs(c - records[-1].center):.3f} at "
                f"t={s.time}; continuation broken"
            )
        guess = c
        ref = _kink_reference(s.grid, beta, c, s.time)
        dphi = Field(s.grid, s.phi.values - ref.phi.values)
        dphi_t = Field(s.grid, s.phi_t.values - ref.phi_t.values)
        dphi_x = Field(s.grid, spatial_derivative(s.phi, 1).values
                       - spatial_derivative(ref.phi, 1).values)
        ext = {}
        for R in exterior_R:
            mask = np.abs(s.grid.x) >= s.time + R
            dens = (dphi.values**2 + dphi_x.values**2 + dphi_t.values**2)
            ext[R] = float(np.sqrt(np.sum(dens[mask]) * s.grid.dx))
        records.append(TrackRecord(
            time=s.time,
            center=c,
            center_velocity=center_velocity(s, beta, c),
            diff_linf=norm(dphi, Lp(np.inf)),
            diff_deriv_l2plinf=norm(dphi_x, L2PlusLinf())
            + norm(dphi_t, L2PlusLinf()),
            diff_pair_energy=norm(s, PairEnergy(ref)),
            exterior_l2=ext,
        ))
    return TrackedTrajectory(beta, tuple(records))


def exterior_decay_check(f: State, K: State, R: float, s: float) -> dict:
    """Exterior sup of the difference of (f, f_x, f_t) against the decay shape
    min(t^(-1/4) <|x|-t>^(-1/4), <|x|-t>^(-s)), evaluated at the worst point."""
    if f.grid != K.grid:
        raise ValueError("grid mismatch")
    t = f.time
    mask = np.abs(f.grid.x) >= t + R
    if not np.any(mask):
        raise ValueError("empty exterior region")
    d0 = np.abs(f.phi.values - K.phi.values)
    d1 = np.abs(spatial_derivative(f.phi, 1).values
                - spatial_derivative(K.phi, 1).values)
    d2 = np.abs(f.phi_t.values - K.phi_t.values)
    total = (d0 + d1 + d2)[mask]
    idx = int(np.argmax(total))
    lhs = float(total[idx])
    r = np.abs(f.grid.x[mask][idx]) - t
    jap = np.sqrt(1.0 + r * r)
    bound = float(min(t ** (-0.25) * jap ** (-0.25), jap ** (-s)))
    return {"lhs": lhs, "bound": bound}


def fit_decay_exponent(series, window) -> dict:
    """Least-squares slope of log(value) against log(t) inside the window."""
    arr = np.asarray(series, dtype=float)
    t1, t2 = window
    mask = (arr[:, 0] >= t1) & (arr[:, 0] <= t2)
    pts = arr[mask]
    if len(pts) < 10:
        raise ValueError(f"need >= 10 samples in window, got {len(pts)}")
    if np.any(pts[:, 1] <= 0):
        raise ValueError("values must be positive for a log-log fit")
    lt, lv = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(lt, lv, 1)
    pred = slope * lt + intercept
    ss_res = float(np.sum((lv - pred) ** 2))
    ss_tot = float(np.sum((lv - np.mean(lv)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"exponent": float(slope), "r2": r2}
