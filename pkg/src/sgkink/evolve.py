"""Time evolution of f_tt - f_xx + sin f = 0 and conservation diagnostics.

Two backends: a leapfrog finite-difference scheme that handles kink-topology
(non-periodic) fields, and a Strang split-step spectral scheme for
zero-topology fields where the linear half is propagated exactly in Fourier
space.  Conserved quantities E0, P and the higher invariants E2, E4 are
functionals of a single State: time derivatives beyond phi_t are eliminated
through the equation itself (phi_tt = phi_xx - sin phi).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np

from .fields import Field, State, Topology, spatial_derivative

__all__ = [
    "SchemeKind",
    "Scheme",
    "Trajectory",
    "evolve",
    "pde_residual",
    "conserved_quantities",
    "em_tensor",
    "em_conservation_residual",
]

_BLOWUP = 1e6
_CLAMP = 2  # boundary cells held at their asymptotic tail values


class SchemeKind(Enum):
    LEAPFROG = "leapfrog"
    STRANG_SPLIT_SPECTRAL = "strang-split-spectral"
    # Yoshida triple-jump composition of the Strang step: 4th order in time,
    # needed where 2nd-order truncation would swamp a conservation tolerance
    YOSHIDA4_SPECTRAL = "yoshida4-spectral"


@dataclass(frozen=True)
class Scheme:
    kind: SchemeKind
    dt: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass
class Trajectory:
    states: list
    observations: dict = dc_field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    def state_at(self, t: float) -> State:
        times = self.times
        i = int(np.argmin(np.abs(times - t)))
        if abs(times[i] - t) > 1e-9:
            raise ValueError(f"no snapshot at t={t}; nearest is {times[i]}")
        return self.states[i]


def _guard(arr: np.ndarray) -> None:
    if np.max(np.abs(arr)) > _BLOWUP:
        raise RuntimeError("blow-up detected (|value| > 1e6); check setup")


def _laplacian(values: np.ndarray, grid) -> np.ndarray:
    return spatial_derivative(Field(grid, values), 2).values


def evolve(s0: State, scheme: Scheme, t_end: float, snapshot_every: float,
           observers: dict | None = None) -> Trajectory:
    """Integrate s0 to t_end, recording snapshots every snapshot_every.

    Observer callables receive each snapshot State; their results are stored
    under trajectory.observations[name] as (time, value) lists.
    """
    if t_end <= s0.time:
        raise ValueError("t_end must exceed the initial time")
    dt = scheme.dt
    dx = s0.grid.dx
    if scheme.kind is SchemeKind.LEAPFROG:
        if dt > 0.9 * dx + 1e-14:
            raise ValueError(f"CFL violation: dt={dt} > 0.9*dx={0.9*dx}")
        stepper = _leapfrog_run
    else:
        if s0.topology is Topology.KINK:
            raise ValueError("spectral scheme requires zero topology")
        stepper = _spectral_runner(scheme.kind)

    n_steps = int(round((t_end - s0.time) / dt))
    stride = max(1, int(round(snapshot_every / dt)))
    traj = Trajectory(states=[])
    observers = observers or {}
    for name in observers:
        traj.observations[name] = []

    def record(state: State):
        traj.states.append(state)
        for name, fn in observers.items():
            traj.observations[name].append((state.time, fn(state)))

    stepper(s0, dt, n_steps, stride, record)
    return traj


def _leapfrog_run(s0: State, dt: float, n_steps: int, stride: int, record):
    grid = s0.grid
    f_prev = s0.phi.values.astype(float).copy()
    accel0 = _laplacian(f_prev, grid) - np.sin(f_prev)
    f_cur = f_prev + dt * s0.phi_t.values + 0.5 * dt * dt * accel0
    _clamp(f_cur, f_prev)
    record(s0)
    t0 = s0.time
    for n in range(1, n_steps + 1):
        accel = _laplacian(f_cur, grid) - np.sin(f_cur)
        f_next = 2.0 * f_cur - f_prev + dt * dt * accel
        _clamp(f_next, f_prev)
        _guard(f_next)
        if n % stride == 0 or n == n_steps:
            phi_t = (f_next - f_prev) / (2.0 * dt)
            record(State(Field(grid, f_cur.copy()), Field(grid, phi_t),
                         t0 + n * dt, s0.topology))
        f_prev, f_cur = f_cur, f_next


def _clamp(f_new: np.ndarray, f_ref: np.ndarray) -> None:
    # tail values are constants of the motion; pin the stencil-starved cells
    f_new[:_CLAMP] = f_ref[:_CLAMP]
    f_new[-_CLAMP:] = f_ref[-_CLAMP:]


def _strang_step_maker(grid, h: float):
    """One kick-drift-kick Strang step of size h on (phi, phi_t) arrays.

    Kick: half-step of the nonlinearity on phi_t; drift: exact spectral
    propagator of the free wave equation on (phi, phi_t).
    """
    xi = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)
    axi = np.abs(xi)
    cos_w = np.cos(axi * h)
    # sin(|xi| h)/|xi| with the xi=0 limit h
    sinc_w = np.where(axi > 0, np.sin(axi * h) / np.where(axi > 0, axi, 1.0), h)
    wsin_w = axi * np.sin(axi * h)

    def step(phi, pt):
        pt = pt - 0.5 * h * np.sin(phi)
        ph = np.fft.fft(phi)
        pth = np.fft.fft(pt)
        ph, pth = cos_w * ph + sinc_w * pth, -wsin_w * ph + cos_w * pth
        phi = np.fft.ifft(ph).real
        pt = np.fft.ifft(pth).real
        pt = pt - 0.5 * h * np.sin(phi)
        return phi, pt

    return step


def _spectral_runner(kind: SchemeKind):
    def run(s0: State, dt: float, n_steps: int, stride: int, record):
        grid = s0.grid
        if kind is SchemeKind.STRANG_SPLIT_SPECTRAL:
            substeps = [_strang_step_maker(grid, dt)]
        else:
            # Yoshida coefficients: w1, w0, w1 with w1 = 1/(2-2^(1/3))
            w1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
            w0 = 1.0 - 2.0 * w1
            substeps = [
                _strang_step_maker(grid, w1 * dt),
                _strang_step_maker(grid, w0 * dt),
                _strang_step_maker(grid, w1 * dt),
            ]
        phi = s0.phi.values.astype(float).copy()
        pt = s0.phi_t.values.astype(float).copy()
        record(s0)
        t0 = s0.time
        for n in range(1, n_steps + 1):
            for step in substeps:
                phi, pt = step(phi, pt)
            _guard(phi)
            if n % stride == 0 or n == n_steps:
                record(State(Field(grid, phi.copy()), Field(grid, pt.copy()),
                             t0 + n * dt, s0.topology))

    return run


def pde_residual(traj: Trajectory, t: float) -> Field:
    """f_tt - f_xx + sin f by centered differences across snapshots."""
    times = traj.times
    i = int(np.argmin(np.abs(times - t)))
    if i == 0 or i == len(times) - 1:
        raise ValueError("t must have snapshot neighbors on both sides")
    dt = times[i + 1] - times[i]
    fm, f0, fp = (traj.states[j].phi.values for j in (i - 1, i, i + 1))
    f_tt = (fp - 2.0 * f0 + fm) / dt**2
    f_xx = _laplacian(f0, traj.states[i].grid)
    return Field(traj.states[i].grid, f_tt - f_xx + np.sin(f0))


# ---------------------------------------------------------------------------
# Conserved quantities


def _state_derivatives(s: State) -> dict:
    """All derivatives up to third order, time ones routed through the PDE."""
    grid = s.grid
    phi = s.phi.values
    pt = s.phi_t.values

    def dx1(v):
        return spatial_derivative(Field(grid, v), 1).values

    def dx2(v):
        return spatial_derivative(Field(grid, v), 2).values

    px = dx1(phi)
    pxx = dx2(phi)
    pxxx = dx1(pxx)
    ptx = dx1(pt)
    ptxx = dx2(pt)
    ptt = pxx - np.sin(phi)
    pttx = dx1(ptt)
    pttt = ptxx - pt * np.cos(phi)
    return {
        "phi": phi, "t": pt, "x": px, "xx": pxx, "xxx": pxxx,
        "tx": ptx, "txx": ptxx, "tt": ptt, "ttx": pttx, "ttt": pttt,
    }


def _null_derivatives(d: dict) -> dict:
    """Null-direction derivatives with d_pm = (d_t pm d_x)/sqrt(2)."""
    r2 = np.sqrt(2.0)
    out = {
        "m": (d["t"] - d["x"]) / r2,
        "p": (d["t"] + d["x"]) / r2,
        "mm": 0.5 * (d["tt"] - 2.0 * d["tx"] + d["xx"]),
        "pp": 0.5 * (d["tt"] + 2.0 * d["tx"] + d["xx"]),
        "mmm": (d["ttt"] - 3.0 * d["ttx"] + 3.0 * d["txx"] - d["xxx"]) / (2.0 * r2),
        "ppp": (d["ttt"] + 3.0 * d["ttx"] + 3.0 * d["txx"] + d["xxx"]) / (2.0 * r2),
        "mmp": (d["ttt"] - d["ttx"] - d["txx"] + d["xxx"]) / (2.0 * r2),
        "ppm": (d["ttt"] + d["ttx"] - d["txx"] - d["xxx"]) / (2.0 * r2),
    }
    return out


def conserved_quantities(s: State) -> dict:
    """Energy E0, momentum P, and the higher invariants E2, E4.

    E2 and E4 integrate the null-direction energy currents; the b-family is
    the a-family with + and - interchanged.
    """
    d = _state_derivatives(s)
    nd = _null_derivatives(d)
    dx = s.grid.dx
    phi, pt, px = d["phi"], d["t"], d["x"]
    cosphi = np.cos(phi)
    sinphi = np.sin(phi)

    def integrate(density):
        return float(np.trapezoid(density, dx=dx))

    e0 = integrate(0.5 * (pt**2 + px**2) + 1.0 - cosphi)
    p_mom = integrate(0.5 * pt * px)

    # quartic terms below: the exact null-current identities close only with
    # (phi_-)^4 here and (phi_-)^3 phi_--- in J4 (verified symbolically)
    j2a_p = nd["mm"] ** 2 - 0.25 * nd["m"] ** 4
    j2a_m = 0.5 * nd["m"] ** 2 * cosphi
    j2b_m = nd["pp"] ** 2 - 0.25 * nd["p"] ** 4
    j2b_p = 0.5 * nd["p"] ** 2 * cosphi
    e2 = integrate(j2a_p + j2a_m + j2b_p + j2b_m)

    j4a_p = (
        nd["mmm"] ** 2
        + 2.5 * nd["m"] ** 2 * nd["mm"] ** 2
        + (5.0 / 3.0) * nd["m"] ** 3 * nd["mmm"]
        + 0.125 * nd["m"] ** 6
    )
    j4a_m = (
        -(5.0 / 3.0) * nd["m"] ** 3 * nd["mmp"]
        - 0.375 * nd["m"] ** 4 * cosphi
        + 1.5 * nd["m"] ** 2 * nd["mm"] * sinphi
        + 0.5 * nd["mm"] ** 2 * cosphi
    )
    j4b_m = (
        nd["ppp"] ** 2
        + 2.5 * nd["p"] ** 2 * nd["pp"] ** 2
        + (5.0 / 3.0) * nd["p"] ** 3 * nd["ppp"]
        + 0.125 * nd["p"] ** 6
    )
    j4b_p = (
        -(5.0 / 3.0) * nd["p"] ** 3 * nd["ppm"]
        - 0.375 * nd["p"] ** 4 * cosphi
        + 1.5 * nd["p"] ** 2 * nd["pp"] * sinphi
        + 0.5 * nd["pp"] ** 2 * cosphi
    )
    e4 = integrate(j4a_p + j4a_m + j4b_p + j4b_m)

    return {"E0": e0, "P": p_mom, "E2": e2, "E4": e4}


def em_tensor(s: State) -> dict:
    pt = s.phi_t.values
    px = spatial_derivative(s.phi, 1).values
    cosphi = np.cos(s.phi.values)
    half = 0.5 * (pt**2 + px**2)
    return {
        "T00": Field(s.grid, half + 1.0 - cosphi),
        "T01": Field(s.grid, pt * px),
        "T11": Field(s.grid, half - 1.0 + cosphi),
    }


def em_conservation_residual(traj: Trajectory, t: float) -> dict:
    """r0 = dT00/dt - dT10/dx, r1 = dT01/dt - dT11/dx at snapshot time t."""
    times = traj.times
    i = int(np.argmin(np.abs(times - t)))
    if i == 0 or i == len(times) - 1:
        raise ValueError("t must be an interior snapshot time")
    dt = times[i + 1] - times[i]
    tm, t0, tp = (em_tensor(traj.states[j]) for j in (i - 1, i, i + 1))
    d_t00 = (tp["T00"].values - tm["T00"].values) / (2.0 * dt)
    d_t01 = (tp["T01"].values - tm["T01"].values) / (2.0 * dt)
    dx_t10 = spatial_derivative(t0["T01"], 1).values
    dx_t11 = spatial_derivative(t0["T11"], 1).values
    grid = traj.states[i].grid
    return {"r0": Field(grid, d_t00 - dx_t10), "r1": Field(grid, d_t01 - dx_t11)}
