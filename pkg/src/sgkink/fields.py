"""Grids, fields, states, derivatives, Fourier multipliers, and norms.

Everything downstream (integrators, Backlund solves, tracking, scattering
diagnostics) is built on the uniform grid defined here.  Fields of interest
either decay exponentially or reach constant tails, so a uniform grid with
trapezoid quadrature is accurate well past the tolerances we care about.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "State",
    "Topology",
    "Lp",
    "L2PlusLinf",
    "WeightedSobolev",
    "PairEnergy",
    "make_grid",
    "spatial_derivative",
    "bessel_multiplier",
    "inner_product",
    "norm",
    "save_field_csv",
    "load_field_csv",
    "save_field_sgf",
    "load_field_sgf",
]


class Topology(Enum):
    ZERO = "zero"
    KINK = "kink"


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D grid with n samples on [x_min, x_max); n a power of two.

    The right endpoint is excluded so the layout is directly usable by the
    FFT-based multipliers (periodic convention).
    """

    x_min: float
    x_max: float
    n: int

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


def make_grid(x_min: float, x_max: float, n: int) -> Grid:
    if not x_max > x_min:
        raise ValueError(f"degenerate interval [{x_min}, {x_max}]")
    if n < 16 or (n & (n - 1)) != 0:
        raise ValueError(f"n must be a power of two >= 16, got {n}")
    return Grid(float(x_min), float(x_max), int(n))


@dataclass(frozen=True)
class Field:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.grid.n,):
            raise ValueError(f"values shape {vals.shape} != ({self.grid.n},)")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", vals)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)


def _kink_jump(values: np.ndarray) -> float:
    """Wrap-around jump of the periodic extension; large for kink topology."""
    return float(np.abs(values[0] - values[-1]))


@dataclass(frozen=True)
class State:
    """Pair (phi, phi_t) at a fixed time, tagged by tail topology."""

    phi: Field
    phi_t: Field
    time: float
    topology: Topology

    def __post_init__(self):
        if self.phi.grid != self.phi_t.grid:
            raise ValueError("phi and phi_t must share a grid")
        if self.topology is Topology.KINK:
            left = self.phi.values[0]
            right = self.phi.values[-1]
            # antikink tails sit at -2*pi; both signs are legitimate kinks
            if abs(left) > 1e-3 or abs(abs(right) - 2.0 * np.pi) > 1e-3:
                raise ValueError(
                    f"kink topology requires tails near 0 and +-2pi, "
                    f"got ({left:.3e}, {right:.3e})"
                )

    @property
    def grid(self) -> Grid:
        return self.phi.grid


# 4th-order finite difference stencils.  Interior: central 5-point.
# Boundaries: one-sided 5/6-point stencils of the same order.
_D1_INTERIOR = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D1_LEFT = [
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
]
_D2_INTERIOR = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_D2_LEFT = [
    np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0,
    np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0,
]


def spatial_derivative(f: Field, order: int) -> Field:
    """4th-order finite-difference d^k/dx^k, one-sided at the boundaries."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    v = f.values
    dx = f.grid.dx
    out = np.empty_like(v, dtype=complex if f.is_complex else float)
    if order == 1:
        interior, left, sign = _D1_INTERIOR, _D1_LEFT, -1.0
    else:
        interior, left, sign = _D2_INTERIOR, _D2_LEFT, 1.0
    half = len(interior) // 2
    out[half:-half] = sum(
        c * v[i : len(v) - (len(interior) - 1 - i)] for i, c in enumerate(interior)
    )
    for row, stencil in enumerate(left):
        m = len(stencil)
        out[row] = stencil @ v[:m]
        # mirrored one-sided stencil at the right boundary
        out[-1 - row] = sign * (stencil @ v[::-1][:m])
    out /= dx**order
    return Field(f.grid, out)


def _check_zero_topology(f: Field) -> None:
    jump = _kink_jump(f.values)
    scale = max(1.0, float(np.max(np.abs(f.values))))
    if jump > 1e-2 * scale + 1e-8:
        raise ValueError(
            f"field has a topological jump ({jump:.3e}) across the periodic "
            "wrap; spectral multipliers need zero topology"
        )


def bessel_multiplier(f: Field, l: float) -> Field:
    """<D>^l f via FFT with symbol (1+xi^2)^(l/2); zero-topology fields only."""
    _check_zero_topology(f)
    xi = 2.0 * np.pi * np.fft.fftfreq(f.grid.n, d=f.grid.dx)
    symbol = (1.0 + xi**2) ** (l / 2.0)
    out = np.fft.ifft(symbol * np.fft.fft(f.values))
    if not f.is_complex:
        out = out.real
    return Field(f.grid, out)


def inner_product(f: Field, g: Field) -> complex:
    """Trapezoid quadrature of f * conj(g) dx."""
    if f.grid != g.grid:
        raise ValueError("grid mismatch in inner_product")
    vals = f.values * np.conj(g.values)
    out = np.trapezoid(vals, dx=f.grid.dx)
    if not (f.is_complex or g.is_complex):
        return float(out.real) if np.iscomplexobj(out) else float(out)
    return complex(out)


# ---------------------------------------------------------------------------
# Norms


@dataclass(frozen=True)
class Lp:
    p: float

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError("p must lie in [1, inf]")


@dataclass(frozen=True)
class L2PlusLinf:
    pass


@dataclass(frozen=True)
class WeightedSobolev:
    m: float
    s: float

    def __post_init__(self):
        if self.m < 0 or self.s < 0:
            raise ValueError("m and s must be >= 0")


@dataclass(frozen=True)
class PairEnergy:
    """H1 x L2 size of a State relative to a reference State."""

    reference: State


NormSpec = Union[Lp, L2PlusLinf, WeightedSobolev, PairEnergy]


def _lp(values: np.ndarray, dx: float, p: float) -> float:
    a = np.abs(values)
    if np.isinf(p):
        return float(np.max(a))
    return float(np.trapezoid(a**p, dx=dx) ** (1.0 / p))


def _l2plus_linf(values: np.ndarray, dx: float) -> float:
    """min over lam >= 0 of ||(|g|-lam)_+||_2 + lam (clamped-split family).

    The objective is convex in lam; golden-section search on [0, max|g|].
    """
    a = np.abs(values)
    hi = float(np.max(a)) if a.size else 0.0
    if hi == 0.0:
        return 0.0

    def obj(lam: float) -> float:
        clipped = np.maximum(a - lam, 0.0)
        return float(np.sqrt(np.trapezoid(clipped**2, dx=dx))) + lam

    lo = 0.0
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = obj(c), obj(d)
    b_lo, b_hi = lo, hi
    for _ in range(90):
        if fc < fd:
            b_hi, d, fd = d, c, fc
            c = b_hi - invphi * (b_hi - b_lo)
            fc = obj(c)
        else:
            b_lo, c, fc = c, d, fd
            d = b_lo + invphi * (b_hi - b_lo)
            fd = obj(d)
    return min(obj(0.5 * (b_lo + b_hi)), obj(0.0), obj(hi))


def _weighted_sobolev(f: Field, m: float, s: float) -> float:
    x = f.grid.x
    weight = (1.0 + x**2) ** (s / 2.0)
    dx = f.grid.dx
    if float(m).is_integer():
        total = 0.0
        g = f
        for j in range(int(m) + 1):
            if j > 0:
                g = spatial_derivative(g, 1)
            total += _lp(weight * g.values, dx, 2.0)
        return total
    weighted = Field(f.grid, weight * f.values)
    return _lp(bessel_multiplier(weighted, m).values, dx, 2.0)


def _pair_energy(s: State, ref: State) -> float:
    if s.grid != ref.grid:
        raise ValueError("grid mismatch in PairEnergy")
    dphi = Field(s.grid, s.phi.values - ref.phi.values)
    dphi_t = s.phi_t.values - ref.phi_t.values
    dx = s.grid.dx
    h1_sq = (
        _lp(dphi.values, dx, 2.0) ** 2
        + _lp(spatial_derivative(dphi, 1).values, dx, 2.0) ** 2
    )
    return float(np.sqrt(h1_sq + _lp(dphi_t, dx, 2.0) ** 2))


def norm(x: Union[Field, State], spec: NormSpec) -> float:
    if isinstance(spec, PairEnergy):
        if not isinstance(x, State):
            raise TypeError("PairEnergy norm applies to a State")
        return _pair_energy(x, spec.reference)
    if not isinstance(x, Field):
        raise TypeError(f"expected Field for {type(spec).__name__} norm")
    if isinstance(spec, Lp):
        return _lp(x.values, x.grid.dx, spec.p)
    if isinstance(spec, L2PlusLinf):
        return _l2plus_linf(x.values, x.grid.dx)
    if isinstance(spec, WeightedSobolev):
        return _weighted_sobolev(x, spec.m, spec.s)
    raise TypeError(f"unknown norm spec {spec!r}")


# ---------------------------------------------------------------------------
# Serialization

_SGF_MAGIC = b"SGF1"


def save_field_csv(f: Field, path) -> None:
    x = f.grid.x
    if f.is_complex:
        header = "x,re,im"
        data = np.column_stack([x, f.values.real, f.values.imag])
    else:
        header = "x,value"
        data = np.column_stack([x, f.values])
    np.savetxt(path, data, delimiter=",", header=header, comments="")


def load_field_csv(path) -> Field:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x = data[:, 0]
    n = len(x)
    grid = make_grid(x[0], x[0] + n * (x[1] - x[0]), n)
    if data.shape[1] == 3:
        return Field(grid, data[:, 1] + 1j * data[:, 2])
    return Field(grid, data[:, 1].copy())


def save_field_sgf(f: Field, path) -> None:
    """Binary snapshot: magic 'SGF1', little-endian doubles throughout."""
    with open(path, "wb") as fh:
        fh.write(_SGF_MAGIC)
        fh.write(struct.pack("<BQdd", int(f.is_complex), f.grid.n,
                             f.grid.x_min, f.grid.x_max))
        if f.is_complex:
            data = np.empty(2 * f.grid.n)
            data[0::2] = f.values.real
            data[1::2] = f.values.imag
        else:
            data = np.asarray(f.values, dtype=float)
        fh.write(data.astype("<f8").tobytes())


def load_field_sgf(path) -> Field:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _SGF_MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {_SGF_MAGIC!r}")
        is_complex, n, x_min, x_max = struct.unpack("<BQdd", fh.read(25))
        count = 2 * n if is_complex else n
        data = np.frombuffer(fh.read(8 * count), dtype="<f8").astype(float)
    grid = make_grid(x_min, x_max, n)
    if is_complex:
        return Field(grid, data[0::2] + 1j * data[1::2])
    return Field(grid, data)
