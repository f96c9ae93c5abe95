"""Coherent-state phase densities, circular uncertainty, and sampling.

The phase density of a state phi under a phase matrix C is the trigonometric
polynomial v(theta)* C v(theta) with v_n = phi_n e^{-i n theta}; coherent
states make it a function of theta - arg z only.  Dispersion is measured by
the windowed second central moment minimized over the window center (the
circular substitute for variance), from which the phase-number uncertainty
products follow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .circle import CircleSet, circle_set
from .fock import StateVector, coherent_vector, truncation_for
from .matrices import PhaseMatrix, _trusted
from .observables import evaluate

__all__ = [
    "DensityGrid",
    "state_density",
    "density",
    "density_grid",
    "probability",
    "levy",
    "uncertainty_product",
    "concentration",
    "q_margin",
    "sample",
]

TWO_PI = 2.0 * math.pi
GRID_SIZE = 4096
SAMPLE_GRID_SIZE = 8192
IMAG_RESIDUE_TOL = 1e-10
TRUNCATION_TAIL = 1e-12


@dataclass(frozen=True)
class DensityGrid:
    """A phase density sampled on a uniform theta-grid over [0, 2pi)."""

    family: str
    z: complex
    thetas: np.ndarray = field()
    values: np.ndarray = field()

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if th.shape != vals.shape or th.ndim != 1 or th.size < 8:
            raise ValueError("thetas and values must be matching 1-d arrays")
        if vals.min() < -1e-10:
            raise ValueError(f"density has negative values (min {vals.min():.3e})")
        if abs(_grid_mean(vals) - 1.0) > 1e-6:
            raise ValueError(
                f"density is not normalized (integral/2pi = {_grid_mean(vals):.8f})"
            )
        th.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.thetas.size


def _grid_mean(values) -> float:
    # periodic trapezoid rule on a uniform grid reduces to the mean
    return float(np.mean(values))


def _restricted(pm: PhaseMatrix, z: complex, dim: Optional[int]) -> PhaseMatrix:
    """The matrix cut down to a working truncation adequate for |z|."""
    needed = truncation_for(z, TRUNCATION_TAIL)
    eff = pm.dim if dim is None else int(dim)
    if eff > pm.dim:
        raise ValueError(f"dim {eff} exceeds the matrix truncation {pm.dim}")
    if eff < needed:
        raise ValueError(
            f"dim {eff} is insufficient for |z| = {abs(z):.3f} (need >= {needed})"
        )
    if eff == pm.dim:
        return pm
    # principal submatrices of a phase matrix are phase matrices
    return _trusted(pm.entries[:eff, :eff], family=pm.family)


def state_density(pm: PhaseMatrix, phi: StateVector, thetas) -> np.ndarray:
    """Phase density of an arbitrary state: sum c_{n,m} conj(phi_n) phi_m e^{i(n-m)theta}."""
    if phi.dim > pm.dim:
        raise ValueError("state dimension exceeds the matrix truncation")
    th = np.atleast_1d(np.asarray(thetas, dtype=float))
    dim = phi.dim
    c = pm.entries[:dim, :dim]
    v = phi.amps[:, None] * np.exp(-1j * np.outer(np.arange(dim), th))
    vals = np.einsum("nt,nm,mt->t", v.conj(), c, v)
    if np.abs(vals.imag).max() > IMAG_RESIDUE_TOL:
        raise ArithmeticError(
            f"density has imaginary residue {np.abs(vals.imag).max():.3e}"
        )
    return vals.real


def density(pm: PhaseMatrix, z: complex, thetas, dim: Optional[int] = None):
    """Coherent-state phase density, normalizing factor e^{-|z|^2} included.

    Scalar theta in, scalar out; array in, array out.
    """
    sub = _restricted(pm, z, dim)
    vals = state_density(sub, coherent_vector(z, sub.dim), thetas)
    return float(vals[0]) if np.isscalar(thetas) else vals


def density_grid(
    pm: PhaseMatrix, z: complex, dim: Optional[int] = None, size: int = GRID_SIZE
) -> DensityGrid:
    """Sample the coherent-state density on a uniform grid of the given size."""
    th = TWO_PI * np.arange(size) / size
    vals = density(pm, z, th, dim=dim)
    return DensityGrid(family=pm.family or "custom", z=complex(z), thetas=th, values=vals)


def probability(pm: PhaseMatrix, z: complex, x: CircleSet, dim: Optional[int] = None) -> float:
    """p(X) = <z|E(X)|z> at truncation (the closed form, no grid integration)."""
    sub = _restricted(pm, z, dim)
    op = evaluate(sub, x)
    phi = coherent_vector(z, sub.dim)
    val = complex(np.vdot(phi.amps, op.entries @ phi.amps))
    if abs(val.imag) > IMAG_RESIDUE_TOL:
        raise ArithmeticError(f"probability has imaginary residue {val.imag:.3e}")
    return float(val.real)


def _wrap_pm(x):
    """Wrap angles into [-pi, pi)."""
    return (x + math.pi) % TWO_PI - math.pi


def _window_moment(thetas: np.ndarray, values: np.ndarray, alpha: float) -> float:
    """h(alpha): windowed second central moment about the window mean."""
    d = _wrap_pm(thetas - alpha)
    beta = float(np.mean(d * values))
    return float(np.mean((d - beta) ** 2 * values))


def levy(grid: DensityGrid) -> float:
    """Windowed-variance dispersion: inf over window centers alpha of h(alpha).

    For each alpha the optimal reference point is the window mean, so h(alpha)
    reduces to a pair of circular correlations of the density with fixed
    kernels; these are evaluated on the full grid of alphas at once, then the
    best bracket is refined by golden section to width 1e-8.
    """
    if abs(_grid_mean(grid.values) - 1.0) > 1e-6:
        raise ValueError("density grid is not normalized")
    th, g = grid.thetas, grid.values
    size = grid.size
    k1 = _wrap_pm(th)
    fg = np.fft.fft(g)
    corr1 = np.real(np.fft.ifft(fg * np.conj(np.fft.fft(k1)))) / size
    corr2 = np.real(np.fft.ifft(fg * np.conj(np.fft.fft(k1**2)))) / size
    h = corr2 - corr1**2
    k0 = int(np.argmin(h))
    best = float(h[k0])

    spacing = TWO_PI / size
    lo = th[k0] - spacing
    hi = th[k0] + spacing
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - ratio * (hi - lo)
    d = lo + ratio * (hi - lo)
    fc = _window_moment(th, g, c)
    fd = _window_moment(th, g, d)
    while hi - lo > 1e-8:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - ratio * (hi - lo)
            fc = _window_moment(th, g, c)
        else:
            lo, c, fc = c, d, fd
            d = lo + ratio * (hi - lo)
            fd = _window_moment(th, g, d)
    return min(best, fc, fd)


def uncertainty_product(
    pm: PhaseMatrix, z: complex, dim: Optional[int] = None, size: int = GRID_SIZE
) -> float:
    """sqrt(levy(g)) * |z|: phase dispersion times the coherent number spread."""
    if abs(z) <= 0:
        raise ValueError("uncertainty product needs |z| > 0")
    grid = density_grid(pm, z, dim=dim, size=size)
    return math.sqrt(levy(grid)) * abs(z)


def concentration(pm: PhaseMatrix, z: complex, eps: float, dim: Optional[int] = None) -> float:
    """Probability mass within eps of arg z."""
    if not 0.0 < eps < math.pi:
        raise ValueError("eps must lie in (0, pi)")
    arg = float(np.angle(z)) if z != 0 else 0.0
    return probability(pm, z, circle_set((arg - eps, arg + eps)), dim=dim)


def q_margin(phi: StateVector, thetas, nodes_per_panel: int = 64):
    """Angle margin of |<r e^{i theta}|phi>|^2: the radial integral d(r^2).

    Evaluated by panelwise Gauss-Legendre in r (weight 2r dr); for coherent
    phi this agrees with the coherent density of the ground-state phase-space
    matrix, and in general with its state density.
    """
    if not phi.is_unit(1e-10):
        raise ValueError("phi must be a unit vector")
    th = np.atleast_1d(np.asarray(thetas, dtype=float))
    dim = phi.dim
    u_max = dim + 12.0 * math.sqrt(dim) + 48.0
    r_max = math.ceil(math.sqrt(u_max))
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    rs = np.concatenate([(x + 1.0) / 2.0 + p for p in range(r_max)])
    ws = np.tile(w / 2.0, r_max) * 2.0 * rs
    n = np.arange(dim)
    log_r = np.log(rs)
    radial = np.exp(-np.add.outer(rs**2 / 2.0, 0.5 * gammaln(n + 1.0)) + np.outer(log_r, n))
    modes = phi.amps[:, None] * np.exp(-1j * np.outer(n, th))
    amps = radial @ modes
    vals = ws @ (np.abs(amps) ** 2)
    return float(vals[0]) if np.isscalar(thetas) else vals


def sample(
    pm: PhaseMatrix,
    z: complex,
    count: int,
    seed: int,
    dim: Optional[int] = None,
    size: int = SAMPLE_GRID_SIZE,
) -> np.ndarray:
    """Draw i.i.d. phase outcomes by inverse CDF on a fine grid.

    The CDF is piecewise linear between grid nodes, inverted by linear
    interpolation; the generator is private to the call, so a fixed seed
    reproduces the draws exactly.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    grid = density_grid(pm, z, dim=dim, size=size)
    step = TWO_PI / size
    masses = grid.values * (step / TWO_PI)
    cdf = np.concatenate([[0.0], np.cumsum(masses)])
    if cdf[-1] <= 0:
        raise ValueError("degenerate density grid")
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    u = rng.random(count)
    idx = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, size - 1)
    seg = cdf[idx + 1] - cdf[idx]
    frac = np.where(seg > 0, (u - cdf[idx]) / np.where(seg > 0, seg, 1.0), 0.0)
    return grid.thetas[idx] + frac * step
