"""Covariant phase observables evaluated from phase matrices.

The observable attached to a phase matrix (c_{n,m}) assigns to each circle
set X the operator with entries c_{n,m} f_{n-m}(X), where f_k is the exact
Fourier coefficient of X.  This module evaluates those operators, their
polynomial and cyclic moments, and the residuals that certify (or, for the
deliberate counterexample, refute) shift covariance, strongness, and the
number-shift property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circle import CircleSet, fourier_coeff, moment_coeff, shift
from .fock import Operator, number_phases
from .matrices import PhaseMatrix

__all__ = [
    "evaluate",
    "shift_residual",
    "covariance_residual",
    "counterexample_F",
    "moment_operator",
    "matrix_from_first_moment",
    "VarianceResult",
    "first_moment_variance",
    "cyclic_moment",
    "StrongnessReport",
    "is_strong",
    "number_shift_check",
]


def _coeff_table(x: CircleSet, dim: int) -> np.ndarray:
    """f_{n-m}(X) arranged as a dim x dim array."""
    ks = np.arange(-(dim - 1), dim)
    table = np.array([fourier_coeff(x, int(k)) for k in ks])
    idx = np.subtract.outer(np.arange(dim), np.arange(dim)) + (dim - 1)
    return table[idx]


def evaluate(pm: PhaseMatrix, x: CircleSet) -> Operator:
    """The observable's operator on X: entries c_{n,m} f_{n-m}(X)."""
    return Operator(pm.entries * _coeff_table(x, pm.dim))


def shift_residual(e_x: Operator, e_shifted: Operator, theta: float) -> float:
    """Operator norm of R(theta) E(X) R(theta)* - E(X + theta)."""
    if e_x.dim != e_shifted.dim:
        raise ValueError("dimension mismatch")
    phases = number_phases(theta, e_x.dim)
    rotated = phases[:, None] * e_x.entries * phases.conj()[None, :]
    return float(np.linalg.norm(rotated - e_shifted.entries, 2))


def covariance_residual(pm: PhaseMatrix, x: CircleSet, theta: float) -> float:
    """Covariance defect of the observable at (X, theta); ~0 for any valid pm."""
    return shift_residual(evaluate(pm, x), evaluate(pm, shift(x, theta)), theta)


def counterexample_F(x: CircleSet, dim: int) -> Operator:
    """The uniform-in-number-states POM that is not shift covariant.

    F(X) = (|X|/2pi) I + (1/2pi)(int_X sin) (|0><1| + |1><0|); the sine
    integral over [a,b) is cos a - cos b, summed over the intervals.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    sin_integral = sum(math.cos(a) - math.cos(b) for a, b in x.intervals)
    entries = (x.measure / (2.0 * math.pi)) * np.eye(dim, dtype=complex)
    entries[0, 1] += sin_integral / (2.0 * math.pi)
    entries[1, 0] += sin_integral / (2.0 * math.pi)
    return Operator(entries)


def moment_operator(pm: PhaseMatrix, p: int) -> Operator:
    """The p-th polynomial moment of the observable, p in {1, 2}."""
    dim = pm.dim
    ks = np.arange(-(dim - 1), dim)
    table = np.array([moment_coeff(p, int(k)) for k in ks])
    idx = np.subtract.outer(np.arange(dim), np.arange(dim)) + (dim - 1)
    return Operator(pm.entries * table[idx])


def matrix_from_first_moment(e1: Operator) -> np.ndarray:
    """Recover the phase matrix from the first moment: c_{n,m} = <n|E1|m> i(n-m)."""
    dim = e1.dim
    diff = np.subtract.outer(np.arange(dim), np.arange(dim))
    out = e1.entries * (1j * diff)
    np.fill_diagonal(out, 1.0)
    return out


@dataclass(frozen=True)
class VarianceResult:
    """First-moment variance in a number state, computed two ways."""

    operator_form: float
    series_form: float
    tail_bound: float

    @property
    def agreement(self) -> float:
        return abs(self.operator_form - self.series_form)

    @property
    def value(self) -> float:
        return self.series_form


def first_moment_variance(pm: PhaseMatrix, n: int) -> VarianceResult:
    """<n|E1^2|n> - <n|E1|n>^2 via the operator square and via the series.

    The series form is sum_{m != n} |c_{n,m}|^2 / (n-m)^2.  The appended tail
    bound dominates the part of the series lost to truncation (|c| <= 1).
    """
    dim = pm.dim
    if not 0 <= n < dim:
        raise ValueError("n out of range")
    e1 = moment_operator(pm, 1)
    row = e1.entries[n, :]
    operator_form = float(np.real(row @ e1.entries[:, n]) - np.real(e1.entries[n, n]) ** 2)
    m = np.arange(dim)
    mask = m != n
    series = float(np.sum(np.abs(pm.entries[n, mask]) ** 2 / (n - m[mask]) ** 2))
    tail = 1.0 / (dim - 1 - n) if n < dim - 1 else 1.0
    return VarianceResult(operator_form=operator_form, series_form=series, tail_bound=tail)


def cyclic_moment(pm: PhaseMatrix, k: int) -> Operator:
    """V_k: only the k-th superdiagonal c_{n,n+k} survives the circle integral."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k >= pm.dim:
        raise ValueError("k must be below the truncation")
    out = np.zeros((pm.dim, pm.dim), dtype=complex)
    n = np.arange(pm.dim - k)
    out[n, n + k] = pm.entries[n, n + k]
    return Operator(out)


@dataclass(frozen=True)
class StrongnessReport:
    passed: bool
    failing_k: Optional[int]
    residual: float


def is_strong(pm: PhaseMatrix, kmax: Optional[int] = None, tol: float = 1e-10) -> StrongnessReport:
    """Check V_k = (V_1)^k on the interior block for k <= kmax.

    The last k rows and columns are excluded: the power (V_1)^k loses k basis
    states at truncation, which is an artifact of the cutoff rather than a
    property of the observable.  On failure reports the smallest failing k
    and its residual.
    """
    dim = pm.dim
    if kmax is None:
        kmax = dim // 4
    if kmax >= dim:
        raise ValueError("kmax must be below the truncation")
    v1 = cyclic_moment(pm, 1).entries
    power = np.eye(dim, dtype=complex)
    worst = 0.0
    for k in range(1, kmax + 1):
        power = power @ v1
        diff = cyclic_moment(pm, k).entries - power
        interior = diff[: dim - k, : dim - k]
        residual = float(np.linalg.norm(interior, 2))
        worst = max(worst, residual)
        if residual > tol:
            return StrongnessReport(passed=False, failing_k=k, residual=residual)
    return StrongnessReport(passed=True, failing_k=None, residual=worst)


def number_shift_check(pm: PhaseMatrix, kmax: Optional[int] = None, tol: float = 1e-10) -> bool:
    """True iff every retained superdiagonal entry has unit modulus.

    Then V_k maps |n+k> to a unit-modulus phase times |n>, the shift action
    characteristic of the canonical family and its diagonal rotations.
    """
    dim = pm.dim
    if kmax is None:
        kmax = dim // 4
    if kmax >= dim:
        raise ValueError("kmax must be below the truncation")
    for k in range(1, kmax + 1):
        n = np.arange(dim - k)
        if np.abs(np.abs(pm.entries[n, n + k]) - 1.0).max() > tol:
            return False
    return True
