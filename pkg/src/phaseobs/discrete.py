"""Discrete covariant phase measures on the uniform grid 2 pi k / (s+1).

Covers the orthonormal phase states spanning the (s+1)-dimensional
truncation, the general point-operator families R(theta_l) A R(theta_l)*/(s+1)
on an arbitrary index set J, the projection-valuedness classification, and
the harness that measures how fast the discrete measures approach their
continuum counterparts as the grid refines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circle import CircleSet, fourier_coeff
from .fock import Operator, StateVector
from .matrices import PhaseMatrix

__all__ = [
    "DiscretePhasePOM",
    "DiscretePOMError",
    "AValidationReport",
    "grid_points",
    "pb_state",
    "pb_canonical",
    "make_discrete_pom",
    "validate_A",
    "point_operator",
    "discrete_covariance_residual",
    "ProjectionClassification",
    "is_projection_valued",
    "accumulate",
    "restrict_phase_matrix",
    "convergence_error",
    "spectral_accuracy",
]

TWO_PI = 2.0 * math.pi
PSD_TOL = 1e-10
DIAG_TOL = 1e-12
ZERO_PATTERN_TOL = 1e-12


def grid_points(s: int) -> np.ndarray:
    """The s+1 outcome angles 2 pi k / (s+1)."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    return TWO_PI * np.arange(s + 1) / (s + 1)


def pb_state(s: int, k: int) -> StateVector:
    """The discrete phase state (s+1)^{-1/2} sum_n e^{i n theta_{s,k}} |n>."""
    if not 0 <= k <= s:
        raise ValueError("k must satisfy 0 <= k <= s")
    n = np.arange(s + 1)
    theta = TWO_PI * k / (s + 1)
    return StateVector(np.exp(1j * n * theta) / math.sqrt(s + 1))


class DiscretePOMError(ValueError):
    def __init__(self, report: "AValidationReport"):
        super().__init__(f"invalid discrete POM operator: {report.failures()}")
        self.report = report


@dataclass(frozen=True)
class AValidationReport:
    psd: bool
    unit_diagonal: bool
    zero_pattern: bool
    min_eigenvalue: float
    diagonal_defect: float
    violating_pairs: tuple[tuple[int, int], ...]

    @property
    def passed(self) -> bool:
        return self.psd and self.unit_diagonal and self.zero_pattern

    def failures(self) -> list[str]:
        out = []
        if not self.psd:
            out.append(f"psd (min eigenvalue {self.min_eigenvalue:.3e})")
        if not self.unit_diagonal:
            out.append(f"unit_diagonal (defect {self.diagonal_defect:.3e})")
        if not self.zero_pattern:
            out.append(f"zero_pattern (pairs {list(self.violating_pairs)})")
        return out

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "psd": self.psd,
            "unit_diagonal": self.unit_diagonal,
            "zero_pattern": self.zero_pattern,
            "min_eigenvalue": self.min_eigenvalue,
            "diagonal_defect": self.diagonal_defect,
            "violating_pairs": [list(p) for p in self.violating_pairs],
        }


def validate_A(J: Sequence[int], s: int, A: np.ndarray) -> AValidationReport:
    """Check the admissibility of A on the index set J at grid order s.

    Positivity, unit diagonal, and the support condition: a nonzero
    off-diagonal entry at (n, m) is forbidden whenever |n - m| is a positive
    multiple of s + 1 (those frequencies alias to the diagonal on the grid,
    breaking the resolution of the identity).
    """
    Js = sorted(set(int(n) for n in J))
    A = np.asarray(A, dtype=complex)
    if A.shape != (len(Js), len(Js)):
        raise ValueError("A must be square and indexed by J")
    herm_defect = float(np.abs(A - A.conj().T).max())
    if herm_defect <= 1e-10:
        min_eig = float(np.linalg.eigvalsh(A)[0])
    else:
        min_eig = -math.inf
    diag_defect = float(np.abs(np.diag(A) - 1.0).max())
    bad: list[tuple[int, int]] = []
    for i, n in enumerate(Js):
        for j, m in enumerate(Js):
            if n == m:
                continue
            if abs(A[i, j]) > ZERO_PATTERN_TOL and (n - m) % (s + 1) == 0:
                if (m, n) not in bad:
                    bad.append((n, m))
    return AValidationReport(
        psd=min_eig >= -PSD_TOL * len(Js),
        unit_diagonal=diag_defect <= DIAG_TOL,
        zero_pattern=not bad,
        min_eigenvalue=min_eig,
        diagonal_defect=diag_defect,
        violating_pairs=tuple(bad),
    )


@dataclass(frozen=True)
class DiscretePhasePOM:
    """A covariant discrete phase measure: grid order s, index set J, operator A."""

    s: int
    J: tuple[int, ...]
    A: np.ndarray = field()

    def __post_init__(self):
        Js = tuple(sorted(set(int(n) for n in self.J)))
        arr = np.array(self.A, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "J", Js)
        object.__setattr__(self, "A", arr)

    @property
    def npoints(self) -> int:
        return self.s + 1

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "J": list(self.J),
            "A": [[z.real, z.imag] for z in self.A.ravel()],
        }

    @staticmethod
    def from_dict(data: dict) -> "DiscretePhasePOM":
        J = tuple(int(n) for n in data["J"])
        k = len(J)
        ent = np.array(data["A"], dtype=float)
        if ent.shape != (k * k, 2):
            raise ValueError("A entry count does not match J")
        A = (ent[:, 0] + 1j * ent[:, 1]).reshape(k, k)
        return make_discrete_pom(J, int(data["s"]), A)


def make_discrete_pom(J: Sequence[int], s: int, A: np.ndarray) -> DiscretePhasePOM:
    """Validate A and wrap it; rejection names the violated condition."""
    report = validate_A(J, s, A)
    if not report.passed:
        raise DiscretePOMError(report)
    return DiscretePhasePOM(s=s, J=tuple(sorted(set(int(n) for n in J))), A=np.asarray(A, dtype=complex))


def pb_canonical(s: int) -> DiscretePhasePOM:
    """All-ones A on J = {0..s}: the rank-one projections onto the phase states."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    return DiscretePhasePOM(s=s, J=tuple(range(s + 1)), A=np.ones((s + 1, s + 1), dtype=complex))


def _grid_phases(pom: DiscretePhasePOM, l: int) -> np.ndarray:
    theta = TWO_PI * l / (pom.s + 1)
    return np.exp(1j * theta * np.array(pom.J))


def point_operator(pom: DiscretePhasePOM, l: int) -> Operator:
    """E({theta_{s,l}}) = R(theta_l) A R(theta_l)* / (s+1), indexed by J."""
    if not 0 <= l <= pom.s:
        raise ValueError("l must satisfy 0 <= l <= s")
    ph = _grid_phases(pom, l)
    return Operator(ph[:, None] * pom.A * ph.conj()[None, :] / (pom.s + 1))


def discrete_covariance_residual(pom: DiscretePhasePOM, k: int, l: int) -> float:
    """Norm of R(theta_k) E({theta_l}) R(theta_k)* - E({theta_{k+l}})."""
    if not (0 <= k <= pom.s and 0 <= l <= pom.s):
        raise ValueError("k, l must lie in 0..s")
    ph = _grid_phases(pom, k)
    lhs = ph[:, None] * point_operator(pom, l).entries * ph.conj()[None, :]
    rhs = point_operator(pom, (k + l) % (pom.s + 1)).entries
    return float(np.linalg.norm(lhs - rhs, 2))


@dataclass(frozen=True)
class ProjectionClassification:
    projection_valued: bool
    rank_one_phase: bool
    cardinality_matches: bool
    phases: Optional[np.ndarray]

    def to_dict(self) -> dict:
        return {
            "projection_valued": self.projection_valued,
            "rank_one_phase": self.rank_one_phase,
            "cardinality_matches": self.cardinality_matches,
            "phases": None if self.phases is None else list(map(float, self.phases)),
        }


def _rank_one_phase_angles(A: np.ndarray, tol: float) -> Optional[np.ndarray]:
    if np.abs(np.abs(A) - 1.0).max() > tol:
        return None
    u = np.mod(-np.angle(A[0, :]), TWO_PI)
    u[0] = 0.0
    predicted = np.exp(1j * u)[:, None] * np.exp(-1j * u)[None, :]
    if np.abs(A - predicted).max() > tol:
        return None
    return u


def is_projection_valued(pom: DiscretePhasePOM, tol: float = 1e-10) -> ProjectionClassification:
    """Idempotence of every point operator, cross-checked against structure.

    The direct check (all E({theta_l})^2 = E({theta_l}) to tol) must coincide
    with the structural one (A has unit-modulus consistent phases and
    #J = s+1); a mismatch would be an internal error and raises.
    """
    idempotent = True
    for l in range(pom.s + 1):
        e = point_operator(pom, l).entries
        if np.abs(e @ e - e).max() > tol:
            idempotent = False
            break
    phases = _rank_one_phase_angles(pom.A, math.sqrt(tol))
    structural = phases is not None and len(pom.J) == pom.s + 1
    if idempotent != structural:
        raise RuntimeError(
            "projection classification mismatch: "
            f"idempotent={idempotent}, rank_one_phase={phases is not None}, "
            f"#J={len(pom.J)}, s+1={pom.s + 1}"
        )
    return ProjectionClassification(
        projection_valued=idempotent,
        rank_one_phase=phases is not None,
        cardinality_matches=len(pom.J) == pom.s + 1,
        phases=phases,
    )


def accumulate(pom: DiscretePhasePOM, x: CircleSet, ambient_dim: int) -> Operator:
    """Sum the point operators whose grid angle lies in X, zero-padded.

    Membership is the half-open test on the grid angle after one modular
    reduction; ties at an upper endpoint are excluded.
    """
    if ambient_dim <= max(pom.J):
        raise ValueError("ambient_dim must exceed every index in J")
    out = np.zeros((ambient_dim, ambient_dim), dtype=complex)
    idx = np.array(pom.J)
    angles = grid_points(pom.s)
    for l in range(pom.s + 1):
        if x.contains(angles[l]):
            out[np.ix_(idx, idx)] += point_operator(pom, l).entries
    return Operator(out)


def restrict_phase_matrix(pm: PhaseMatrix, s: int) -> DiscretePhasePOM:
    """The grid-order-s discretization of a phase matrix: A = (c_{n,m})_{n,m<=s}.

    J = {0..min(s, N-1)}, so the support condition holds vacuously.
    """
    top = min(s, pm.dim - 1)
    J = tuple(range(top + 1))
    return DiscretePhasePOM(s=s, J=J, A=pm.entries[: top + 1, : top + 1])


def convergence_error(pm: PhaseMatrix, s: int, x: CircleSet, n: int, m: int) -> float:
    """Entrywise gap between the grid-order-s discretization and the limit.

    |<n|E_{J(s),s}(X)|m> - c_{n,m} f_{n-m}(X)|: the Riemann-sum error of the
    discrete Fourier coefficient over the grid points lying in X.
    """
    top = min(s, pm.dim - 1)
    if not (0 <= n <= top and 0 <= m <= top):
        raise ValueError("n, m must lie in the discretized index range")
    angles = grid_points(s)
    inside = np.array([x.contains(t) for t in angles])
    discrete = np.exp(1j * (n - m) * angles[inside]).sum() / (s + 1)
    exact = fourier_coeff(x, n - m)
    return float(abs(pm.entries[n, m] * (discrete - exact)))


def spectral_accuracy(s: int, x: CircleSet) -> float:
    """sup over theta in [a,b) of the circle distance to the nearest grid point.

    The grid is the full uniform lattice of spacing 2 pi/(s+1), so the
    distance function is a triangle wave with peak half the spacing; the
    supremum is attained at an interior peak if the interval contains one,
    else at an endpoint.  Computed exactly from the geometry.
    """
    if len(x.intervals) != 1:
        raise ValueError("spectral accuracy is defined for a single interval")
    a, b = x.intervals[0]
    spacing = TWO_PI / (s + 1)
    half = spacing / 2.0

    def dist(theta: float) -> float:
        r = theta % spacing
        return min(r, spacing - r)

    if b - a >= spacing:
        return half
    # does [a, b) contain an odd multiple of half the spacing?
    k = math.ceil((a - half) / spacing)
    peak = half + k * spacing
    if a <= peak < b:
        return half
    return max(dist(a), dist(b))
