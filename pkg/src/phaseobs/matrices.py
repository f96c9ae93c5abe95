"""Construction and validation of phase matrices.

A phase matrix is a positive-semidefinite complex matrix with unit diagonal;
at truncation N it completely parameterizes a covariant phase observable.
This module builds the named families (canonical, trivial, diagonally
rotated, phase-space), converts between the equivalent representations
(Gram matrices of unit vectors, sums of bra-form outer products), and
decides when a matrix comes from a single generalized state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .fock import StateVector, displacement_columns

__all__ = [
    "PhaseMatrix",
    "ValidationReport",
    "PhaseMatrixError",
    "QuadratureConfig",
    "QuadratureError",
    "BraForm",
    "validate",
    "canonical",
    "trivial",
    "diagonal_conjugate",
    "from_vectors",
    "from_bra_forms",
    "phase_space_matrix",
    "rank_one_phases",
    "realize_vectors",
    "random_phase_matrix",
]

HERMITIAN_TOL = 1e-10
DIAG_TOL = 1e-12
PSD_TOL = 1e-10
ENTRY_BOUND_TOL = 1e-10


class PhaseMatrixError(ValueError):
    """Raised when a candidate matrix fails phase-matrix validation."""

    def __init__(self, report: "ValidationReport"):
        super().__init__(f"not a phase matrix: {report.failures()}")
        self.report = report


@dataclass(frozen=True)
class ValidationReport:
    hermitian: bool
    unit_diagonal: bool
    psd: bool
    bounded_entries: bool
    hermitian_defect: float
    diagonal_defect: float
    min_eigenvalue: float
    max_abs_entry: float

    @property
    def passed(self) -> bool:
        return self.hermitian and self.unit_diagonal and self.psd and self.bounded_entries

    def failures(self) -> list[str]:
        out = []
        if not self.hermitian:
            out.append(f"hermitian (defect {self.hermitian_defect:.3e})")
        if not self.unit_diagonal:
            out.append(f"unit_diagonal (defect {self.diagonal_defect:.3e})")
        if not self.psd:
            out.append(f"psd (min eigenvalue {self.min_eigenvalue:.3e})")
        if not self.bounded_entries:
            out.append(f"bounded_entries (max |entry| {self.max_abs_entry:.6f})")
        return out

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "hermitian": self.hermitian,
            "unit_diagonal": self.unit_diagonal,
            "psd": self.psd,
            "bounded_entries": self.bounded_entries,
            "hermitian_defect": self.hermitian_defect,
            "diagonal_defect": self.diagonal_defect,
            "min_eigenvalue": self.min_eigenvalue,
            "max_abs_entry": self.max_abs_entry,
        }


def validate(entries: np.ndarray) -> ValidationReport:
    """Check the phase-matrix conditions and report the worst violations."""
    c = np.asarray(entries, dtype=complex)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("a phase matrix must be square")
    dim = c.shape[0]
    herm_defect = float(np.abs(c - c.conj().T).max())
    diag_defect = float(np.abs(np.diag(c) - 1.0).max())
    max_abs = float(np.abs(c).max())
    hermitian = herm_defect <= HERMITIAN_TOL
    if hermitian:
        min_eig = float(np.linalg.eigvalsh(c)[0])
    else:
        min_eig = float(np.linalg.eigvalsh((c + c.conj().T) / 2)[0])
    return ValidationReport(
        hermitian=hermitian,
        unit_diagonal=diag_defect <= DIAG_TOL,
        psd=hermitian and min_eig >= -PSD_TOL * dim,
        bounded_entries=max_abs <= 1.0 + ENTRY_BOUND_TOL,
        hermitian_defect=herm_defect,
        diagonal_defect=diag_defect,
        min_eigenvalue=min_eig,
        max_abs_entry=max_abs,
    )


@dataclass(frozen=True)
class PhaseMatrix:
    """Unit-diagonal PSD matrix (c_{n,m}); rejected at construction if invalid."""

    entries: np.ndarray = field()
    family: Optional[str] = None

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        report = validate(arr)
        if not report.passed:
            raise PhaseMatrixError(report)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "entries": [[z.real, z.imag] for z in self.entries.ravel()],
        }
        if self.family is not None:
            out["family"] = self.family
        return out

    @staticmethod
    def from_dict(data: dict) -> "PhaseMatrix":
        dim = int(data["dim"])
        ent = np.array(data["entries"], dtype=float)
        if ent.shape != (dim * dim, 2):
            raise ValueError("entry count does not match dim")
        return PhaseMatrix(
            (ent[:, 0] + 1j * ent[:, 1]).reshape(dim, dim),
            family=data.get("family"),
        )


def _trusted(entries: np.ndarray, family: Optional[str] = None) -> PhaseMatrix:
    """Wrap entries known valid by construction, skipping the O(N^3) check.

    Only for provably PSD unit-diagonal products (all-ones, identity, Gram
    matrices, unitary-diagonal congruences); anything parsed or computed
    numerically goes through the validating constructor.
    """
    pm = object.__new__(PhaseMatrix)
    arr = np.array(entries, dtype=complex)
    arr.setflags(write=False)
    object.__setattr__(pm, "entries", arr)
    object.__setattr__(pm, "family", family)
    return pm


def canonical(dim: int) -> PhaseMatrix:
    """The all-ones matrix: the canonical phase observable."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return _trusted(np.ones((dim, dim), dtype=complex), family="canonical")


def trivial(dim: int) -> PhaseMatrix:
    """The identity matrix: the trivial (uniform, uncorrelated) phase."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return _trusted(np.eye(dim, dtype=complex), family="trivial")


def diagonal_conjugate(pm: PhaseMatrix, upsilon: Sequence[float]) -> PhaseMatrix:
    """Entries e^{i(u_n - u_m)} c_{n,m}: conjugation by a number-diagonal unitary."""
    u = np.asarray(upsilon, dtype=float)
    if u.shape != (pm.dim,):
        raise ValueError("upsilon must have one angle per basis state")
    phases = np.exp(1j * u)
    entries = phases[:, None] * pm.entries * phases.conj()[None, :]
    np.fill_diagonal(entries, 1.0)
    return _trusted(entries, family="rotated" if pm.family == "canonical" else None)


def from_vectors(vectors: Sequence[StateVector], unit_tol: float = 1e-10) -> PhaseMatrix:
    """Gram matrix c_{n,m} = <psi_n|psi_m> of a sequence of unit vectors."""
    if not vectors:
        raise ValueError("need at least one vector")
    dim0 = vectors[0].dim
    for i, v in enumerate(vectors):
        if v.dim != dim0:
            raise ValueError("vectors must share a common dimension")
        if not v.is_unit(unit_tol):
            raise ValueError(f"vector {i} is not unit (norm {v.norm():.12f})")
    mat = np.array([v.amps for v in vectors])
    gram = mat.conj() @ mat.T
    np.fill_diagonal(gram, 1.0)
    return _trusted(gram)


@dataclass(frozen=True)
class BraForm:
    """A bra form on the index set J, stored as its values on the kets |n>."""

    coeffs: dict[int, complex] = field(default_factory=dict)

    def value(self, n: int) -> complex:
        return complex(self.coeffs.get(n, 0.0))


def from_bra_forms(forms: Sequence[BraForm], index_set: Sequence[int]) -> np.ndarray:
    """d_{n,m} = sum_k conj(F_k[n]) F_k[m]; PSD by construction.

    Returns the bare matrix (indexed by the sorted index set): the diagonal
    need not be 1, so the caller decides whether it is a phase matrix.
    """
    J = sorted(set(int(n) for n in index_set))
    table = np.array([[f.value(n) for n in J] for f in forms], dtype=complex)
    return table.conj().T @ table


@dataclass(frozen=True)
class QuadratureConfig:
    """Radial Gauss-Legendre settings for the phase-space matrices."""

    nodes_per_panel: int = 64
    tol: float = 1e-9
    max_refinements: int = 2


class QuadratureError(RuntimeError):
    def __init__(self, residual: float, tol: float):
        super().__init__(
            f"radial quadrature did not converge: residual {residual:.3e} > tol {tol:.3e}"
        )
        self.residual = residual


def _phase_space_closed_form(dim: int) -> np.ndarray:
    n = np.arange(dim)
    npm = np.add.outer(n, n)
    log_fact = gammaln(n + 1.0)
    return np.exp(gammaln(npm / 2.0 + 1.0) - 0.5 * (log_fact[:, None] + log_fact[None, :]))


def _radial_support(dim: int, s: int) -> tuple[float, int]:
    """Integration cutoff (in u = r^2) and eigensolve guard dimension.

    The integrand magnitude behaves like a Poisson(u) term of index ~dim+s,
    so u beyond dim+s+O(sqrt(dim+s)) contributes nothing; the guard keeps the
    displaced state comfortably inside the truncated space for every node.
    """
    k = dim + s
    u_max = k + 12.0 * math.sqrt(k) + 48.0
    guard = math.ceil(u_max + 14.0 * math.sqrt(u_max)) + 32 + s
    return u_max, guard


def _phase_space_quadrature(s: int, dim: int, nodes_per_panel: int) -> np.ndarray:
    """c_{n,m} = integral of <n|D(r)|s> conj(<m|D(r)|s>) d(r^2).

    The integral is taken in r (weight 2r dr) on unit panels: the columns of
    D(r) are entire in r, so panelwise Gauss-Legendre converges spectrally,
    whereas nodes placed in u = r^2 stall on the sqrt(u) branch point that
    odd n - s entries carry.
    """
    u_max, guard = _radial_support(dim, s)
    r_max = math.ceil(math.sqrt(u_max))
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    rs = np.concatenate([(x + 1.0) / 2.0 + p for p in range(r_max)])
    ws = np.tile(w / 2.0, r_max) * 2.0 * rs
    cols = displacement_columns(rs, s, dim, guard)
    return (cols.T * ws) @ cols.conj()


def phase_space_matrix(
    s: int,
    dim: int,
    quad: Optional[QuadratureConfig] = None,
    via_quadrature: Optional[bool] = None,
) -> PhaseMatrix:
    """Phase matrix of the phase-space observable generated by number state s.

    s = 0 has the closed form Gamma((n+m)/2 + 1)/sqrt(n! m!) (evaluated in
    log space); s >= 1 uses the radial quadrature, with convergence declared
    once doubling the node count moves no entry by more than quad.tol.
    """
    if s < 0:
        raise ValueError("s must be a nonnegative integer")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    _, guard = _radial_support(dim, s)
    if s >= guard:
        raise ValueError("s exceeds the guard-banded dimension")
    family = f"phase-space:{s}"
    if via_quadrature is None:
        via_quadrature = s >= 1
    if not via_quadrature:
        if s != 0:
            raise ValueError("only s = 0 has a closed form")
        # analytically PSD (a Gram matrix of displaced vacuum columns) with
        # an exactly unit diagonal; skip the cubic check at large dims
        return _trusted(_phase_space_closed_form(dim), family=family)

    quad = quad or QuadratureConfig()
    nodes = quad.nodes_per_panel
    coarse = _phase_space_quadrature(s, dim, nodes)
    residual = math.inf
    for _ in range(quad.max_refinements):
        nodes *= 2
        fine = _phase_space_quadrature(s, dim, nodes)
        residual = float(np.abs(fine - coarse).max())
        coarse = fine
        if residual < quad.tol:
            break
    if not residual < quad.tol:
        raise QuadratureError(residual, quad.tol)
    diag = np.real(np.diag(coarse)).copy()
    if np.abs(diag - 1.0).max() > 1e-6:
        raise QuadratureError(float(np.abs(diag - 1.0).max()), 1e-6)
    entries = coarse / np.sqrt(np.outer(diag, diag))
    entries = (entries + entries.conj().T) / 2.0
    np.fill_diagonal(entries, 1.0)
    return PhaseMatrix(entries, family=family)


def rank_one_phases(pm: PhaseMatrix, tol: float = 1e-8) -> Optional[np.ndarray]:
    """Angles u with c_{n,m} = e^{i(u_n - u_m)}, gauge u_0 = 0, if they exist.

    Present exactly when the matrix comes from a single generalized state;
    returns None when any |c_{n,m}| deviates from 1 or the phases are
    inconsistent.
    """
    c = pm.entries
    if np.abs(np.abs(c) - 1.0).max() > tol:
        return None
    u = np.mod(-np.angle(c[0, :]), 2.0 * math.pi)
    u[0] = 0.0
    predicted = np.exp(1j * u)[:, None] * np.exp(-1j * u)[None, :]
    if np.abs(c - predicted).max() > tol:
        return None
    return u


def realize_vectors(pm: PhaseMatrix) -> list[StateVector]:
    """Unit vectors whose Gram matrix reproduces the phase matrix.

    The rows of sqrt(diag(clip(eigvals))) U* form one such sequence; this is
    the constructive half of the equivalence between positive semidefinite
    unit-diagonal matrices and Gram matrices of unit vectors.
    """
    vals, vecs = np.linalg.eigh(pm.entries)
    vals = np.clip(vals, 0.0, None)
    factor = np.sqrt(vals)[:, None] * vecs.conj().T
    out = []
    for n in range(pm.dim):
        v = factor[:, n]
        out.append(StateVector(v / np.linalg.norm(v)))
    return out


def random_phase_matrix(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> PhaseMatrix:
    """Gram matrix of random unit vectors: a generic valid phase matrix."""
    rank = rank or dim
    mat = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    mat /= np.linalg.norm(mat, axis=1)[:, None]
    gram = mat.conj() @ mat.T
    np.fill_diagonal(gram, 1.0)
    return _trusted(gram, family="random")
