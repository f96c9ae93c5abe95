"""Truncated Fock-space linear algebra.

Dense complex vectors and operators on the number basis {|0>, ..., |N-1>},
coherent states, phase shifters, radial displacement, and the numerical
predicates (Hermitian / PSD / projection) the rest of the package relies on.
All objects are immutable after construction and every function is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammainc, gammaln

__all__ = [
    "StateVector",
    "Operator",
    "coherent_vector",
    "truncation_for",
    "phase_shifter",
    "displacement_radial",
    "number_phases",
    "is_psd",
]

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
UNIT_NORM_TOL = 1e-10

# exact powers of i, indexed by n mod 4
_I_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j])


def _frozen_array(values, shape_check=None) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if shape_check is not None and arr.ndim != shape_check:
        raise ValueError(f"expected a {shape_check}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValueError("entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    """A vector on the truncated number basis, amplitudes indexed by n."""

    amps: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen_array(self.amps, shape_check=1))
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_unit(self, tol: float = UNIT_NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def inner(self, other: "StateVector") -> complex:
        """<self|other> with the bra conjugated."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amps, other.amps))

    def padded(self, dim: int) -> "StateVector":
        """Zero-pad (or reject truncation) to a larger ambient dimension."""
        if dim < self.dim:
            raise ValueError("padding cannot shrink the vector")
        out = np.zeros(dim, dtype=complex)
        out[: self.dim] = self.amps
        return StateVector(out)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "entries": [[z.real, z.imag] for z in self.amps]}

    @staticmethod
    def from_dict(data: dict) -> "StateVector":
        ent = np.array(data["entries"], dtype=float)
        amps = ent[:, 0] + 1j * ent[:, 1]
        if int(data["dim"]) != amps.shape[0]:
            raise ValueError("dim field does not match entry count")
        return StateVector(amps)


def basis_vector(n: int, dim: int) -> StateVector:
    """The number state |n> at truncation dim."""
    if not 0 <= n < dim:
        raise ValueError("basis index out of range")
    amps = np.zeros(dim, dtype=complex)
    amps[n] = 1.0
    return StateVector(amps)


@dataclass(frozen=True)
class Operator:
    """Dense operator on the truncated number basis; rows = bra, cols = ket."""

    entries: np.ndarray = field()

    def __post_init__(self):
        arr = _frozen_array(self.entries, shape_check=2)
        if arr.shape[0] != arr.shape[1]:
            raise ValueError("operator must be square")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def adjoint(self) -> "Operator":
        return Operator(self.entries.conj().T)

    def apply(self, psi: StateVector) -> StateVector:
        if psi.dim != self.dim:
            raise ValueError("dimension mismatch")
        return StateVector(self.entries @ psi.amps)

    def norm(self) -> float:
        """Operator (spectral) norm."""
        return float(np.linalg.norm(self.entries, 2))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.abs(self.entries - self.entries.conj().T).max() <= tol)

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        return is_psd(self, tol)

    def is_projection(self, tol: float = HERMITIAN_TOL) -> bool:
        if not self.is_hermitian(tol):
            return False
        defect = np.abs(self.entries @ self.entries - self.entries).max()
        return bool(defect <= tol)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "entries": [[z.real, z.imag] for z in self.entries.ravel()],
        }

    @staticmethod
    def from_dict(data: dict) -> "Operator":
        dim = int(data["dim"])
        ent = np.array(data["entries"], dtype=float)
        if ent.shape != (dim * dim, 2):
            raise ValueError("entry count does not match dim")
        return Operator((ent[:, 0] + 1j * ent[:, 1]).reshape(dim, dim))


def identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=complex))


def coherent_vector(z: complex, dim: int) -> StateVector:
    """Coherent-state amplitudes e^{-|z|^2/2} z^n / sqrt(n!) truncated at dim.

    Magnitudes are accumulated in log space so large |z| and large n never
    overflow a factorial.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("z must be finite")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    n = np.arange(dim)
    if z == 0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return StateVector(amps)
    log_mag = -abs(z) ** 2 / 2 + n * math.log(abs(z)) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mag) * np.exp(1j * n * np.angle(z))
    return StateVector(amps)


def truncation_for(z: complex, tail: float) -> int:
    """Smallest N whose Poisson(|z|^2) tail mass P(X >= N) drops below tail.

    The tail is the regularized lower incomplete gamma gammainc(N, |z|^2),
    which sums the Poisson terms from N upward without underflow.
    """
    if not 0.0 < tail < 1.0:
        raise ValueError("tail must lie in (0, 1)")
    lam = abs(complex(z)) ** 2
    if lam == 0.0:
        return 1
    n = 1
    while gammainc(n, lam) >= tail:
        n += 1
    return n


def phase_shifter(theta: float, dim: int) -> Operator:
    """Diagonal unitary with entries e^{i n theta}."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return Operator(np.diag(np.exp(1j * theta * np.arange(dim))))


def number_phases(theta: float, dim: int) -> np.ndarray:
    """The diagonal e^{i n theta} of the phase shifter, as a bare array."""
    return np.exp(1j * theta * np.arange(dim))


def _tridiagonal_factorization(dim: int):
    """Eigensystem of -i(a* - a) at truncation dim.

    After the similarity transform by diag(i^n) the generator is the real
    symmetric tridiagonal matrix with off-diagonal sqrt(n+1), so the dense
    complex eigenproblem reduces to a real tridiagonal one.
    """
    w, v = eigh_tridiagonal(np.zeros(dim), np.sqrt(np.arange(1.0, dim)))
    return w, v


def displacement_guard(r: float, dim: int) -> int:
    """Guard-banded dimension for computing exp(r(a*-a)) before cropping."""
    return dim + max(32, 8 * math.ceil(r * r))


def displacement_radial(r: float, dim: int) -> Operator:
    """exp(r(a* - a)) restricted to dim x dim.

    Computed at the guard-banded dimension and cropped, since exponentiating
    the truncated generator corrupts the boundary rows first.  The generator
    is exponentiated through the spectrum of the Hermitian matrix -i r(a*-a).
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    big = displacement_guard(r, dim)
    w, v = _tridiagonal_factorization(big)
    core = (v * np.exp(1j * r * w)[None, :]) @ v.T
    phases = _I_POWERS[np.arange(big) % 4]
    full = phases.conj()[:, None] * core * phases[None, :]
    return Operator(full[:dim, :dim])


def displacement_columns(rs: np.ndarray, source: int, dim: int, guard_dim: int) -> np.ndarray:
    """Columns <n|exp(r(a*-a))|source> for n < dim, one row per radius.

    Shares a single tridiagonal factorization at guard_dim across all radii;
    used by the radial quadratures where per-radius guard banding would be
    wasteful.
    """
    if source >= guard_dim or dim > guard_dim:
        raise ValueError("guard_dim too small")
    w, v = _tridiagonal_factorization(guard_dim)
    b = (v[:dim, :] * v[source, :][None, :]).T  # (guard_dim, dim)
    phases = _I_POWERS[source % 4] * _I_POWERS[np.arange(dim) % 4].conj()
    rs = np.asarray(rs, dtype=float)
    out = np.empty((rs.shape[0], dim), dtype=complex)
    chunk = max(1, int(2**22 // max(guard_dim, 1)))
    for lo in range(0, rs.shape[0], chunk):
        r = rs[lo : lo + chunk]
        out[lo : lo + chunk] = (np.exp(1j * np.outer(r, w)) @ b) * phases[None, :]
    return out


def is_psd(a: Operator, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue of a Hermitian operator is >= -tol*dim."""
    if not a.is_hermitian(max(tol, HERMITIAN_TOL)):
        raise ValueError("is_psd requires a Hermitian operator")
    smallest = float(np.linalg.eigvalsh(a.entries)[0])
    return smallest >= -tol * a.dim
