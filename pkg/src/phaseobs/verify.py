"""One-shot verification suites with machine-readable reports.

Each suite re-derives one of the structural claims at desk scale —
covariance, uniformity, the variance bound, strongness, the discrete
classification, weak convergence of the grid measures, and the uncertainty
asymptotics — and reports pass/fail with its residuals.  Suites are pure;
each derives a private seed from the master seed and its position in the
canonical ordering, so a run is reproducible and parallelizable.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import circle, coherent, discrete, matrices, observables
from .circle import CircleSet, circle_set, full_circle
from .fock import StateVector, basis_vector, coherent_vector, truncation_for
from .matrices import BraForm, PhaseMatrix

__all__ = [
    "VerifyConfig",
    "SuiteResult",
    "SUITE_ORDER",
    "run_suite",
    "run_suites",
    "random_circle_set",
    "random_matrix_mix",
    "random_discrete_pom",
]

PI = math.pi


@dataclass(frozen=True)
class VerifyConfig:
    dim: int = 64
    seed: int = 0
    matrix: Optional[PhaseMatrix] = None


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    passed: bool
    metrics: dict
    seed: int
    elapsed_ms: int

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "pass": self.passed,
            "metrics": self.metrics,
            "seed": self.seed,
            "elapsed_ms": self.elapsed_ms,
        }


# ---------------------------------------------------------------------------
# random generators shared by suites and tests
# ---------------------------------------------------------------------------


def random_circle_set(rng: np.random.Generator, max_intervals: int = 4) -> CircleSet:
    count = int(rng.integers(1, max_intervals + 1))
    pairs = []
    for _ in range(count):
        a = rng.uniform(0.0, 2.0 * PI)
        length = rng.uniform(1e-3, 2.0* PI / count)
        pairs.append((a, a + length))
    return circle_set(pairs)


def random_matrix_mix(rng: np.random.Generator, dim: int) -> PhaseMatrix:
    """Draw from the named families and generic Gram matrices."""
    kind = int(rng.integers(0, 5))
    if kind == 0:
        return matrices.canonical(dim)
    if kind == 1:
        return matrices.trivial(dim)
    if kind == 2:
        return matrices.diagonal_conjugate(
            matrices.canonical(dim), rng.uniform(0.0, 2.0 * PI, size=dim)
        )
    if kind == 3:
        return matrices.phase_space_matrix(0, dim)
    return matrices.random_phase_matrix(dim, rng)


def random_discrete_pom(
    rng: np.random.Generator, max_s: int = 8, max_members: int = 9, index_cap: int = 12
) -> discrete.DiscretePhasePOM:
    """A random valid (J, s, A).

    Vectors attached to indices in the same residue class mod s+1 are
    orthonormalized, which zeroes exactly the forbidden off-diagonal support
    while keeping A a unit-diagonal Gram matrix.
    """
    s = int(rng.integers(0, max_s + 1))
    size = int(rng.integers(1, max_members + 1))
    J = sorted(rng.choice(index_cap, size=size, replace=False).tolist())
    depth = len(J) + 2
    vecs = rng.standard_normal((len(J), depth)) + 1j * rng.standard_normal((len(J), depth))
    by_class: dict[int, list[int]] = {}
    for pos, n in enumerate(J):
        by_class.setdefault(n % (s + 1), []).append(pos)
    for members in by_class.values():
        block = vecs[members, :].T
        q, _ = np.linalg.qr(block)
        vecs[members, :] = q[:, : len(members)].T
    vecs /= np.linalg.norm(vecs, axis=1)[:, None]
    A = vecs.conj() @ vecs.T
    np.fill_diagonal(A, 1.0)
    # orthonormalization leaves same-class overlaps at rounding level; pin them
    for members in by_class.values():
        for i in members:
            for j in members:
                if i != j:
                    A[i, j] = 0.0
    return discrete.make_discrete_pom(J, s, A)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _suite_covariance(cfg: VerifyConfig, rng: np.random.Generator):
    dim = cfg.dim
    bound = 1e-11 * dim
    worst = 0.0
    for _ in range(100):
        pm = cfg.matrix or random_matrix_mix(rng, dim)
        x = random_circle_set(rng)
        theta = rng.uniform(0.0, 2.0 * PI)
        worst = max(worst, observables.covariance_residual(pm, x, theta))
    return worst <= bound, {"max_residual": worst, "bound": bound, "trials": 100}


def _suite_normalization(cfg: VerifyConfig, rng: np.random.Generator):
    dim = cfg.dim
    eye = np.eye(dim)
    worst = 0.0
    for _ in range(50):
        pm = cfg.matrix or random_matrix_mix(rng, dim)
        op = observables.evaluate(pm, full_circle())
        worst = max(worst, float(np.abs(op.entries - eye).max()))
    return worst <= 1e-12, {"max_defect": worst, "bound": 1e-12, "trials": 50}


def _suite_uniformity(cfg: VerifyConfig, rng: np.random.Generator):
    dim = cfg.dim
    worst = 0.0
    for _ in range(50):
        pm = cfg.matrix or random_matrix_mix(rng, dim)
        x = random_circle_set(rng)
        diag = np.real(np.diag(observables.evaluate(pm, x).entries))
        worst = max(worst, float(np.abs(diag - x.measure / (2.0 * PI)).max()))
    return worst <= 1e-13, {"max_defect": worst, "bound": 1e-13, "trials": 50}


def _suite_variance_bound(cfg: VerifyConfig, rng: np.random.Generator):
    vdim = 2000
    basel = PI**2 / 6.0
    bound = PI**2 / 3.0
    can = matrices.canonical(vdim)
    res = observables.first_moment_variance(can, 0)
    basel_err = abs(res.value - basel)
    ok = basel_err <= 1e-3 and res.agreement <= 1e-6
    families = {
        "canonical": can,
        "trivial": matrices.trivial(vdim),
        "phase-space:0": matrices.phase_space_matrix(0, vdim),
    }
    max_var = 0.0
    for pm in families.values():
        for n in (0, 5, 50):
            v = observables.first_moment_variance(pm, n)
            max_var = max(max_var, v.value + v.tail_bound)
            ok = ok and v.value < bound
    return ok, {
        "basel_value": res.value,
        "basel_error": basel_err,
        "max_variance_with_tail": max_var,
        "bound": bound,
    }


def _suite_strongness(cfg: VerifyConfig, rng: np.random.Generator):
    can = observables.is_strong(matrices.canonical(128), kmax=16, tol=1e-10)
    triv = observables.is_strong(matrices.trivial(128), kmax=16, tol=1e-10)
    ps0 = matrices.phase_space_matrix(0, 34)
    rep = observables.is_strong(ps0, kmax=8, tol=1e-10)
    expected = 3.0 * PI / (8.0 * math.sqrt(2.0)) - 1.0 / math.sqrt(2.0)
    witness_ok = (
        not rep.passed and rep.failing_k == 2 and abs(rep.residual - expected) <= 1e-6
    )
    ok = can.passed and triv.passed and witness_ok
    return ok, {
        "canonical_residual": can.residual,
        "phase_space_failing_k": rep.failing_k,
        "phase_space_residual": rep.residual,
        "expected_witness": expected,
    }


def _suite_number_shift(cfg: VerifyConfig, rng: np.random.Generator):
    dim = cfg.dim
    can = matrices.canonical(dim)
    rotated = matrices.diagonal_conjugate(can, rng.uniform(0.0, 2.0 * PI, size=dim))
    ps0 = matrices.phase_space_matrix(0, dim)
    can_ok = observables.number_shift_check(can, kmax=dim // 4)
    rot_ok = observables.number_shift_check(rotated, kmax=dim // 4)
    ps_not = not observables.number_shift_check(ps0, kmax=dim // 4)
    # the canonical shift action is exact: V_k |n+k> = |n>
    exact = True
    for k in (1, 2, 5):
        vk = observables.cyclic_moment(can, k)
        for n in (0, 1, dim - k - 1):
            shifted = vk.apply(basis_vector(n + k, dim))
            exact = exact and bool(np.array_equal(shifted.amps, basis_vector(n, dim).amps))
    ok = can_ok and rot_ok and ps_not and exact
    return ok, {
        "canonical": can_ok,
        "rotated": rot_ok,
        "phase_space_fails": ps_not,
        "canonical_action_exact": exact,
    }


def _suite_counterexample_F(cfg: VerifyConfig, rng: np.random.Generator):
    dim = 16
    uniform_defect = 0.0
    for _ in range(20):
        x = random_circle_set(rng)
        f = observables.counterexample_F(x, dim)
        diag = np.real(np.diag(f.entries))
        uniform_defect = max(
            uniform_defect, float(np.abs(diag - x.measure / (2.0 * PI)).max())
        )
    x = circle_set((0.0, PI))
    theta = PI / 2.0
    res = observables.shift_residual(
        observables.counterexample_F(x, dim),
        observables.counterexample_F(circle.shift(x, theta), dim),
        theta,
    )
    expected = 1.0 / PI
    violation_detected = abs(res - expected) <= 1e-10
    ok = uniform_defect <= 1e-13 and violation_detected
    return ok, {
        "uniformity_defect": uniform_defect,
        "covariance_residual": res,
        "expected_residual": expected,
        "violation_detected": violation_detected,
    }


def _suite_theorem2_roundtrip(cfg: VerifyConfig, rng: np.random.Generator):
    worst_gram = 0.0
    worst_bra = 0.0
    for _ in range(20):
        dim = int(rng.integers(2, 33))
        pm = matrices.random_phase_matrix(dim, rng)
        vectors = matrices.realize_vectors(pm)
        back = matrices.from_vectors(vectors)
        worst_gram = max(worst_gram, float(np.abs(back.entries - pm.entries).max()))
        J = list(range(dim))
        forms = [BraForm({n: v.amps[k] for n, v in enumerate(vectors)}) for k in range(dim)]
        d = matrices.from_bra_forms(forms, J)
        worst_bra = max(worst_bra, float(np.abs(d - pm.entries).max()))
    ok = worst_gram <= 1e-8 and worst_bra <= 1e-8
    return ok, {"max_gram_roundtrip": worst_gram, "max_bra_roundtrip": worst_bra}


def _suite_theorem3_forward(cfg: VerifyConfig, rng: np.random.Generator):
    worst_norm = 0.0
    worst_cov = 0.0
    for _ in range(50):
        pom = random_discrete_pom(rng)
        total = sum(
            discrete.point_operator(pom, l).entries for l in range(pom.s + 1)
        )
        worst_norm = max(worst_norm, float(np.abs(total - np.eye(len(pom.J))).max()))
        for k in range(pom.s + 1):
            for l in range(pom.s + 1):
                worst_cov = max(worst_cov, discrete.discrete_covariance_residual(pom, k, l))
    ok = worst_norm <= 1e-12 and worst_cov <= 1e-12
    return ok, {"max_normalization_defect": worst_norm, "max_covariance_residual": worst_cov}


def _iter_small_J(cap: int = 6, max_members: int = 6):
    import itertools

    for size in range(1, max_members + 1):
        yield from itertools.combinations(range(cap), size)


def _suite_theorem3_converse(cfg: VerifyConfig, rng: np.random.Generator):
    """The normalization constraint decouples entrywise on H_J.

    For every matrix unit E_{ij}, sum_l R_l E_{ij} R_l* equals
    (s+1) E_{ij} when the indices share a residue class mod s+1 and vanishes
    otherwise; hence any covariant normalized family is B = A/(s+1) with A
    exactly the admissible operators.
    """
    worst = 0.0
    cases = 0
    for s in range(4):
        angles = discrete.grid_points(s)
        for J in _iter_small_J():
            idx = np.array(J)
            for i in range(len(J)):
                for j in range(len(J)):
                    sigma = np.exp(1j * (idx[i] - idx[j]) * angles).sum()
                    predicted = (s + 1.0) if (idx[i] - idx[j]) % (s + 1) == 0 else 0.0
                    worst = max(worst, abs(sigma - predicted))
                    cases += 1
    # a random admissible A normalizes; breaking the support pattern breaks it
    pom = random_discrete_pom(rng, max_s=3)
    total = sum(discrete.point_operator(pom, l).entries for l in range(pom.s + 1))
    norm_ok = float(np.abs(total - np.eye(len(pom.J))).max()) <= 1e-12
    s_bad = 1
    J_bad = (0, s_bad + 1)
    A_bad = np.array([[1.0, 0.5], [0.5, 1.0]], dtype=complex)
    angles = discrete.grid_points(s_bad)
    phases = [np.exp(1j * t * np.array(J_bad)) for t in angles]
    bad_total = sum(
        ph[:, None] * A_bad * ph.conj()[None, :] / (s_bad + 1) for ph in phases
    )
    bad_detected = float(np.abs(bad_total - np.eye(2)).max()) > 1e-3
    rejected = not discrete.validate_A(J_bad, s_bad, A_bad).passed
    ok = worst <= 1e-12 and norm_ok and bad_detected and rejected
    return ok, {
        "max_decoupling_defect": worst,
        "entry_constraints_checked": cases,
        "violating_pattern_detected": bad_detected,
        "violating_pattern_rejected": rejected,
    }


def _suite_theorem3_projection(cfg: VerifyConfig, rng: np.random.Generator):
    checked = 0
    projections = 0
    mismatches = 0
    for s in range(4):
        for J in _iter_small_J(cap=6, max_members=4):
            candidates = [np.eye(len(J), dtype=complex)]
            residues = [n % (s + 1) for n in J]
            if len(set(residues)) == len(J):
                candidates.append(np.ones((len(J), len(J)), dtype=complex))
                u = rng.uniform(0.0, 2.0 * PI, size=len(J))
                candidates.append(np.exp(1j * u)[:, None] * np.exp(-1j * u)[None, :])
            for A in candidates:
                np.fill_diagonal(A, 1.0)
                report = discrete.validate_A(J, s, A)
                if not report.passed:
                    continue
                pom = discrete.make_discrete_pom(J, s, A)
                try:
                    cls = discrete.is_projection_valued(pom, tol=1e-10)
                except RuntimeError:
                    mismatches += 1
                    continue
                checked += 1
                if cls.projection_valued:
                    projections += 1
                predicted = cls.rank_one_phase and cls.cardinality_matches
                if cls.projection_valued != predicted:
                    mismatches += 1
    for _ in range(25):
        pom = random_discrete_pom(rng, max_s=3, max_members=4, index_cap=6)
        try:
            cls = discrete.is_projection_valued(pom, tol=1e-10)
        except RuntimeError:
            mismatches += 1
            continue
        checked += 1
        if cls.projection_valued != (cls.rank_one_phase and cls.cardinality_matches):
            mismatches += 1
    return mismatches == 0, {
        "cases": checked,
        "projection_valued_cases": projections,
        "misclassifications": mismatches,
    }


def _fit_rate(pm: PhaseMatrix, x: CircleSet, s_values: Sequence[int], top: int = 8):
    errors = []
    for s in s_values:
        e = max(
            discrete.convergence_error(pm, s, x, n, m)
            for n in range(top + 1)
            for m in range(top + 1)
        )
        errors.append(e)
    slope = np.polyfit(np.log(s_values), np.log(errors), 1)[0]
    return -float(slope), errors


def _suite_pb_convergence(cfg: VerifyConfig, rng: np.random.Generator):
    x = circle_set((0.0, PI))
    s_values = [64, 128, 256, 512, 1024]
    results = {}
    ok = True
    for name, pm in (
        ("canonical", matrices.canonical(16)),
        ("phase-space:0", matrices.phase_space_matrix(0, 16)),
    ):
        exponent, errors = _fit_rate(pm, x, s_values)
        tail = max(
            discrete.convergence_error(pm, 4096, x, n, m)
            for n in range(9)
            for m in range(9)
        )
        ratios = [errors[i + 1] / errors[i] for i in range(len(errors) - 1)]
        geomean = float(np.prod(ratios) ** (1.0 / len(ratios)))
        results[name] = {
            "exponent": exponent,
            "error_4096": tail,
            "halving_ratio_geomean": geomean,
        }
        ok = ok and 0.8 <= exponent <= 1.2 and tail < 1e-3 and geomean <= 0.75
    return ok, results


def _suite_q_margin(cfg: VerifyConfig, rng: np.random.Generator):
    z = 1.0 + 1.0j
    states = [
        basis_vector(0, 4),
        basis_vector(1, 4),
        coherent_vector(z, truncation_for(z, 1e-12) + 4),
        StateVector(np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0)),
    ]
    thetas = 2.0 * PI * np.arange(256) / 256
    worst = 0.0
    for phi in states:
        pm = matrices.phase_space_matrix(0, phi.dim)
        reference = coherent.state_density(pm, phi, thetas)
        margin = coherent.q_margin(phi, thetas)
        worst = max(worst, float(np.abs(margin - reference).max()))
    norm_defect = abs(
        float(np.mean(coherent.q_margin(states[3], thetas))) - 1.0
    )
    ok = worst <= 1e-6 and norm_defect <= 1e-8
    return ok, {"max_margin_mismatch": worst, "grid_normalization_defect": norm_defect}


def _wrapped_normal_grid(mu: float, sigma: float, size: int = 4096) -> coherent.DensityGrid:
    th = 2.0 * PI * np.arange(size) / size
    vals = np.zeros(size)
    centered = (th - mu + PI) % (2.0 * PI) - PI
    for k in range(-3, 4):
        vals += np.exp(-((centered + 2.0 * PI * k) ** 2) / (2.0 * sigma**2))
    vals /= np.mean(vals)
    return coherent.DensityGrid(family="wrapped-normal", z=0j, thetas=th, values=vals)


def _suite_levy(cfg: VerifyConfig, rng: np.random.Generator):
    size = 4096
    th = 2.0 * PI * np.arange(size) / size
    uniform = coherent.DensityGrid(family="uniform", z=0j, thetas=th, values=np.ones(size))
    uniform_err = abs(coherent.levy(uniform) - PI**2 / 3.0)
    sigma = 0.1
    wn = _wrapped_normal_grid(mu=2.0, sigma=sigma, size=size)
    wn_err = abs(coherent.levy(wn) - sigma**2) / sigma**2
    grid = coherent.density_grid(matrices.canonical(32), 1.5)
    rolled = coherent.DensityGrid(
        family=grid.family, z=grid.z, thetas=grid.thetas, values=np.roll(grid.values, 700)
    )
    shift_err = abs(coherent.levy(grid) - coherent.levy(rolled))
    ok = uniform_err <= 1e-6 and wn_err <= 0.05 and shift_err <= 1e-8
    return ok, {
        "uniform_error": uniform_err,
        "wrapped_normal_rel_error": wn_err,
        "shift_invariance_defect": shift_err,
    }


def _suite_uncertainty(cfg: VerifyConfig, rng: np.random.Generator):
    z = 5.0
    dim = truncation_for(z, 1e-12)
    targets = {
        "canonical": (matrices.canonical(dim), 0.5),
        "phase-space:0": (matrices.phase_space_matrix(0, dim), math.sqrt(0.5)),
        "phase-space:1": (matrices.phase_space_matrix(1, dim), 1.0),
    }
    metrics = {}
    ok = True
    for name, (pm, target) in targets.items():
        product = coherent.uncertainty_product(pm, z)
        rel = abs(product - target) / target
        metrics[name] = {"product": product, "target": target, "rel_error": rel}
        ok = ok and rel <= 0.15
    ordered = (
        metrics["canonical"]["product"] <= metrics["phase-space:0"]["product"]
    )
    metrics["canonical_is_sharpest"] = ordered
    return ok and ordered, metrics


def _suite_classical_limit(cfg: VerifyConfig, rng: np.random.Generator):
    eps = 0.1
    values = []
    for amp in (1.0, 2.0, 4.0, 8.0):
        pm = matrices.canonical(truncation_for(amp, 1e-12))
        values.append(coherent.concentration(pm, amp, eps))
    increasing = all(b > a for a, b in zip(values, values[1:]))
    big = matrices.canonical(truncation_for(32.0, 1e-12))
    p32 = coherent.concentration(big, 32.0, eps)
    vacuum = coherent.concentration(matrices.canonical(4), 0.0, eps)
    vacuum_ok = abs(vacuum - eps / PI) <= 1e-12
    ok = increasing and p32 > 0.99 and vacuum_ok
    return ok, {
        "concentrations": values,
        "concentration_at_32": p32,
        "vacuum_value": vacuum,
        "vacuum_expected": eps / PI,
    }


def _suite_spectral_accuracy(cfg: VerifyConfig, rng: np.random.Generator):
    exact = all(
        discrete.spectral_accuracy(s, full_circle()) == PI / (s + 1) for s in (7, 100)
    )
    s_values = (7, 15, 31, 63, 127)
    full_vals = [discrete.spectral_accuracy(s, full_circle()) for s in s_values]
    x = circle_set((0.3, 1.0))
    partial = [discrete.spectral_accuracy(s, x) for s in s_values]
    monotone = all(b <= a for a, b in zip(partial, partial[1:]))
    vanishing = full_vals[-1] < full_vals[0] and full_vals[-1] <= PI / 128.0
    ok = exact and monotone and vanishing
    return ok, {
        "full_circle_values": full_vals,
        "interval_values": partial,
        "exact_at_full_circle": exact,
        "monotone": monotone,
    }


SUITES: dict[str, Callable] = {
    "covariance": _suite_covariance,
    "normalization": _suite_normalization,
    "uniformity": _suite_uniformity,
    "variance-bound": _suite_variance_bound,
    "strongness": _suite_strongness,
    "number-shift": _suite_number_shift,
    "counterexample-F": _suite_counterexample_F,
    "theorem2-roundtrip": _suite_theorem2_roundtrip,
    "theorem3-forward": _suite_theorem3_forward,
    "theorem3-converse": _suite_theorem3_converse,
    "theorem3-projection": _suite_theorem3_projection,
    "pb-convergence": _suite_pb_convergence,
    "q-margin": _suite_q_margin,
    "levy": _suite_levy,
    "uncertainty": _suite_uncertainty,
    "classical-limit": _suite_classical_limit,
    "spectral-accuracy": _suite_spectral_accuracy,
}

SUITE_ORDER = tuple(SUITES)

ALIASES = {"strong": "strongness", "variance": "variance-bound"}


def resolve_suite_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITE_ORDER)}")
    return name


def run_suite(name: str, config: VerifyConfig) -> SuiteResult:
    name = resolve_suite_name(name)
    seed = config.seed * 1000 + SUITE_ORDER.index(name)
    rng = np.random.default_rng(seed)
    start = time.monotonic()
    passed, metrics = SUITES[name](config, rng)
    elapsed_ms = int(round((time.monotonic() - start) * 1000))
    return SuiteResult(
        suite=name, passed=bool(passed), metrics=metrics, seed=seed, elapsed_ms=elapsed_ms
    )


def run_suites(
    names: Sequence[str], config: VerifyConfig, jobs: int = 1
) -> list[SuiteResult]:
    names = [resolve_suite_name(n) for n in names]
    if jobs <= 1:
        return [run_suite(n, config) for n in names]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_suite, n, config) for n in names]
        return [f.result() for f in futures]
