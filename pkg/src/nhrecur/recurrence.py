"""Dilation witness ``M(t)`` and epsilon-recurrence detection.

``M(0) = sum_n alpha_n |phi_n><phi_n| / mu`` is built from the eigenvectors of
``H^H``; ``M(t) = exp(-iH^H t) M(0) exp(iHt)`` is time independent exactly when
the spectrum of ``H`` is real, which is what protects recurrence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._validation import as_square_matrix, check_hermitian
from .dynamics import _evolve, _prepare, propagator, time_grid
from .exceptions import DefectiveMatrixError
from .hamiltonian import (
    has_real_spectrum,
    random_complex_spectrum_nh,
    random_real_spectrum_nh,
)
from .linalg import BiorthogonalEigenSystem, gen_eig

__all__ = [
    "DilationWitness",
    "Verdict",
    "RecurrenceReport",
    "SuiteSummary",
    "build_witness",
    "evolve_witness",
    "witness_time_independence",
    "witness_gap_positive",
    "recurrence_distance",
    "detect_recurrence",
    "conjugate_spectrum_residual",
    "theorem_property_suite",
]


@dataclass(frozen=True)
class DilationWitness:
    m0: np.ndarray
    alphas: np.ndarray
    mu: float
    source_spectrum: BiorthogonalEigenSystem


class Verdict(enum.Enum):
    RECURRED = "Recurred"
    NOT_WITHIN_HORIZON = "NotWithinHorizon"


@dataclass(frozen=True)
class RecurrenceReport:
    epsilon: float
    t_best: float
    d_best: float
    horizon: float
    verdict: Verdict

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "t_best": self.t_best,
            "d_best": self.d_best,
            "horizon": self.horizon,
            "verdict": self.verdict.value,
        }


# ----------------------------------------------------------------------------
# witness


def build_witness(h, alphas: Sequence[float] = (), mu: Optional[float] = None) -> DilationWitness:
    """Witness ``M(0)`` from the eigenprojectors of ``H^H``.

    Empty ``alphas`` means all 2. With ``mu=None`` the scale is chosen so that the
    smallest eigenvalue of ``M(0)`` equals ``min(alphas)`` (> 1), which keeps
    ``M(0) - I`` positive even for strongly non-orthogonal eigenvectors; for
    Hermitian ``H`` this gives ``mu = 1``.
    """
    m = as_square_matrix(h, "H")
    spec = gen_eig(m.conj().T)
    if spec.defective:
        raise DefectiveMatrixError("cannot build the witness at an exceptional point")
    n = m.shape[0]
    alphas = np.full(n, 2.0) if len(alphas) == 0 else np.asarray(alphas, dtype=float)
    if alphas.shape != (n,):
        raise ValueError(f"expected {n} alphas, got {alphas.shape}")
    if np.any(alphas <= 1.0):
        raise ValueError(f"all alphas must exceed 1, got {alphas.tolist()}")
    phi = spec.right_vectors
    m_prime = (phi * alphas) @ phi.conj().T
    m_prime = (m_prime + m_prime.conj().T) / 2
    if mu is None:
        mu = float(np.linalg.eigvalsh(m_prime)[0] / alphas.min())
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    return DilationWitness(m_prime / mu, alphas, float(mu), spec)


def evolve_witness(h, w: DilationWitness, t: float) -> np.ndarray:
    """``M(t) = exp(-iH^H t) M(0) exp(iHt)``; the right factor is the adjoint of the left."""
    u = propagator(as_square_matrix(h, "H").conj().T, t)
    return u @ w.m0 @ u.conj().T


def witness_time_independence(h, w: DilationWitness, grid, tol: float = 1e-8) -> tuple[bool, float]:
    """Max over ``grid`` of ``||M(t) - M(0)||_F / ||M(0)||_F``, and whether it is <= tol."""
    ref = np.linalg.norm(w.m0)
    deviation = max(np.linalg.norm(evolve_witness(h, w, t) - w.m0) / ref for t in grid)
    return bool(deviation <= tol), float(deviation)


def witness_gap_positive(m_t) -> bool:
    """Whether ``M(t) - I`` is positive definite."""
    m_t = as_square_matrix(m_t, "M")
    check_hermitian(m_t, "M")
    gap = np.linalg.eigvalsh((m_t + m_t.conj().T) / 2 - np.eye(m_t.shape[0]))
    return bool(gap[0] > 0)


def conjugate_spectrum_residual(h) -> float:
    """Multiset distance between eig(H^H) and conj(eig(H))."""
    m = as_square_matrix(h, "H")
    kappa = gen_eig(m.conj().T).eigenvalues
    nu_conj = gen_eig(m).eigenvalues.conj()
    remaining = list(nu_conj)
    worst = 0.0
    for k in kappa:
        j = int(np.argmin([abs(k - v) for v in remaining]))
        worst = max(worst, abs(k - remaining.pop(j)))
    return worst


# ----------------------------------------------------------------------------
# recurrence detection


def recurrence_distance(h, omega0, t: float) -> float:
    """``||Omega(t) - Omega(0)||_F / ||Omega(0)||_F``."""
    m, omega0 = _prepare(h, omega0)
    return _distance(m, omega0, t)


def _distance(m: np.ndarray, omega0: np.ndarray, t: float) -> float:
    return float(np.linalg.norm(_evolve(m, omega0, t).omega - omega0) / np.linalg.norm(omega0))


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(fn, lo: float, hi: float, width: float = 1e-9) -> float:
    """Golden-section search for the minimum of a locally unimodal ``fn``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > width:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    return (a + b) / 2


def detect_recurrence(h, omega0, epsilon: float, horizon: float,
                      coarse_steps: int = 1000) -> RecurrenceReport:
    """First epsilon-return of ``Omega(t)`` to ``Omega(0)`` within ``(0, horizon]``.

    Coarse scan on ``coarse_steps`` intervals, ignoring ``t < horizon /
    coarse_steps``; every local minimum of the scan is refined in time order by
    golden-section search down to a bracket width of 1e-9. The first refined
    minimum within ``epsilon`` wins; otherwise the best refined minimum is
    reported with ``NotWithinHorizon``.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if coarse_steps < 100:
        raise ValueError("coarse_steps must be >= 100")
    m, omega0 = _prepare(h, omega0)
    times = time_grid(horizon, coarse_steps + 1)
    window = horizon / coarse_steps

    def fn(t):
        return _distance(m, omega0, t)

    dist = np.array([fn(t) for t in times])

    candidates = []
    last = len(times) - 1
    for k in range(1, last + 1):
        if times[k] < window:
            continue
        left_ok = dist[k] <= dist[k - 1]
        right_ok = k == last or dist[k] <= dist[k + 1]
        if left_ok and right_ok:
            candidates.append(k)

    best_t, best_d = None, math.inf
    for k in candidates:
        lo = max(times[k - 1], window)
        hi = times[min(k + 1, last)]
        t_k = float(_golden_min(fn, lo, hi))
        d_k = fn(t_k)
        if dist[k] < d_k:
            t_k, d_k = float(times[k]), float(dist[k])
        if d_k <= epsilon:
            return RecurrenceReport(epsilon, t_k, d_k, horizon, Verdict.RECURRED)
        if d_k < best_d:
            best_t, best_d = t_k, d_k
    if best_t is None:
        mask = times >= window
        k = int(np.argmin(np.where(mask, dist, np.inf)))
        best_t, best_d = float(times[k]), float(dist[k])
    return RecurrenceReport(epsilon, best_t, best_d, horizon, Verdict.NOT_WITHIN_HORIZON)


# ----------------------------------------------------------------------------
# property suite


@dataclass
class SuiteSummary:
    dim: int
    n_samples: int
    seed: int
    real_recurred: int = 0
    complex_recurred: int = 0
    real_witness_static: int = 0
    complex_witness_static: int = 0
    consistent: int = 0
    failures: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return 2 * self.n_samples

    @property
    def consistency(self) -> float:
        return self.consistent / self.total if self.total else 1.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "real_recurred": self.real_recurred,
            "complex_recurred": self.complex_recurred,
            "real_witness_static": self.real_witness_static,
            "complex_witness_static": self.complex_witness_static,
            "consistency": self.consistency,
            "failures": list(self.failures),
        }


def _random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def theorem_property_suite(dim: int, n_samples: int, seed: int, epsilon: float = 1e-3,
                           spread: float = 0.3, check_recurrence: bool = True,
                           witness_tol: float = 1e-8) -> SuiteSummary:
    """Check recurrence and witness verdicts against spectrum reality.

    Draws ``n_samples`` real-spectrum Hamiltonians with distinct integer
    eigenvalues (so every orbit returns exactly at ``t = 2 pi``) and
    ``n_samples`` complex-spectrum perturbations of the same construction. Each
    sample must recur (resp. not recur) within a ``2 pi + 1`` horizon and have a
    static (resp. time-dependent) witness.
    """
    if dim not in (2, 3, 4):
        raise ValueError("dim must be 2, 3 or 4")
    rng = np.random.default_rng(seed)
    summary = SuiteSummary(dim, n_samples, seed)
    horizon = 2 * math.pi + 1.0
    grid = time_grid(horizon, 64)
    for i in range(n_samples):
        levels = rng.choice(np.arange(-3, 4), size=dim, replace=False).astype(float)
        sub_seed = int(rng.integers(2**32))
        omega0 = _random_density(dim, rng)
        for label, h in (
            ("real", random_real_spectrum_nh(dim, spread, sub_seed, levels)),
            ("complex", random_complex_spectrum_nh(dim, spread, sub_seed, levels)),
        ):
            real = has_real_spectrum(h)
            expect_real = label == "real"
            ok = real == expect_real
            static, dev = witness_time_independence(h, build_witness(h), grid, witness_tol)
            if static:
                if expect_real:
                    summary.real_witness_static += 1
                else:
                    summary.complex_witness_static += 1
            ok = ok and static == real
            if check_recurrence:
                report = detect_recurrence(h, omega0, epsilon, horizon, coarse_steps=400)
                recurred = report.verdict is Verdict.RECURRED
                if recurred:
                    if expect_real:
                        summary.real_recurred += 1
                    else:
                        summary.complex_recurred += 1
                ok = ok and recurred == real
            if ok:
                summary.consistent += 1
            else:
                summary.failures.append(
                    f"sample {i} ({label}): real_spectrum={real} witness_static={static} "
                    f"(deviation {dev:.2e})"
                    + (f" verdict={report.verdict.value} d_best={report.d_best:.2e}"
                       if check_recurrence else "")
                )
    return summary
