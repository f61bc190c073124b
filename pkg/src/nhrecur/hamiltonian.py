"""Two-level PT / anti-PT families and generic non-Hermitian Hamiltonians."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import as_square_matrix, hermitian_residual
from .exceptions import NotHermitianError
from .linalg import gen_eig

__all__ = [
    "TwoLevelParams",
    "PhaseClass",
    "Family",
    "NHHamiltonian",
    "build_apt",
    "build_pt",
    "generic",
    "delta",
    "symmetry_scale",
    "apt_eigenvalues",
    "pt_eigenvalues",
    "classify_phase",
    "has_real_spectrum",
    "is_pseudo_hermitian",
    "random_real_spectrum_nh",
    "random_complex_spectrum_nh",
    "shift_spectrum",
    "PARITY",
]

PARITY = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)

# Relative half-width of the exceptional-point band around delta = 0.
TOL_EP = 1e-10


@dataclass(frozen=True)
class TwoLevelParams:
    """Amplitudes and angles ``(r, theta, r1, theta1)`` of the two-level families.

    Negative amplitudes are folded into the angles (``r e^{i theta} =
    |r| e^{i (theta + pi)}``), so stored amplitudes are always non-negative.
    """

    r: float
    theta: float
    r1: float
    theta1: float

    def __post_init__(self):
        for name in ("r", "theta", "r1", "theta1"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.r < 0:
            object.__setattr__(self, "r", -self.r)
            object.__setattr__(self, "theta", math.remainder(self.theta + math.pi, 2 * math.pi))
        if self.r1 < 0:
            object.__setattr__(self, "r1", -self.r1)
            object.__setattr__(self, "theta1", math.remainder(self.theta1 + math.pi, 2 * math.pi))

    def as_dict(self) -> dict:
        return {"r": self.r, "theta": self.theta, "r1": self.r1, "theta1": self.theta1}


class PhaseClass(enum.Enum):
    UNBROKEN = "Unbroken"
    BROKEN = "Broken"
    EXCEPTIONAL_POINT = "ExceptionalPoint"


class Family(enum.Enum):
    APT = "apt"
    PT = "pt"
    GENERIC = "generic"


def _pt_matrix(p: TwoLevelParams) -> np.ndarray:
    return np.array(
        [
            [p.r * cmath.exp(1j * p.theta), p.r1 * cmath.exp(1j * p.theta1)],
            [p.r1 * cmath.exp(-1j * p.theta1), p.r * cmath.exp(-1j * p.theta)],
        ],
        dtype=np.complex128,
    )


_BUILDERS = {
    Family.PT: _pt_matrix,
    Family.APT: lambda p: 1j * _pt_matrix(p),
}


@dataclass(frozen=True)
class NHHamiltonian:
    matrix: np.ndarray
    family: Family = Family.GENERIC
    params: Optional[TwoLevelParams] = None

    def __post_init__(self):
        m = as_square_matrix(self.matrix, "H")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.family is not Family.GENERIC:
            if self.params is None:
                raise ValueError(f"{self.family.value} Hamiltonian requires params")
            expected = _BUILDERS[self.family](self.params)
            if m.shape != (2, 2) or not np.allclose(m, expected, rtol=1e-12, atol=1e-12):
                raise ValueError("matrix does not match its family constructor applied to params")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def H(self) -> np.ndarray:
        """Adjoint matrix."""
        return self.matrix.conj().T


def build_apt(p: TwoLevelParams) -> NHHamiltonian:
    """``i [[r e^{i theta}, r1 e^{i theta1}], [r1 e^{-i theta1}, r e^{-i theta}]]``."""
    return NHHamiltonian(_BUILDERS[Family.APT](p), Family.APT, p)


def build_pt(p: TwoLevelParams) -> NHHamiltonian:
    """``[[r e^{i theta}, r1 e^{i theta1}], [r1 e^{-i theta1}, r e^{-i theta}]]``."""
    return NHHamiltonian(_BUILDERS[Family.PT](p), Family.PT, p)


def generic(matrix) -> NHHamiltonian:
    return NHHamiltonian(np.array(matrix, dtype=np.complex128))


def delta(p: TwoLevelParams) -> float:
    """Phase discriminant ``r1^2 - r^2 sin^2(theta)``."""
    return p.r1**2 - (p.r * math.sin(p.theta)) ** 2


def symmetry_scale(p: TwoLevelParams) -> float:
    """``r1^2 + r^2 sin^2(theta)``; the numerator of the closed-form ratios a and b."""
    return p.r1**2 + (p.r * math.sin(p.theta)) ** 2


def _sqrt_delta(p: TwoLevelParams) -> complex:
    d = delta(p)
    return complex(math.sqrt(d)) if d >= 0 else 1j * math.sqrt(-d)


def pt_eigenvalues(p: TwoLevelParams) -> tuple[complex, complex]:
    """``r cos(theta) +/- sqrt(delta)``."""
    base = p.r * math.cos(p.theta)
    root = _sqrt_delta(p)
    return base + root, base - root


def apt_eigenvalues(p: TwoLevelParams) -> tuple[complex, complex]:
    """``i r cos(theta) +/- i sqrt(delta)``, with sqrt(delta) = i sqrt(-delta) for delta < 0."""
    e_plus, e_minus = pt_eigenvalues(p)
    return 1j * e_plus, 1j * e_minus


def classify_phase(p: TwoLevelParams) -> PhaseClass:
    d = delta(p)
    band = TOL_EP * (symmetry_scale(p) + 1.0)
    if d > band:
        return PhaseClass.UNBROKEN
    if d < -band:
        return PhaseClass.BROKEN
    return PhaseClass.EXCEPTIONAL_POINT


def has_real_spectrum(h, tol: float = 1e-9) -> bool:
    """True iff every eigenvalue has ``|Im| <= max(tol * spectral radius, 1e-12)``."""
    lam = gen_eig(h).eigenvalues
    radius = float(np.max(np.abs(lam)))
    return bool(np.max(np.abs(lam.imag)) <= max(tol * radius, 1e-12))


def is_pseudo_hermitian(h, eta, tol: float = 1e-9) -> bool:
    """Check ``eta H eta^-1 == H^H`` for a Hermitian invertible metric ``eta``."""
    m = as_square_matrix(h, "H")
    eta = as_square_matrix(eta, "eta")
    if eta.shape != m.shape:
        raise ValueError(f"eta shape {eta.shape} does not match H shape {m.shape}")
    res = hermitian_residual(eta)
    if res > 1e-12:
        raise NotHermitianError(f"eta is not Hermitian (relative residual {res:.3e})")
    cond = np.linalg.cond(eta)
    if not np.isfinite(cond) or cond >= 1e12:
        raise ValueError(f"eta is singular or ill-conditioned (condition number {cond:.3e})")
    # eta H eta^-1 computed as a right division
    transformed = np.linalg.solve(eta.T, (eta @ m).T).T
    return bool(np.linalg.norm(transformed - m.conj().T) <= tol * np.linalg.norm(m))


def _unit_disc(rng: np.random.Generator, shape) -> np.ndarray:
    radius = np.sqrt(rng.uniform(size=shape))
    angle = rng.uniform(0.0, 2 * np.pi, size=shape)
    return radius * np.exp(1j * angle)


def _planted(dim, spread, rng, diagonal) -> np.ndarray:
    s = np.eye(dim) + spread * _unit_disc(rng, (dim, dim))
    return s @ np.diag(diagonal) @ np.linalg.inv(s)


def random_real_spectrum_nh(dim: int, spread: float = 0.5, seed: int = 0,
                            eigenvalues=None) -> NHHamiltonian:
    """Seeded ``S D S^-1`` with real diagonal ``D`` and ``S = I + spread * G``.

    ``G`` has entries uniform on the unit disc. ``eigenvalues`` plants a given
    real spectrum; otherwise it is drawn uniformly from [-2, 2].
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    if eigenvalues is None:
        eigenvalues = rng.uniform(-2.0, 2.0, size=dim)
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.shape != (dim,):
        raise ValueError(f"expected {dim} eigenvalues, got {eigenvalues.shape}")
    return NHHamiltonian(_planted(dim, spread, rng, eigenvalues.astype(np.complex128)))


def random_complex_spectrum_nh(dim: int, spread: float = 0.5, seed: int = 0,
                               eigenvalues=None, min_gamma: float = 0.2,
                               max_gamma: float = 1.0) -> NHHamiltonian:
    """Like :func:`random_real_spectrum_nh` but every eigenvalue gets an imaginary
    part of random sign with magnitude in ``[min_gamma, max_gamma]``."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    if eigenvalues is None:
        eigenvalues = rng.uniform(-2.0, 2.0, size=dim)
    gammas = rng.uniform(min_gamma, max_gamma, size=dim) * rng.choice([-1.0, 1.0], size=dim)
    diagonal = np.asarray(eigenvalues, dtype=float) + 1j * gammas
    return NHHamiltonian(_planted(dim, spread, rng, diagonal))


def shift_spectrum(h, c: float) -> NHHamiltonian:
    """``H + i c I``: every eigenvalue moves by ``i c``, eigenvectors unchanged."""
    m = as_square_matrix(h, "H")
    if c == 0 and isinstance(h, NHHamiltonian):
        return h
    return NHHamiltonian(m + 1j * c * np.eye(m.shape[0]))
