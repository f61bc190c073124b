"""Non-unitary evolution of the non-normalized density matrix.

``Omega(t) = exp(-iHt) Omega(0) exp(iH^H t)`` and ``rho(t) = Omega(t) / Tr Omega(t)``
are available through three routes: the matrix exponential
(:func:`evolve_omega`), the biorthogonal spectral expansion
(:func:`spectral_evolve`) and the two-dominant-mode asymptotic truncation
(:func:`asymptotic_omega`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_square_matrix, check_hermitian
from .exceptions import DefectiveMatrixError, NumericalRangeError
from .linalg import BiorthogonalEigenSystem, expm, gen_eig

__all__ = [
    "DensityState",
    "SpectralCoefficients",
    "propagator",
    "evolve_omega",
    "evolve_many",
    "build_spectral_coeffs",
    "spectral_evolve",
    "expansion_amplitudes",
    "dominant_modes",
    "asymptotic_omega",
    "asymptotic_neg_ln_tr",
    "time_grid",
    "maximally_mixed",
    "basis_state",
]

_TRACE_MIN = 1e-300


@dataclass(frozen=True)
class DensityState:
    omega: np.ndarray
    rho: np.ndarray
    time: float

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.omega)))


@dataclass(frozen=True)
class SpectralCoefficients:
    """Expansion ``Omega(0) = sum_ij omega_ij |phi_i><phi_j|`` in right eigenvectors."""

    omega_ij: np.ndarray
    spectrum: BiorthogonalEigenSystem

    def reconstruct(self) -> np.ndarray:
        phi = self.spectrum.right_vectors
        return phi @ self.omega_ij @ phi.conj().T


def maximally_mixed(dim: int = 2) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128) / dim


def basis_state(k: int, dim: int = 2) -> np.ndarray:
    """Projector ``|k><k|``."""
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[k, k] = 1.0
    return out


def _check_initial(omega0) -> np.ndarray:
    omega0 = as_square_matrix(omega0, "omega0")
    check_hermitian(omega0, "omega0")
    tr = np.real(np.trace(omega0))
    if not tr > 0:
        raise ValueError(f"omega0 must have positive trace, got {tr:.3e}")
    lam_min = np.linalg.eigvalsh((omega0 + omega0.conj().T) / 2)[0]
    if lam_min < -1e-9 * tr:
        raise ValueError(f"omega0 is not positive semidefinite (eigenvalue {lam_min:.3e})")
    return omega0


def propagator(h, t: float) -> np.ndarray:
    """``exp(-i H t)``."""
    return expm(-1j * t * as_square_matrix(h, "H"))


def _state(omega: np.ndarray, t: float) -> DensityState:
    omega = (omega + omega.conj().T) / 2
    tr = float(np.real(np.trace(omega)))
    if not math.isfinite(tr) or tr > 1e300:
        raise NumericalRangeError(f"Tr Omega(t) overflows at t = {t:g}")
    if tr < _TRACE_MIN:
        raise NumericalRangeError(f"Tr Omega(t) = {tr:.3e} underflows at t = {t:g}")
    return DensityState(omega, omega / tr, float(t))


def _evolve(m: np.ndarray, omega0: np.ndarray, t: float) -> DensityState:
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    u = expm(-1j * t * m)
    with np.errstate(over="ignore", invalid="ignore"):
        omega = u @ omega0 @ u.conj().T
    return _state(omega, t)


def _prepare(h, omega0):
    m = as_square_matrix(h, "H")
    omega0 = _check_initial(omega0)
    if m.shape != omega0.shape:
        raise ValueError(f"H has shape {m.shape} but omega0 has shape {omega0.shape}")
    return m, omega0


def evolve_omega(h, omega0, t: float) -> DensityState:
    """Evolve ``omega0`` to time ``t`` with a freshly computed propagator."""
    return _evolve(*_prepare(h, omega0), t)


def evolve_many(h, omega0, times) -> list[DensityState]:
    """:func:`evolve_omega` at every time in ``times``; each point is independent."""
    m, omega0 = _prepare(h, omega0)
    return [_evolve(m, omega0, t) for t in np.asarray(times, dtype=float)]


def build_spectral_coeffs(h, omega0) -> SpectralCoefficients:
    """``omega_ij = <chi_i|Omega(0)|chi_j> / (<chi_i|phi_i><phi_j|chi_j>)``."""
    omega0 = _check_initial(omega0)
    spec = gen_eig(h)
    if spec.defective:
        raise DefectiveMatrixError(
            f"H is at (or numerically at) an exceptional point: eigenvector condition "
            f"number {spec.condition:.3e}; no biorthogonal expansion exists"
        )
    chi, phi = spec.left_vectors, spec.right_vectors
    norms = np.einsum("ij,ij->j", chi.conj(), phi)
    coeffs = (chi.conj().T @ omega0 @ chi) / np.outer(norms, norms.conj())
    return SpectralCoefficients(coeffs, spec)


def _phase_factors(lam: np.ndarray, t: float) -> np.ndarray:
    # f_i f_j^* = exp(-i(E_i - E_j)t) exp((G_i + G_j)t)
    f = np.exp(-1j * lam * t)
    return np.outer(f, f.conj())


def spectral_evolve(coeffs: SpectralCoefficients, t: float) -> np.ndarray:
    if coeffs.spectrum.defective:
        raise DefectiveMatrixError("spectral evolution is undefined at an exceptional point")
    phi = coeffs.spectrum.right_vectors
    with np.errstate(over="ignore", invalid="ignore"):
        omega = phi @ (coeffs.omega_ij * _phase_factors(coeffs.spectrum.eigenvalues, t)) @ phi.conj().T
    if not np.all(np.isfinite(omega)):
        raise NumericalRangeError(f"spectral evolution overflows at t = {t:g}")
    return (omega + omega.conj().T) / 2


def expansion_amplitudes(spectrum: BiorthogonalEigenSystem, psi0) -> np.ndarray:
    """Amplitudes ``c_n = <chi_n|psi0>`` so that ``psi0 = sum_n c_n |phi_n>``."""
    return spectrum.left_vectors.conj().T @ np.asarray(psi0, dtype=np.complex128)


def dominant_modes(spectrum: BiorthogonalEigenSystem, count: int = 2) -> list[int]:
    """Mode indices by descending imaginary part, then descending real part, then index."""
    lam = spectrum.eigenvalues
    order = sorted(range(len(lam)), key=lambda n: (-lam[n].imag, -lam[n].real, n))
    return order[:count]


def _two_modes(coeffs: SpectralCoefficients, c):
    spec = coeffs.spectrum
    if spec.defective:
        raise DefectiveMatrixError("asymptotic expansion is undefined at an exceptional point")
    if spec.dim < 2:
        raise ValueError("asymptotic expansion needs dim >= 2")
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (spec.dim,):
        raise ValueError(f"expected {spec.dim} amplitudes, got shape {c.shape}")
    i1, i2 = dominant_modes(spec, 2)
    return (c[i1], c[i2]), (spec.eigenvalues[i1], spec.eigenvalues[i2]), (
        spec.right_vectors[:, i1], spec.right_vectors[:, i2])


def asymptotic_omega(coeffs: SpectralCoefficients, c, t: float) -> np.ndarray:
    """Two-dominant-mode truncation of the expansion for a pure initial state."""
    (c1, c2), (l1, l2), (p1, p2) = _two_modes(coeffs, c)
    e1, g1, e2, g2 = l1.real, l1.imag, l2.real, l2.imag
    cross = c1 * np.conj(c2) * np.exp(-1j * (e1 - e2) * t) * np.outer(p1, p2.conj())
    omega = (
        abs(c1) ** 2 * np.exp(2 * g1 * t) * np.outer(p1, p1.conj())
        + abs(c2) ** 2 * np.exp(2 * g2 * t) * np.outer(p2, p2.conj())
        + (cross + cross.conj().T) * np.exp((g1 + g2) * t)
    )
    return omega


def asymptotic_neg_ln_tr(coeffs: SpectralCoefficients, c, t: float) -> float:
    (c1, c2), (l1, l2), (p1, p2) = _two_modes(coeffs, c)
    e1, g1, e2, g2 = l1.real, l1.imag, l2.real, l2.imag
    overlap = np.vdot(p2, p1)
    cross = 2.0 * np.real(c1 * np.conj(c2) * np.exp(-1j * (e1 - e2) * t) * overlap)
    tr = (
        abs(c1) ** 2 * math.exp(2 * g1 * t)
        + abs(c2) ** 2 * math.exp(2 * g2 * t)
        + cross * math.exp((g1 + g2) * t)
    )
    if not tr > 0:
        raise ValueError(f"truncated trace is non-positive ({tr:.3e}) at t = {t:g}")
    return -math.log(tr)


def time_grid(t_max: float, steps: int) -> np.ndarray:
    """Uniform grid on ``[0, t_max]`` with ``steps`` points, endpoints included."""
    if not (math.isfinite(t_max) and t_max > 0):
        raise ValueError(f"t_max must be positive and finite, got {t_max}")
    if int(steps) != steps or steps < 2:
        raise ValueError(f"steps must be an integer >= 2, got {steps}")
    return np.linspace(0.0, float(t_max), int(steps))
