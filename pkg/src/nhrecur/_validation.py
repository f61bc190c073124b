"""Input validation helpers shared by the public modules."""

from __future__ import annotations

import numpy as np

from .exceptions import NotHermitianError, NotPositiveError


def as_square_matrix(a, name: str = "A") -> np.ndarray:
    """Return ``a`` as a finite, square complex128 array.

    Objects exposing a ``matrix`` attribute (e.g. ``NHHamiltonian``) are
    unwrapped first.
    """
    a = getattr(a, "matrix", a)
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def hermitian_residual(a: np.ndarray) -> float:
    """Relative Frobenius residual ``||A - A^H|| / ||A||`` (0 for the zero matrix)."""
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - a.conj().T) / scale)


def check_hermitian(a: np.ndarray, name: str = "A", tol: float = 1e-9) -> None:
    res = hermitian_residual(a)
    if res > tol:
        raise NotHermitianError(
            f"{name} is not Hermitian: ||{name} - {name}^H||_F / ||{name}||_F = {res:.3e} > {tol:.1e}"
        )


def check_density_matrix(rho: np.ndarray, name: str = "rho", tol: float = 1e-9) -> None:
    """Hermitian, positive semidefinite and unit trace, all within ``tol``."""
    check_hermitian(rho, name, tol)
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"{name} must have unit trace, got Tr = {tr.real:.12g}")
    lam_min = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
    if lam_min < -tol:
        raise NotPositiveError(f"{name} is not positive semidefinite: smallest eigenvalue {lam_min:.3e}")
