"""Dense complex linear algebra for small square matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. The
matrix exponential and the non-Hermitian eigensolver are implemented here
directly; Hermitian diagonalisation, linear solves and the SVD used for
condition numbers are delegated to numpy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_square_matrix, check_hermitian
from .exceptions import NotPositiveError, NumericalRangeError

__all__ = [
    "HermitianEigenSystem",
    "BiorthogonalEigenSystem",
    "expm",
    "herm_eig",
    "gen_eig",
    "log_psd",
    "sqrt_psd",
    "trace",
    "adjoint",
    "fro_norm",
    "trace_norm_herm",
    "EP_CONDITION",
    "EP_GAP",
]

_EPS = np.finfo(float).eps

# Exceptional-point detection thresholds.
EP_CONDITION = 1e8
EP_GAP = 1e-6
_EP_OVERLAP = 1.0 - 1e-10


@dataclass(frozen=True)
class HermitianEigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class BiorthogonalEigenSystem:
    """Right/left eigenpairs of a general square matrix.

    Columns of ``right_vectors`` are unit-norm right eigenvectors. Columns of
    ``left_vectors`` satisfy ``left_vectors[:, i].conj() @ A == eigenvalues[i] *
    left_vectors[:, i].conj()`` and, away from exceptional points, are scaled so
    that ``left^H right = I``. At an exceptional point (``defective`` set) the left
    vectors are unit-norm and no biorthonormal scaling exists.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    defective: bool
    condition: float

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


# ----------------------------------------------------------------------------
# small helpers


def trace(a) -> complex:
    return complex(np.trace(as_square_matrix(a)))


def adjoint(a) -> np.ndarray:
    return as_square_matrix(a).conj().T


def fro_norm(a) -> float:
    return float(np.linalg.norm(as_square_matrix(a)))


def trace_norm_herm(a, tol: float = 1e-9) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(herm_eig(a, tol=tol).eigenvalues)))


# ----------------------------------------------------------------------------
# matrix exponential: scaling and squaring with diagonal Pade approximants

_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (
        17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0,
    ),
    13: (
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
        16380.0, 182.0, 1.0,
    ),
}

# Largest 1-norm for which the degree-m approximant meets unit roundoff.
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_uv(a: np.ndarray, m: int):
    b = _PADE_COEFFS[m]
    ident = np.eye(a.shape[0], dtype=a.dtype)
    a2 = a @ a
    if m == 13:
        a4 = a2 @ a2
        a6 = a2 @ a4
        u = a @ (
            a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
            + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident
        )
        v = (
            a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
            + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident
        )
        return u, v
    powers = [ident, a2]
    for _ in range(2, (m + 1) // 2):
        powers.append(powers[-1] @ a2)
    u = sum(b[j] * powers[j // 2] for j in range(m, 0, -2))
    v = sum(b[j] * powers[j // 2] for j in range(m - 1, -1, -2))
    return a @ u, v


def expm(a) -> np.ndarray:
    """Matrix exponential ``e^A``.

    Degree-13 (or lower, for small norms) diagonal Padé approximant with
    scaling and squaring, selected on the 1-norm. Valid for defective
    matrices. Raises ``NumericalRangeError`` instead of returning Inf/NaN.
    """
    a = as_square_matrix(a)
    norm1 = np.linalg.norm(a, 1)
    with np.errstate(over="ignore", invalid="ignore"):
        for m in (3, 5, 7, 9):
            if norm1 <= _THETA[m]:
                u, v = _pade_uv(a, m)
                result = np.linalg.solve(v - u, v + u)
                break
        else:
            s = max(0, int(np.ceil(np.log2(norm1 / _THETA[13])))) if norm1 > 0 else 0
            u, v = _pade_uv(a / 2.0**s, 13)
            result = np.linalg.solve(v - u, v + u)
            for _ in range(s):
                result = result @ result
                if not np.all(np.isfinite(result)):
                    break
    if not np.all(np.isfinite(result)):
        raise NumericalRangeError(
            f"matrix exponential overflows double precision (||A||_1 = {norm1:.3e})"
        )
    return result


# ----------------------------------------------------------------------------
# Hermitian eigenproblem and PSD functional calculus


def herm_eig(h, tol: float = 1e-9) -> HermitianEigenSystem:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    h = as_square_matrix(h, "H")
    check_hermitian(h, "H", tol)
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return HermitianEigenSystem(w, v)


def _psd_eig(p, tol: float) -> HermitianEigenSystem:
    es = herm_eig(p, tol)
    lam = es.eigenvalues
    scale = max(np.max(np.abs(lam)), np.finfo(float).tiny)
    if lam[0] < -tol * scale:
        raise NotPositiveError(
            f"matrix is not positive semidefinite: eigenvalue {lam[0]:.3e} "
            f"below -{tol:.0e} * {scale:.3e}"
        )
    return es


def sqrt_psd(p, tol: float = 1e-9) -> np.ndarray:
    es = _psd_eig(p, tol)
    lam = np.sqrt(np.clip(es.eigenvalues, 0.0, None))
    return HermitianEigenSystem(lam, es.eigenvectors).reconstruct()


def log_floor(p) -> float:
    """Eigenvalue floor applied before taking logarithms: ``1e-15 * Tr P``."""
    return 1e-15 * float(np.real(np.trace(p)))


def log_psd(p, tol: float = 1e-9) -> np.ndarray:
    """Natural logarithm of a positive semidefinite matrix.

    Eigenvalues below ``log_floor(P)`` are clamped to the floor.
    """
    p = as_square_matrix(p, "P")
    es = _psd_eig(p, tol)
    floor = log_floor(p)
    if floor <= 0.0:
        raise NotPositiveError("logarithm of a matrix with zero trace is undefined")
    lam = np.log(np.maximum(es.eigenvalues, floor))
    return HermitianEigenSystem(lam, es.eigenvectors).reconstruct()


# ----------------------------------------------------------------------------
# general (non-Hermitian) eigenproblem


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Unit-normalise and rotate so the largest entry is real positive."""
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def _eig2(a: np.ndarray):
    (p, b), (c, d) = a
    mean = (p + d) / 2
    root = np.sqrt(((p - d) / 2) ** 2 + b * c)
    lam = np.array([mean + root, mean - root])
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    vecs = np.empty((2, 2), dtype=np.complex128)
    basis = iter((np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)))
    for n, ln in enumerate(lam):
        # null vector of A - lambda I from either row, whichever is better scaled
        v1 = np.array([b, ln - p])
        v2 = np.array([ln - d, c])
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        if np.linalg.norm(v) <= 1e3 * _EPS * scale:
            # A is (numerically) a multiple of the identity
            v = next(basis)
        vecs[:, n] = _fix_phase(v)
    return lam, vecs


def _hessenberg(a: np.ndarray):
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * xnorm
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return h, q


def _givens(x: complex, y: complex):
    """Return (c, s) with [[c, s], [-conj(s), c]] @ [x, y] = [r, 0], c real."""
    if y == 0:
        return 1.0, 0.0
    if x == 0:
        return 0.0, np.conj(y) / abs(y)
    norm = np.hypot(abs(x), abs(y))
    c = abs(x) / norm
    s = (x / abs(x)) * np.conj(y) / norm
    return c, s


def _wilkinson_shift(t: np.ndarray) -> complex:
    (a, b), (c, d) = t
    mean = (a + d) / 2
    root = np.sqrt(((a - d) / 2) ** 2 + b * c)
    mu1, mu2 = mean + root, mean - root
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _schur(a: np.ndarray, max_sweeps: int = 60):
    """Complex Schur form ``A = Z T Z^H`` by shifted QR on the Hessenberg form."""
    n = a.shape[0]
    t, z = _hessenberg(a)
    hi = n - 1
    its = 0
    total = 0
    while hi > 0:
        lo = hi
        while lo > 0:
            off = abs(t[lo, lo - 1])
            if off <= _EPS * (abs(t[lo, lo]) + abs(t[lo - 1, lo - 1])) or off < np.finfo(float).tiny:
                t[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if total > max_sweeps * n:
            raise np.linalg.LinAlgError("QR iteration did not converge")
        if its % 11 == 0:
            # exceptional shift to break cycles
            mu = t[hi, hi] + 0.75 * abs(t[hi, hi - 1])
        else:
            mu = _wilkinson_shift(t[hi - 1:hi + 1, hi - 1:hi + 1])
        work = t[lo:hi + 1, lo:hi + 1] - mu * np.eye(hi - lo + 1)
        rots = []
        for k in range(hi - lo):
            c, s = _givens(work[k, k], work[k + 1, k])
            g = np.array([[c, s], [-np.conj(s), c]])
            work[k:k + 2, :] = g @ work[k:k + 2, :]
            rots.append((lo + k, g))
        for k, g in rots:
            t[k:k + 2, :] = g @ t[k:k + 2, :]
        for k, g in rots:
            gh = g.conj().T
            t[:, k:k + 2] = t[:, k:k + 2] @ gh
            z[:, k:k + 2] = z[:, k:k + 2] @ gh
    return np.triu(t), z


def _triangular_eigvecs(t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    smin = max(_EPS * np.linalg.norm(t), np.finfo(float).tiny)
    y = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        y[k, k] = 1.0
        for j in range(k - 1, -1, -1):
            den = t[j, j] - t[k, k]
            if abs(den) < smin:
                den = smin
            y[j, k] = -(t[j, j + 1:k + 1] @ y[j + 1:k + 1, k]) / den
    return y


def _eig_qr(a: np.ndarray):
    n = a.shape[0]
    t, z = _schur(a)
    lam = np.diag(t).copy()
    vecs = z @ _triangular_eigvecs(t)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    ident = np.eye(n)
    for k in range(n):
        v = vecs[:, k] / np.linalg.norm(vecs[:, k])
        # one step of inverse iteration against the original matrix
        shift = lam[k] + 1e3 * _EPS * scale
        try:
            w = np.linalg.solve(a - shift * ident, v)
            if np.all(np.isfinite(w)) and np.linalg.norm(w) > 0:
                v = w
        except np.linalg.LinAlgError:
            pass
        vecs[:, k] = _fix_phase(v)
    return lam, vecs


def _is_defective(lam: np.ndarray, vecs: np.ndarray, cond: float, scale: float) -> bool:
    if not np.isfinite(cond) or cond > EP_CONDITION:
        return True
    n = len(lam)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(lam[i] - lam[j]) <= EP_GAP * scale:
                if abs(np.vdot(vecs[:, i], vecs[:, j])) >= _EP_OVERLAP:
                    return True
    return False


def _null_vector(m: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(m)
    return vh[-1].conj()


def gen_eig(a) -> BiorthogonalEigenSystem:
    """Biorthonormal eigen-decomposition of a general complex matrix.

    Closed form for 2x2 matrices; Hessenberg reduction, shifted QR and
    inverse iteration otherwise. The system is flagged ``defective`` when the
    eigenvector matrix has condition number above ``EP_CONDITION`` or when two
    eigenvalues closer than ``EP_GAP`` times the matrix scale share (numerically)
    the same eigenvector.
    """
    a = as_square_matrix(a)
    n = a.shape[0]
    if n == 1:
        lam = a[0].copy()
        vecs = np.ones((1, 1), dtype=np.complex128)
    elif n == 2:
        lam, vecs = _eig2(a)
    else:
        lam, vecs = _eig_qr(a)

    cond = float(np.linalg.cond(vecs)) if n > 1 else 1.0
    scale = max(np.linalg.norm(a), np.max(np.abs(lam)), np.finfo(float).tiny)
    defective = _is_defective(lam, vecs, cond, scale)

    if not defective:
        left = np.linalg.inv(vecs).conj().T
    else:
        ident = np.eye(n)
        left = np.column_stack(
            [_fix_phase(_null_vector((a - lam[k] * ident).conj().T)) for k in range(n)]
        )
    return BiorthogonalEigenSystem(lam, vecs, left, defective, cond)
