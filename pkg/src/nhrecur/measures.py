"""Information-dynamics measures and the two-level closed forms.

Four descriptions are provided: the trace distance between two normalized
states, the von Neumann entropy of the normalized state, the non-Hermitian
entropy ``-Tr[rho ln Omega]`` and ``-ln Tr Omega``. Natural logarithms
throughout (k_B = hbar = 1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ._validation import as_square_matrix, check_density_matrix
from .dynamics import basis_state, evolve_many
from .exceptions import NotPositiveError
from .hamiltonian import (
    Family,
    PhaseClass,
    TwoLevelParams,
    classify_phase,
    delta,
    symmetry_scale,
)
from .linalg import herm_eig, log_floor, log_psd, trace_norm_herm

__all__ = [
    "MeasureTag",
    "MeasureSeries",
    "PatternClass",
    "distinguishability",
    "von_neumann_entropy",
    "nh_entropy",
    "neg_ln_tr",
    "require_full_rank",
    "closed_form_pt_unbroken",
    "closed_form_pt_broken",
    "closed_form_apt_unbroken",
    "closed_form_apt_broken",
    "closed_form_neg_ln_tr",
    "classify_pattern",
    "measure_series",
    "time_derivative",
    "trend_slope",
    "refined_trend_slope",
    "dominant_frequency",
    "pearson",
]


class MeasureTag(enum.Enum):
    DIST = "dist"
    SVN = "svn"
    SNH = "snh"
    NEG_LN_TR = "neglntr"


class PatternClass(enum.Enum):
    """Qualitative behaviour of the ``-ln Tr Omega`` series."""

    PERIODIC_OSCILLATION = "PeriodicOscillation"
    DECAYING_OSCILLATION = "DecayingOscillation"
    GROWING_OSCILLATION = "GrowingOscillation"
    MONOTONE_DECREASE = "MonotoneDecrease"
    MONOTONE_INCREASE = "MonotoneIncrease"
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"


@dataclass(frozen=True)
class MeasureSeries:
    times: np.ndarray
    values: np.ndarray
    tag: MeasureTag

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{self.tag.value} series contains non-finite values")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


# ----------------------------------------------------------------------------
# pointwise measures


_SUPPORT_TOL = 1e-12


def distinguishability(rho1, rho2) -> float:
    """Trace distance ``Tr|rho1 - rho2| / 2`` of two normalized density matrices."""
    rho1 = as_square_matrix(rho1, "rho1")
    rho2 = as_square_matrix(rho2, "rho2")
    check_density_matrix(rho1, "rho1")
    check_density_matrix(rho2, "rho2")
    diff = rho1 - rho2
    # a - b is exactly -(b - a); fixing the sign makes D bitwise symmetric
    flat = diff.view(np.float64).ravel()
    nonzero = np.flatnonzero(flat)
    if nonzero.size and flat[nonzero[0]] < 0:
        diff = -diff
    diff = (diff + diff.conj().T) / 2
    return float(np.clip(0.5 * trace_norm_herm(diff), 0.0, 1.0))


def _entropy_terms(lam: np.ndarray) -> float:
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))


def von_neumann_entropy(rho) -> float:
    """``-Tr[rho ln rho]`` with ``0 ln 0 = 0``."""
    rho = as_square_matrix(rho, "rho")
    check_density_matrix(rho, "rho")
    lam = np.clip(herm_eig(rho).eigenvalues, 0.0, None)
    return float(np.clip(_entropy_terms(lam), 0.0, math.log(rho.shape[0])))


def nh_entropy(rho, omega) -> float:
    """Non-Hermitian entropy ``-Tr[rho ln Omega]``; may be negative.

    Eigenvalues of ``omega`` under ``log_floor(omega)`` are clamped, which is
    harmless while ``rho`` has no weight on them (the case ``rho = Omega / Tr
    Omega`` for an ill-conditioned but full-rank ``Omega``). A weight above
    1e-12 there means the entropy is genuinely divergent and raises.
    """
    rho = as_square_matrix(rho, "rho")
    omega = as_square_matrix(omega, "omega")
    check_density_matrix(rho, "rho")
    es = herm_eig(omega)
    low = es.eigenvalues < log_floor(omega)
    if np.any(low):
        v = es.eigenvectors[:, low]
        weight = float(np.real(np.einsum("ij,ik,kj->", v.conj(), rho, v)))
        if weight > _SUPPORT_TOL:
            raise NotPositiveError(
                f"omega is rank deficient (smallest eigenvalue {es.eigenvalues[0]:.3e}) where rho "
                f"has weight {weight:.3e}; the non-Hermitian entropy needs a full-rank Omega(0)"
            )
    return float(-np.real(np.trace(rho @ log_psd(omega))))


def require_full_rank(omega0) -> None:
    """Raise unless ``omega0`` has no eigenvalue below the log floor."""
    omega0 = as_square_matrix(omega0, "omega0")
    lam_min = herm_eig(omega0).eigenvalues[0]
    if lam_min < log_floor(omega0):
        raise NotPositiveError(
            f"Omega(0) is rank deficient (smallest eigenvalue {lam_min:.3e}); "
            "the non-Hermitian entropy needs a full-rank Omega(0)"
        )


def neg_ln_tr(omega) -> float:
    tr = float(np.real(np.trace(as_square_matrix(omega, "omega"))))
    if not tr > 0:
        raise ValueError(f"Tr Omega must be positive, got {tr:.3e}")
    return -math.log(tr)


# ----------------------------------------------------------------------------
# closed forms for Omega(0) = I/2


def _ratio(p: TwoLevelParams, sign: float) -> float:
    return symmetry_scale(p) / (sign * delta(p))


def closed_form_pt_unbroken(p: TwoLevelParams, t: float) -> float:
    """``-ln[(1-a)/2 cos(2 sqrt(delta) t) + (1+a)/2]``, ``a = (r1^2 + r^2 sin^2 theta)/delta``."""
    d = delta(p)
    if not d > 0:
        raise ValueError(f"PT unbroken closed form needs delta > 0, got {d:.6g}")
    a = _ratio(p, 1.0)
    return -math.log((1 - a) / 2 * math.cos(2 * math.sqrt(d) * t) + (1 + a) / 2)


def closed_form_pt_broken(p: TwoLevelParams, t: float) -> float:
    """``-ln[(1+b)/2 cosh(2 sqrt(-delta) t) + (1-b)/2]``, ``b = (r1^2 + r^2 sin^2 theta)/(-delta)``.

    Continuation of :func:`closed_form_pt_unbroken` to delta < 0.
    """
    d = delta(p)
    if not d < 0:
        raise ValueError(f"PT broken closed form needs delta < 0, got {d:.6g}")
    b = _ratio(p, -1.0)
    return -math.log((1 + b) / 2 * math.cosh(2 * math.sqrt(-d) * t) + (1 - b) / 2)


def closed_form_apt_unbroken(p: TwoLevelParams, t: float) -> float:
    """``-2 t r cos(theta) - ln[(1+a)/2 cosh(2 sqrt(delta) t) + (1-a)/2]``."""
    d = delta(p)
    if not d > 0:
        raise ValueError(f"anti-PT unbroken closed form needs delta > 0, got {d:.6g}")
    a = _ratio(p, 1.0)
    return (-2 * t * p.r * math.cos(p.theta)
            - math.log((1 + a) / 2 * math.cosh(2 * math.sqrt(d) * t) + (1 - a) / 2))


def closed_form_apt_broken(p: TwoLevelParams, t: float) -> float:
    """``-2 t r cos(theta) - ln[(1-b)/2 cos(2 sqrt(-delta) t) + (1+b)/2]``."""
    d = delta(p)
    if not d < 0:
        raise ValueError(f"anti-PT broken closed form needs delta < 0, got {d:.6g}")
    b = _ratio(p, -1.0)
    return (-2 * t * p.r * math.cos(p.theta)
            - math.log((1 - b) / 2 * math.cos(2 * math.sqrt(-d) * t) + (1 + b) / 2))


def closed_form_neg_ln_tr(p: TwoLevelParams, family, t: float) -> float:
    """Dispatch to the closed form matching ``family`` and the phase of ``p``."""
    family = Family(family)
    phase = classify_phase(p)
    if phase is PhaseClass.EXCEPTIONAL_POINT:
        raise ValueError("no closed form at the exceptional point")
    unbroken = phase is PhaseClass.UNBROKEN
    if family is Family.PT:
        fn = closed_form_pt_unbroken if unbroken else closed_form_pt_broken
    elif family is Family.APT:
        fn = closed_form_apt_unbroken if unbroken else closed_form_apt_broken
    else:
        raise ValueError("closed forms exist only for the apt and pt families")
    return fn(p, t)


# ----------------------------------------------------------------------------
# pattern classification


def classify_pattern(p: TwoLevelParams, family, tol: float = 1e-12) -> PatternClass:
    """Analytic pattern of ``-ln Tr Omega(t)`` from the sign of its linear trend.

    Anti-PT broken: the trend slope is ``-2 r cos(theta)``; anti-PT unbroken: the
    late-time slope is ``-2 r cos(theta) - 2 sqrt(delta)``. ``tol`` is relative to
    the parameter scale.
    """
    family = Family(family)
    phase = classify_phase(p)
    if phase is PhaseClass.EXCEPTIONAL_POINT:
        raise ValueError("pattern is undefined at the exceptional point (no closed form)")
    scale = tol * (p.r + p.r1 + 1.0)
    rc = p.r * math.cos(p.theta)
    if family is Family.PT:
        if phase is PhaseClass.UNBROKEN:
            return PatternClass.PERIODIC_OSCILLATION
        return PatternClass.MONOTONE_DECREASE
    if family is not Family.APT:
        raise ValueError("pattern classification is defined for the apt and pt families")
    if phase is PhaseClass.BROKEN:
        if abs(rc) <= scale:
            return PatternClass.PERIODIC_OSCILLATION
        return PatternClass.DECAYING_OSCILLATION if rc > 0 else PatternClass.GROWING_OSCILLATION
    growth = rc + math.sqrt(delta(p))
    if abs(growth) <= scale:
        return PatternClass.ASYMPTOTICALLY_STABLE
    return PatternClass.MONOTONE_DECREASE if growth > 0 else PatternClass.MONOTONE_INCREASE


# ----------------------------------------------------------------------------
# series


def _tags(tags: Iterable) -> list[MeasureTag]:
    return [MeasureTag(t) for t in tags]


def measure_series(h, omega0, times: Sequence[float], tags: Iterable,
                   dist_pair: Optional[tuple] = None) -> list[MeasureSeries]:
    """Evaluate the requested measures on a time grid.

    ``svn``, ``snh`` and ``neglntr`` evolve ``omega0``. ``dist`` evolves the two
    states in ``dist_pair`` (default ``|0><0|`` and ``|1><1|``) and reports their
    trace distance after normalization.
    """
    tags = _tags(tags)
    times = np.asarray(times, dtype=float)
    if MeasureTag.SNH in tags:
        require_full_rank(omega0)
    values = {tag: np.empty(len(times)) for tag in tags}
    need_single = any(tag is not MeasureTag.DIST for tag in tags)
    if MeasureTag.DIST in tags:
        dim = np.shape(getattr(h, "matrix", h))[0]
        if dist_pair is None:
            dist_pair = (basis_state(0, dim), basis_state(1, dim))
    states = evolve_many(h, omega0, times) if need_single else None
    if MeasureTag.DIST in tags:
        pair = list(zip(evolve_many(h, dist_pair[0], times), evolve_many(h, dist_pair[1], times)))
    for k in range(len(times)):
        for tag in tags:
            if tag is MeasureTag.SVN:
                values[tag][k] = von_neumann_entropy(states[k].rho)
            elif tag is MeasureTag.SNH:
                values[tag][k] = nh_entropy(states[k].rho, states[k].omega)
            elif tag is MeasureTag.NEG_LN_TR:
                values[tag][k] = neg_ln_tr(states[k].omega)
            else:
                s1, s2 = pair[k]
                values[tag][k] = distinguishability(s1.rho, s2.rho)
    return [MeasureSeries(times, values[tag], tag) for tag in tags]


def time_derivative(series: MeasureSeries) -> np.ndarray:
    """Finite-difference ``d/dt`` of a series (second order in the interior)."""
    return np.gradient(series.values, series.times)


def pearson(x, y) -> float:
    return float(np.corrcoef(np.asarray(x, float), np.asarray(y, float))[0, 1])


def trend_slope(times, values) -> float:
    """Least-squares slope of ``values`` against ``times``."""
    return float(np.polyfit(np.asarray(times, float), np.asarray(values, float), 1)[0])


def dominant_frequency(times, values) -> float:
    """Angular frequency of the largest non-zero FFT peak of the detrended series."""
    times = np.asarray(times, float)
    values = np.asarray(values, float)
    detrended = values - np.polyval(np.polyfit(times, values, 1), times)
    spectrum = np.abs(np.fft.rfft(detrended))
    freqs = np.fft.rfftfreq(len(times), d=times[1] - times[0])
    k = 1 + int(np.argmax(spectrum[1:]))
    return float(2 * np.pi * freqs[k])


def _polish_minimum(fn, t: float, lo: float, hi: float, iterations: int = 3) -> float:
    # Newton steps on central differences: the function is too flat near its
    # minimum for comparison-based search to place it better than sqrt(eps).
    h = 1e-5 * (hi - lo)
    for _ in range(iterations):
        fm, f0, fp = fn(t - h), fn(t), fn(t + h)
        curvature = fm - 2 * f0 + fp
        if not curvature > 0:
            break
        step = h * (fm - fp) / (2 * curvature)
        if not lo <= t + step <= hi:
            break
        t += step
    return t


def refined_trend_slope(fn: Callable[[float], float], times, values) -> float:
    """Trend slope of ``f(t) = slope * t + periodic(t)``.

    The local minima of such a function are spaced by exactly one period and
    rise by exactly ``slope * period``. Minima are located on the sampled
    ``values``, refined on ``fn`` and polished with a few Newton steps; the slope
    is the per-minimum rise divided by the per-minimum spacing. Falls back to
    :func:`trend_slope` with fewer than two interior minima.
    """
    times = np.asarray(times, float)
    values = np.asarray(values, float)
    idx = [k for k in range(1, len(values) - 1)
           if values[k] <= values[k - 1] and values[k] <= values[k + 1]]
    if len(idx) < 2:
        return trend_slope(times, values)
    t_min, f_min = [], []
    for k in idx:
        res = minimize_scalar(fn, bounds=(times[k - 1], times[k + 1]), method="bounded",
                              options={"xatol": 1e-12})
        t_k = _polish_minimum(fn, res.x, times[k - 1], times[k + 1])
        t_min.append(t_k)
        f_min.append(fn(t_k))
    k = np.arange(len(t_min), dtype=float)
    return trend_slope(k, f_min) / trend_slope(k, t_min)
