"""The exponential Robin nonlinearity and its elementary bounds.

The boundary term ``e^{a r} - e^{-(1-a) r}`` is written as ``f_a(r) * r`` with

    f_a(r) = (e^{a r} - e^{-(1-a) r}) / r,   f_a(0) = 1,

so that the Picard scheme can freeze ``f_a`` at the previous iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SERIES_SWITCH = 1e-4
SERIES_DEGREE = 6
OVERFLOW_GUARD = 700.0
P2_TERMS = 60


class OverflowRangeError(ValueError):
    """Argument too large for the exponential to be evaluated safely."""


@dataclass(frozen=True)
class Alpha:
    value: float

    def __post_init__(self):
        if not 0.0 < self.value < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.value}")

    @property
    def delta(self) -> float:
        return max(self.value, 1.0 - self.value)


def _alpha(a) -> Alpha:
    return a if isinstance(a, Alpha) else Alpha(float(a))


def _guard(r: np.ndarray) -> None:
    if not np.all(np.isfinite(r)):
        raise OverflowRangeError("non-finite argument")
    if r.size and np.max(np.abs(r)) > OVERFLOW_GUARD:
        raise OverflowRangeError(f"|r| = {np.max(np.abs(r)):.6g} exceeds {OVERFLOW_GUARD}")


def taylor_coeff_b(a, m: int) -> float:
    """``b_m(a) = (a^m - (-1)^m (1-a)^m) / m!``; ``f_a(r) = sum_{m>=1} b_m r^{m-1}``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    x = _alpha(a).value
    if m == 1:
        return 1.0
    num = x**m - (-1.0) ** m * (1.0 - x) ** m
    if m <= 170:
        return num / math.factorial(m)
    return math.copysign(math.exp(math.log(abs(num)) - math.lgamma(m + 1)), num) if num else 0.0


def _series(a: Alpha, r: np.ndarray, degree: int) -> np.ndarray:
    coeffs = [taylor_coeff_b(a, m + 1) for m in range(degree + 1)]
    # Horner on 1 + b_2 r + ... + b_{degree+1} r^degree
    out = np.full_like(r, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        out = out * r + c
    return out


def f_alpha(a, r):
    """Evaluate ``f_a`` elementwise; scalars in, scalar out.

    Near zero a degree-6 Taylor polynomial is used; elsewhere the closed
    form, written with ``expm1`` so the numerator does not cancel.
    """
    a = _alpha(a)
    arr = np.asarray(r, dtype=float)
    _guard(arr)
    small = np.abs(arr) < SERIES_SWITCH
    out = np.empty_like(arr)
    out[small] = _series(a, arr[small], SERIES_DEGREE)
    big = arr[~small]
    out[~small] = (np.expm1(a.value * big) - np.expm1(-(1.0 - a.value) * big)) / big
    return float(out) if out.ndim == 0 else out


def f_alpha_closed(a, r):
    """Closed form only (no series branch), for cross-branch checks."""
    a = _alpha(a)
    arr = np.asarray(r, dtype=float)
    _guard(arr)
    out = (np.expm1(a.value * arr) - np.expm1(-(1.0 - a.value) * arr)) / arr
    return float(out) if out.ndim == 0 else out


def f_alpha_series(a, r, degree: int = SERIES_DEGREE):
    """Truncated Taylor polynomial ``1 + sum_{m=1}^{degree} b_{m+1} r^m``."""
    arr = np.asarray(r, dtype=float)
    out = _series(_alpha(a), arr, degree)
    return float(out) if out.ndim == 0 else out


def p3_bound(a, r):
    """Upper bound ``2 d (1 + d|r| e^{d|r|})`` with ``d = max(a, 1-a)``."""
    a = _alpha(a)
    arr = np.asarray(r, dtype=float)
    _guard(arr)
    d = a.delta
    x = d * np.abs(arr)
    out = 2.0 * d * (1.0 + x * np.exp(x))
    return float(out) if out.ndim == 0 else out


def p2_bound(a, r, terms: int = P2_TERMS):
    """Truncated majorant ``2 sum_{k=1}^{terms} d^k |r|^{k+1} / k!`` of ``f_a(r) r^2``.

    Truncation only lowers the majorant, so an inequality verified against
    it also holds for the full series; see :func:`p2_tail_bound` for the gap.
    """
    a = _alpha(a)
    arr = np.abs(np.asarray(r, dtype=float))
    x = a.delta * arr
    term = np.array(x, dtype=float)  # d|r| / 1!
    total = term.copy()
    for k in range(2, terms + 1):
        term = term * x / k
        total = total + term
    out = 2.0 * arr * total
    return float(out) if out.ndim == 0 else out


def p2_tail_bound(a, r, terms: int = P2_TERMS) -> float:
    """Relative size of the discarded tail of :func:`p2_bound` (geometric bound).

    ``inf`` when ``d|r| >= terms + 1`` and the bound is not applicable.
    """
    x = _alpha(a).delta * abs(float(r))
    if x == 0.0:
        return 0.0
    rho = x / (terms + 1)
    if rho >= 1.0:
        return math.inf
    log_last = terms * math.log(x) - math.lgamma(terms + 1)
    log_total = math.log(math.expm1(x))
    return math.exp(log_last - log_total) * rho / (1.0 - rho)
