"""Explicit constants: embedding constants, the majorant C, the series R(z),
the a priori radius M0, the admissibility threshold Lambda and the
contraction factor.

Large products (``p^{(p-2)/2}``, factorials, ``R`` at large arguments) are
accumulated in log space. ``log_*`` variants return natural logarithms and
stay finite where the plain values overflow or underflow a double.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

LOG_4_OVER_PI = math.log(4.0 / math.pi)
C_GRID_MAX = 1e4
R_REL_TOL = 1e-15
R_MAX_TERMS = 50_000_000
BETA2 = 1.0  # beta_2 <= lambda_2 = 1, used as the M0 prefactor


def log_tilde_R(p: float) -> float:
    if not p > 2:
        raise ValueError(f"tilde_R requires p > 2, got {p}")
    return (math.log(3.0) + (p - 1.0) * LOG_4_OVER_PI + 0.5 * (p - 2.0) * math.log(p)) / p


def tilde_R(p: float) -> float:
    """``(3 (4/pi)^{p-1} p^{(p-2)/2})^{1/p}``, the first-case constant for mean-zero data."""
    return math.exp(log_tilde_R(p))


def log_lambda_p(p: float) -> float:
    if p < 2:
        raise ValueError(f"lambda_p requires p >= 2, got {p}")
    if p == 2:
        return 0.0
    return math.log(2.0) + log_tilde_R(p)


def lambda_p(p: float) -> float:
    """Embedding constant of ``H^{1/2}_{2pi}`` into ``L^p_{2pi}``.

    ``2 * tilde_R(p)`` for ``p > 2`` and 1 at ``p = 2``, where the
    ``H^{1/2}`` weights ``(1+k^2)^{1/2} >= 1`` give the bound directly.
    """
    return math.exp(log_lambda_p(p))


def _log_C_requirement(p: np.ndarray) -> np.ndarray:
    # log of (lambda_p^p / p^{(p-2)/2})^{1/(p-2)}; the p^{(p-2)/2} factors cancel exactly
    return (p * math.log(2.0) + math.log(3.0) + (p - 1.0) * LOG_4_OVER_PI) / (p - 2.0)


def majorant_satisfied(C: float, p) -> np.ndarray:
    """Whether ``lambda_p^p <= C^{p-2} p^{(p-2)/2}`` holds, compared in log space."""
    p = np.asarray(p, dtype=float)
    lhs = p * math.log(2.0) + math.log(3.0) + (p - 1.0) * LOG_4_OVER_PI + 0.5 * (p - 2.0) * np.log(p)
    rhs = (p - 2.0) * math.log(C) + 0.5 * (p - 2.0) * np.log(p)
    return lhs <= rhs


def majorant_C(grid_size: int = 4001) -> float:
    """Smallest ``C`` with ``lambda_p^p <= C^{p-2} p^{(p-2)/2}`` for every ``p >= 3``.

    Takes the supremum of the per-``p`` requirement over a geometric grid on
    ``[3, 1e4]`` and the ``p -> inf`` limit ``8/pi``, then rounds up by ulps
    until the log-space check passes on the integers ``3..200`` (equality
    holds at ``p = 3``).
    """
    grid = np.geomspace(3.0, C_GRID_MAX, grid_size)
    log_req = max(float(np.max(_log_C_requirement(grid))), math.log(8.0 / math.pi))
    C = math.exp(log_req)
    check = np.arange(3, 201, dtype=float)
    while not np.all(majorant_satisfied(C, check)):
        C = math.nextafter(C, math.inf)
    return C


def log_q_coeff(m) -> np.ndarray | float:
    m_arr = np.asarray(m, dtype=float)
    if np.any(m_arr < 3):
        raise ValueError("q_m is defined for m >= 3")
    out = math.log(4.0) - gammaln(m_arr + 2.0) + 0.5 * (m_arr + 2.0) * np.log(m_arr + 2.0)
    return float(out) if out.ndim == 0 else out


def q_coeff(m: int) -> float:
    """``q_m = 4 (m+2)^{(m+2)/2} / (m+1)!``."""
    if m < 3:
        raise ValueError("q_m is defined for m >= 3")
    if m <= 60 and m % 2 == 0:
        # even m: integer power, exact rational evaluation in doubles
        return 4.0 * float((m + 2) ** ((m + 2) // 2)) / float(math.factorial(m + 1))
    return math.exp(log_q_coeff(m))


def log_R_partial(z: float, terms: int) -> float:
    """Log of ``sum_{m=3}^{terms+2} q_m z^{m-3}`` (``terms`` summands)."""
    if z < 0:
        raise ValueError("z must be >= 0")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    m = np.arange(3, terms + 3, dtype=float)
    logs = log_q_coeff(m)
    if z == 0:
        return float(logs[0])
    logs = logs + (m - 3.0) * math.log(z)
    return float(logsumexp(logs))


def R_partial(z: float, terms: int) -> float:
    """Partial sum of ``R`` with a fixed number of terms (``inf`` on overflow)."""
    lr = log_R_partial(z, terms)
    return math.exp(lr) if lr < 709.0 else math.inf


def R_terms_needed(z: float, rel_tol: float = R_REL_TOL) -> int:
    """Number of terms after which the geometric tail bound is below ``rel_tol``.

    Past the index where the ratio bound ``rho`` drops below 1, the tail
    after term ``m`` is at most ``t_m rho/(1-rho)``; the first ``m`` where
    that is ``<= rel_tol`` times the running sum is returned. The terms
    peak near ``m = e z^2``, which caps the usable ``z`` at a few thousand.
    """
    if z == 0:
        return 1
    logz = math.log(z)
    log_tol = math.log(rel_tol)
    block = 4096
    m0 = 3
    running = -math.inf
    while m0 - 3 <= R_MAX_TERMS:
        m = np.arange(m0, m0 + block, dtype=float)
        logs = log_q_coeff(m) + (m - 3.0) * logz
        cum = np.logaddexp.accumulate(np.concatenate([[running], logs]))[1:]
        rho = z * math.sqrt(math.e) * np.sqrt(m + 3.0) / (m + 2.0)
        ok = rho < 1.0
        log_tail = np.full_like(m, np.inf)
        log_tail[ok] = logs[ok] + np.log(rho[ok] / (1.0 - rho[ok]))
        hit = np.flatnonzero(log_tail - cum <= log_tol)
        if hit.size:
            return int(m[hit[0]]) - 2  # summands m = 3..m[hit]
        running = float(cum[-1])
        m0 += block
        block = min(2 * block, 1 << 20)
    raise ValueError(f"R({z:g}) needs more than {R_MAX_TERMS} terms")


def log_R_entire(z: float, rel_tol: float = R_REL_TOL) -> float:
    """Log of ``R(z) = sum_{m>=3} q_m z^{m-3}`` truncated at relative tail ``rel_tol``."""
    if z < 0:
        raise ValueError("z must be >= 0")
    if not 0 < rel_tol <= 1e-6:
        raise ValueError("rel_tol must lie in (0, 1e-6]")
    return log_R_partial(z, R_terms_needed(z, rel_tol))


def R_entire(z: float, rel_tol: float = R_REL_TOL) -> float:
    """``R(z)``; returns ``inf`` when the value exceeds the double range."""
    lr = log_R_entire(z, rel_tol)
    return math.exp(lr) if lr < 709.0 else math.inf


def compute_M0(phi_l2: float, g_l2: float, allow_zero_phi: bool = False) -> float:
    """A priori V-norm radius ``beta_2 (||phi||_{L2(G_N)} + ||g||_{L2(G_R)})`` with ``beta_2 = 1``."""
    if phi_l2 < 0 or g_l2 < 0:
        raise ValueError("norms must be nonnegative")
    if phi_l2 == 0 and not allow_zero_phi:
        raise ValueError("Neumann data must not vanish identically (pass allow_zero_phi to override)")
    return BETA2 * (phi_l2 + g_l2)


def log_Lambda_bracket(M0: float) -> float:
    """Log of ``lambda_3^3 M0 + lambda_4^4 M0^2 + (C M0)^3 R(C M0)``."""
    if not M0 > 0:
        raise ValueError("Lambda is undefined for M0 <= 0")
    C = majorant_C()
    z = C * M0
    parts = [
        3.0 * log_lambda_p(3) + math.log(M0),
        4.0 * log_lambda_p(4) + 2.0 * math.log(M0),
        3.0 * math.log(z) + log_R_entire(z),
    ]
    return float(logsumexp(parts))


def log_Lambda(M0: float) -> float:
    return -log_Lambda_bracket(M0)


def compute_Lambda(M0: float) -> float:
    """Admissibility threshold; underflows to 0.0 once ``C*M0`` is large (about 25)."""
    return math.exp(log_Lambda(M0))


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    margin: float
    bound: float
    min_value: float
    max_value: float


def check_admissible(varphi_samples, xi: float, Lambda: float) -> AdmissibilityVerdict:
    """``0 <= varphi <= xi*Lambda`` at every sample (non-strict)."""
    v = np.asarray(varphi_samples, dtype=float)
    if v.size == 0:
        raise ValueError("no samples")
    if not 0 < xi < 1:
        raise ValueError("xi must lie in (0, 1)")
    bound = xi * Lambda
    lo, hi = float(np.min(v)), float(np.max(v))
    return AdmissibilityVerdict(lo >= 0.0 and hi <= bound, bound - hi, bound, lo, hi)


def harmonic_sum_bounds(theta: float, N: int) -> tuple[float, float]:
    """Right-hand sides ``1 + N^{1-t}/(1-t)`` and ``2 N^{1-t}/(1-t)``."""
    a = N ** (1.0 - theta) / (1.0 - theta)
    return 1.0 + a, 2.0 * a


DEFAULT_P_TABLE = (2, 3, 4, 6, 8, 12)


@dataclass
class ConstantsReport:
    lambda_table: dict[str, float]
    tilde_R_table: dict[str, float | None]
    majorant_C: float
    M0: float
    Lambda: float
    log_Lambda: float | None
    xi: float
    K: float
    R_at_CM0: float | None
    log_R_at_CM0: float | None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_rows(self) -> list[tuple]:
        return [(p, self.tilde_R_table[p], self.lambda_table[p]) for p in self.lambda_table]


def _key(p) -> str:
    return f"{float(p):g}"


def constants_report(M0: float, xi: float, p_values=DEFAULT_P_TABLE) -> ConstantsReport:
    if not 0 < xi < 1:
        raise ValueError("xi must lie in (0, 1)")
    C = majorant_C()
    notes = []
    if M0 > 0:
        z = C * M0
        lr = log_R_entire(z)
        R = math.exp(lr) if lr < 709.0 else None
        lL = log_Lambda(M0)
        Lam = math.exp(lL)
        if R is None:
            notes.append("R(C*M0) exceeds the double range; see log_R_at_CM0")
        if Lam == 0.0:
            notes.append("Lambda underflows to 0.0; see log_Lambda")
    else:
        lr, R, lL, Lam = math.log(q_coeff(3)), q_coeff(3), None, math.inf
        notes.append("M0 = 0: Lambda is unbounded, any nonnegative coefficient is admissible")
    return ConstantsReport(
        lambda_table={_key(p): lambda_p(p) for p in p_values},
        tilde_R_table={_key(p): (tilde_R(p) if p > 2 else None) for p in p_values},
        majorant_C=C,
        M0=M0,
        Lambda=Lam,
        log_Lambda=lL,
        xi=xi,
        K=xi,
        R_at_CM0=R,
        log_R_at_CM0=lr,
        notes=notes,
    )
