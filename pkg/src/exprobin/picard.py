"""Picard iteration for the exponential Robin problem.

Starting from ``u_0`` (zero by default), each step freezes the Robin weight
``f_alpha(u_{k-1})`` at the Robin nodes and solves the linear problem for
``u_k``. The iteration stops once the increment ``||u_k - u_{k-1}||_V``
drops below ``tol``; residuals are computed afterwards as a certificate.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .geometry import ROBIN
from .linear_step import ProblemInstance, ResidualRecord, assemble, boundary_residuals, solve_step
from .nonlinearity import OverflowRangeError, f_alpha
from .spectral import TrigPoly, v_norm

BALL_RTOL = 1e-8


class NonConvergenceError(RuntimeError):
    """Raised when ``max_iter`` steps did not reach the tolerance.

    Carries the partial report and the last iterate.
    """

    def __init__(self, message: str, report: "SolverReport", u: TrigPoly):
        super().__init__(message)
        self.report = report
        self.u = u


class DivergenceError(NonConvergenceError):
    """An iterate grew beyond the range where ``f_alpha`` can be evaluated."""


@dataclass
class SolverReport:
    iterations: int
    v_norms: list[float]
    increments: list[float]
    ratios: list[float]
    theoretical_K: float
    M0: float
    in_ball: list[bool]
    final_residuals: dict[str, float] | None
    converged: bool
    tol: float = 0.0
    admissible: bool | None = None
    log_Lambda: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["log_Lambda"] is not None and not math.isfinite(d["log_Lambda"]):
            d["log_Lambda"] = None
        return d

    def iteration_rows(self) -> list[tuple]:
        """``(k, ||u_k||_V, ||u_k - u_{k-1}||_V, ratio)``; ratio is blank for k = 1."""
        rows = []
        for i, (vn, inc) in enumerate(zip(self.v_norms, self.increments)):
            ratio = self.ratios[i - 1] if i >= 1 and i - 1 < len(self.ratios) else None
            rows.append((i + 1, vn, inc, ratio))
        return rows


def _ratios(increments: list[float]) -> list[float]:
    out = []
    for prev, cur in zip(increments, increments[1:]):
        if prev > 0:
            out.append(cur / prev)
        else:
            out.append(0.0 if cur == 0 else math.inf)
    return out


def run_picard(inst: ProblemInstance, tol: float = 1e-10, max_iter: int = 200,
               start: TrigPoly | None = None) -> tuple[TrigPoly, SolverReport]:
    """Iterate the linearized problems until the V-norm increment is ``<= tol``.

    Raises :class:`NonConvergenceError` (with the partial report attached)
    when ``max_iter`` is exhausted, and :class:`DivergenceError` when the
    Robin trace leaves the evaluable range of ``f_alpha``. In guarantee mode
    the coefficient is checked against ``xi * Lambda`` first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if inst.guarantee_mode:
        inst.require_admissible()
    u_prev = TrigPoly.zero(inst.N) if start is None else start.resized(inst.N)
    v_norms: list[float] = []
    increments: list[float] = []
    converged = False

    def report(u: TrigPoly | None) -> SolverReport:
        try:
            res = boundary_residuals(u, inst).as_dict() if u is not None else None
        except OverflowRangeError:
            res = None  # the trace itself is out of range
        return SolverReport(
            iterations=len(increments),
            v_norms=list(v_norms),
            increments=list(increments),
            ratios=_ratios(increments),
            theoretical_K=inst.xi,
            M0=inst.M0,
            in_ball=[v <= inst.M0 * (1 + BALL_RTOL) for v in v_norms],
            final_residuals=res,
            converged=converged,
            tol=tol,
            admissible=inst.admissibility.admissible,
            log_Lambda=inst.log_Lambda,
        )

    for _ in range(max_iter):
        try:
            weight = f_alpha(inst.alpha, inst.trace_at(ROBIN, u_prev))
        except OverflowRangeError as exc:
            raise DivergenceError(f"iterate diverged: {exc}", report(u_prev), u_prev) from exc
        u = solve_step(assemble(inst, weight))
        v_norms.append(v_norm(u))
        increments.append(v_norm(u - u_prev))
        if increments[-1] <= tol:
            converged = True
            return u, report(u)
        u_prev = u
    rep = report(u_prev)
    last = rep.ratios[-1] if rep.ratios else float("nan")
    raise NonConvergenceError(
        f"no convergence in {max_iter} iterations (last increment {increments[-1]:.3g}, last ratio {last:.3g})",
        rep, u_prev,
    )


def cauchy_tail_bound(increment: float, K: float) -> float:
    """Bound ``sum_{j>=k} ||w_j|| <= ||w_k|| / (1 - K)`` for a contraction with factor ``K``."""
    if not 0 <= K < 1:
        raise ValueError("K must lie in [0, 1)")
    return increment / (1.0 - K)


@dataclass(frozen=True)
class ContractionSummary:
    max_ratio: float
    fitted_rate: float
    theoretical_K: float
    certified: bool
    tail_bound: float
    verdict: str


def contraction_report(report: SolverReport) -> ContractionSummary:
    """Compare measured increment ratios with the theoretical factor.

    ``fitted_rate`` is ``exp`` of the least-squares slope of
    ``log ||w_k||`` against ``k`` over the positive increments.
    """
    if report.iterations < 3:
        raise ValueError("contraction_report needs at least 3 recorded iterations")
    K = report.theoretical_K
    max_ratio = max(report.ratios) if report.ratios else 0.0
    inc = np.asarray(report.increments, dtype=float)
    k = np.arange(len(inc))
    pos = inc > 0
    if pos.sum() >= 2:
        slope = np.polyfit(k[pos], np.log(inc[pos]), 1)[0]
        rate = float(math.exp(slope))
    else:
        rate = 0.0
    certified = max_ratio <= K
    return ContractionSummary(
        max_ratio=max_ratio,
        fitted_rate=rate,
        theoretical_K=K,
        certified=certified,
        tail_bound=cauchy_tail_bound(report.increments[-1], K),
        verdict="contraction certified" if certified else "contraction not certified",
    )


def ball_check(report: SolverReport) -> bool:
    """Every recorded ``||u_k||_V`` lies in the closed ball of radius ``M0`` (relative slack 1e-8)."""
    return all(v <= report.M0 * (1 + BALL_RTOL) for v in report.v_norms)
