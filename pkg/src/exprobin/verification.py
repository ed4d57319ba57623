"""Independent checks for the solver and the constants.

The oracles here deliberately avoid the code paths they validate: the disk
energy is integrated in physical space instead of read off the Fourier
symbol, and the linear reference solve uses a finer discretization.
Samplers are seeded through ``numpy.random.SeedSequence`` so every report
is reproducible.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .constants import harmonic_sum_bounds, lambda_p
from .geometry import ROBIN
from .linear_step import ProblemInstance, assemble, solve_step
from .nonlinearity import Alpha, f_alpha, p2_bound, p3_bound
from .spectral import TrigPoly, hs_norm, lp_norm_periodic, random_trigpoly, v_norm

TWO_PI = 2.0 * math.pi


def vnorm_2d_oracle(f: TrigPoly, radial_points: int | None = None, angular_points: int | None = None) -> float:
    """``int_D |grad u|^2 dx`` for the harmonic extension ``u`` of ``f``.

    Gauss-Legendre in ``t = r^2`` (so ``r dr = dt/2`` and every surviving
    term is a polynomial in ``t``) times the trapezoid rule in ``theta``.
    The gradient is formed pointwise from ``u_r`` and ``u_theta / r``.
    """
    N = f.degree
    if N == 0:
        return 0.0
    radial_points = 2 * N if radial_points is None else radial_points
    angular_points = 4 * N + 4 if angular_points is None else angular_points
    if radial_points < 2 * N or angular_points < 4 * N:
        raise ValueError("need radial_points >= 2N and angular_points >= 4N")
    x, w = np.polynomial.legendre.leggauss(radial_points)
    t = 0.5 * (x + 1.0)
    wt = 0.25 * w  # dt = dx/2, r dr = dt/2
    n = f.modes
    absn = np.abs(n)
    idx = np.mod(n, angular_points)
    total = 0.0
    for tj, wj in zip(t, wt):
        r = math.sqrt(tj)
        rp = np.where(absn > 0, r ** np.maximum(absn - 1, 0), 0.0)
        buf_r = np.zeros(angular_points, dtype=complex)
        buf_t = np.zeros(angular_points, dtype=complex)
        buf_r[idx] = absn * rp * f.coeffs
        buf_t[idx] = 1j * n * rp * f.coeffs
        ur = np.fft.ifft(buf_r) * angular_points
        ut = np.fft.ifft(buf_t) * angular_points
        integrand = np.abs(ur) ** 2 + np.abs(ut) ** 2
        total += wj * TWO_PI * float(np.mean(integrand))
    return total


@dataclass
class EmbeddingReport:
    count: int
    degree: int
    seed: int
    lambdas: dict[str, float]
    max_ratio: dict[str, float]
    violations: dict[str, int]
    worst_trial: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())


def embedding_ratio(f: TrigPoly, p: float) -> float:
    """``||f||_{L^p_{2pi}} / ||f||_{H^{1/2}_{2pi}}``."""
    h = hs_norm(f, 0.5)
    return lp_norm_periodic(f, p) / h if h > 0 else 0.0


def embedding_sampler(count: int, degree: int, p_list: Sequence[float], seed: int) -> EmbeddingReport:
    """Random polynomials of degree ``1..degree`` against ``lambda_p``.

    Trial ``i`` uses its own child stream of ``SeedSequence(seed)``, so the
    report does not depend on evaluation order.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    keys = [f"{float(p):g}" for p in p_list]
    lams = {k: lambda_p(p) for k, p in zip(keys, p_list)}
    best = {k: 0.0 for k in keys}
    worst = {k: -1 for k in keys}
    viol = {k: 0 for k in keys}
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        f = random_trigpoly(rng, int(rng.integers(1, degree + 1)))
        for k, p in zip(keys, p_list):
            ratio = embedding_ratio(f, p)
            if ratio > best[k]:
                best[k], worst[k] = ratio, i
            if ratio > lams[k]:
                viol[k] += 1
    return EmbeddingReport(count, degree, seed, lams, best, viol, worst)


@dataclass
class HarmonicSumReport:
    N_max: int
    thetas: list[float]
    lower_violations: dict[str, int]
    upper_violations: dict[str, int]
    min_slack: dict[str, float]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def ok(self) -> bool:
        return not any(self.lower_violations.values()) and not any(self.upper_violations.values())


def harmonic_sum_check(theta_grid: Sequence[float], N_max: int) -> HarmonicSumReport:
    """``sum_{k<=N} k^{-t} <= 1 + N^{1-t}/(1-t) <= 2 N^{1-t}/(1-t)`` for ``N = 1..N_max``."""
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    N = np.arange(1, N_max + 1, dtype=float)
    lower, upper, slack = {}, {}, {}
    for t in theta_grid:
        if not 0.0 < t < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {t}")
        partial = np.cumsum(N ** -t)
        a = N ** (1.0 - t) / (1.0 - t)
        mid, top = 1.0 + a, 2.0 * a
        key = f"{t:g}"
        lower[key] = int(np.sum(partial > mid))
        upper[key] = int(np.sum(mid > top))
        slack[key] = float(np.min(mid - partial))
    return HarmonicSumReport(N_max, [float(t) for t in theta_grid], lower, upper, slack)


def harmonic_sum_pair(theta: float, N: int) -> tuple[float, float, float]:
    """``(sum, middle, right)`` of the partial-sum inequality at a single ``N``."""
    s = math.fsum(k ** -theta for k in range(1, N + 1))
    mid, top = harmonic_sum_bounds(theta, N)
    return s, mid, top


Weight = Callable[[np.ndarray], np.ndarray] | TrigPoly | None


def _refined(inst: ProblemInstance) -> ProblemInstance:
    return dataclasses.replace(
        inst,
        N=2 * inst.N,
        panels_per_arc=None if inst.panels_per_arc is None else 2 * inst.panels_per_arc,
        points_per_panel=2 * inst.points_per_panel,
        penalty_eta=10.0 * inst.eta,
    )


def robin_weight(inst: ProblemInstance, weight: Weight) -> np.ndarray:
    """Weight values at the Robin nodes of ``inst``.

    ``None`` means the first step (``f_alpha(0) = 1``); a :class:`TrigPoly`
    is read as the previous iterate; a callable is sampled directly.
    """
    nodes = inst.quad[ROBIN].nodes
    if weight is None:
        return np.ones_like(nodes)
    if isinstance(weight, TrigPoly):
        return np.asarray(f_alpha(inst.alpha, inst.trace_at(ROBIN, weight)))
    return np.asarray(weight(nodes), dtype=float)


def linear_oracle(inst: ProblemInstance, weight: Weight = None) -> TrigPoly:
    """Reference solve of one linear step with degree ``2N``, twice the
    quadrature points and ten times the penalty."""
    ref = _refined(inst)
    return solve_step(assemble(ref, robin_weight(ref, weight)))


def oracle_discrepancy(inst: ProblemInstance, weight: Weight = None) -> float:
    """Relative V-norm gap between the main solve and :func:`linear_oracle`
    on the modes both resolve."""
    main = solve_step(assemble(inst, robin_weight(inst, weight)))
    ref = linear_oracle(inst, weight).resized(inst.N)
    scale = v_norm(ref)
    gap = v_norm(main - ref)
    return gap / scale if scale > 0 else gap


@dataclass
class NonlinearityReport:
    count: int
    seed: int
    p1_violations: int
    p2_violations: int
    p3_violations: int
    min_value: float
    max_p2_ratio: float
    max_p3_ratio: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def total_violations(self) -> int:
        return self.p1_violations + self.p2_violations + self.p3_violations


def nonlinearity_sampler(count: int, seed: int, r_max: float = 50.0, r_max_p2: float = 20.0,
                         per_alpha: int = 100) -> NonlinearityReport:
    """Sample ``(alpha, r)`` pairs and count violations of P1, P2 and P3.

    ``alpha`` is uniform on ``(0.01, 0.99)``; each drawn ``alpha`` is paired
    with ``per_alpha`` values of ``r`` so the scalar-``alpha`` kernels stay
    vectorized. P2 uses its own draw with ``|r| <= r_max_p2``.
    """
    rng = np.random.default_rng(seed)
    groups = -(-count // per_alpha)
    alphas = rng.uniform(0.01, 0.99, groups)
    p1 = p2 = p3 = 0
    min_val, worst2, worst3 = math.inf, 0.0, 0.0
    remaining = count
    for a_val in alphas:
        m = min(per_alpha, remaining)
        remaining -= m
        a = Alpha(float(a_val))
        r = rng.uniform(-r_max, r_max, m)
        f = f_alpha(a, r)
        p1 += int(np.sum(~(f > 0)))
        min_val = min(min_val, float(np.min(f)))
        b3 = p3_bound(a, r)
        p3 += int(np.sum(f > b3))
        worst3 = max(worst3, float(np.max(f / b3)))
        r2 = rng.uniform(-r_max_p2, r_max_p2, m)
        lhs = f_alpha(a, r2) * r2 * r2
        b2 = p2_bound(a, r2)
        p2 += int(np.sum(lhs > b2))
        nz = b2 > 0
        if np.any(nz):
            worst2 = max(worst2, float(np.max(lhs[nz] / b2[nz])))
    return NonlinearityReport(count, seed, p1, p2, p3, min_val, worst2, worst3)
