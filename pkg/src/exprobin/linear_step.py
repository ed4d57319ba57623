"""One linearized problem: harmonic ``u`` with ``u = 0`` on the Dirichlet arcs,
prescribed flux on the Neumann arcs and the frozen Robin law

    du/dn + varphi * w * u = g   on the Robin arcs,

where ``w = f_alpha(u_prev)`` is given at the Robin quadrature nodes.

The unknown is the trace in the real basis ``1, cos n theta, sin n theta``
(``n <= N``). The Dirichlet energy is diagonal there (``pi n`` per cos/sin
pair), the Robin term is an arc mass matrix, and the Dirichlet condition is
imposed by an ``L2(Gamma_D)`` penalty so the system stays SPD.

Adding ``eta * M_D`` (entries near ``1e8``) to the Robin mass would round
the latter at the ``1e-8`` level and put a noise floor under the Picard
increments. The solve therefore works in the eigenbasis of ``M_D``, where
the penalty only touches the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .constants import AdmissibilityVerdict, check_admissible, compute_Lambda, compute_M0, log_Lambda
from .geometry import (
    DIRICHLET,
    NEUMANN,
    REGIONS,
    ROBIN,
    ArcPartition,
    ArcQuadrature,
    build_quadrature,
    default_panels,
    validate_partition,
)
from .nonlinearity import Alpha, f_alpha
from .spectral import TrigPoly, dtn_apply, real_basis

PENALTY_SCALE = 1e6
SOLVE_RTOL = 1e-10

BoundaryFunction = Callable[[np.ndarray], np.ndarray]


class IndefiniteSystemError(RuntimeError):
    """The Galerkin matrix failed the Cholesky factorization."""


class InadmissibleCoefficientError(ValueError):
    """Guarantee mode is on and the Robin coefficient exceeds ``xi * Lambda``."""


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    alpha: Alpha
    partition: ArcPartition
    phi: BoundaryFunction
    g: BoundaryFunction
    varphi: BoundaryFunction
    xi: float = 0.5
    N: int = 128
    panels_per_arc: int | None = None
    points_per_panel: int = 8
    penalty_eta: float | None = None
    dirichlet_tol: float | None = None
    guarantee_mode: bool = False
    allow_zero_phi: bool = False
    # admits an empty Dirichlet part and eta = 0; analytic test problems only
    verification_mode: bool = False

    def __post_init__(self):
        if not isinstance(self.alpha, Alpha):
            object.__setattr__(self, "alpha", Alpha(float(self.alpha)))
        validate_partition(self.partition, require_all_groups=not self.verification_mode).raise_if_invalid()
        if not 0.0 < self.xi < 1.0:
            raise ValueError(f"xi must lie in (0, 1), got {self.xi}")
        if self.N < 4:
            raise ValueError("spectral degree N must be >= 4")
        if self.penalty_eta is not None:
            if self.penalty_eta < 0 or (self.penalty_eta == 0 and not self.verification_mode):
                raise ValueError("penalty_eta must be > 0")

    # discretization ------------------------------------------------------
    @cached_property
    def quad(self) -> dict[str, ArcQuadrature]:
        out = {}
        for r in REGIONS:
            arcs = self.partition.group(r)
            if self.panels_per_arc is None:
                parts = [build_quadrature([a], default_panels(a.length, self.N), self.points_per_panel) for a in arcs]
                nodes = np.concatenate([q.nodes for q in parts]) if parts else np.empty(0)
                weights = np.concatenate([q.weights for q in parts]) if parts else np.empty(0)
                out[r] = ArcQuadrature(nodes, weights)
            else:
                out[r] = build_quadrature(arcs, self.panels_per_arc, self.points_per_panel)
        return out

    @cached_property
    def basis(self) -> dict[str, np.ndarray]:
        return {r: real_basis(self.N, q.nodes) for r, q in self.quad.items()}

    @cached_property
    def eta(self) -> float:
        if self.penalty_eta is not None:
            return float(self.penalty_eta)
        return PENALTY_SCALE * math.pi * self.N

    @cached_property
    def dtn_diag(self) -> np.ndarray:
        n = np.arange(1, self.N + 1, dtype=float)
        return np.concatenate([[0.0], math.pi * n, math.pi * n])

    @cached_property
    def dirichlet_mass(self) -> np.ndarray:
        B, w = self.basis[DIRICHLET], self.quad[DIRICHLET].weights
        return (B.T * w) @ B

    @cached_property
    def dirichlet_eigen(self) -> tuple[np.ndarray, np.ndarray]:
        """``(mu, Q)`` with ``M_D = Q diag(mu) Q^T``.

        Taken from the SVD of ``sqrt(w) B`` rather than an eigensolve of
        ``M_D``, so eigenvalues of near-null modes carry ``eps^2`` rather
        than ``eps`` absolute error before being multiplied by ``eta``.
        """
        B, w = self.basis[DIRICHLET], self.quad[DIRICHLET].weights
        _, sv, vt = sla.svd(np.sqrt(w)[:, None] * B, full_matrices=True)
        mu = np.zeros(B.shape[1])
        mu[: len(sv)] = sv * sv
        return mu, vt.T

    @cached_property
    def rhs(self) -> np.ndarray:
        BN, qN = self.basis[NEUMANN], self.quad[NEUMANN]
        BR, qR = self.basis[ROBIN], self.quad[ROBIN]
        return BN.T @ (qN.weights * self.phi(qN.nodes)) + BR.T @ (qR.weights * self.g(qR.nodes))

    @cached_property
    def varphi_nodes(self) -> np.ndarray:
        return np.asarray(self.varphi(self.quad[ROBIN].nodes), dtype=float)

    # data norms and constants ---------------------------------------------
    def _l2(self, fn: BoundaryFunction, region: str) -> float:
        q = self.quad[region]
        if len(q) == 0:
            return 0.0
        v = fn(q.nodes)
        return math.sqrt(float(np.dot(q.weights, v * v)))

    @cached_property
    def phi_l2(self) -> float:
        return self._l2(self.phi, NEUMANN)

    @cached_property
    def g_l2(self) -> float:
        return self._l2(self.g, ROBIN)

    @cached_property
    def M0(self) -> float:
        return compute_M0(self.phi_l2, self.g_l2, allow_zero_phi=self.allow_zero_phi)

    @cached_property
    def Lambda(self) -> float:
        return compute_Lambda(self.M0) if self.M0 > 0 else math.inf

    @cached_property
    def log_Lambda(self) -> float:
        return log_Lambda(self.M0) if self.M0 > 0 else math.inf

    @cached_property
    def admissibility(self) -> AdmissibilityVerdict:
        return check_admissible(self.varphi_nodes, self.xi, self.Lambda)

    @cached_property
    def effective_dirichlet_tol(self) -> float:
        return self.dirichlet_tol if self.dirichlet_tol is not None else 1e-5 * self.M0

    def require_admissible(self) -> None:
        v = self.admissibility
        if not v.admissible:
            raise InadmissibleCoefficientError(
                f"varphi in [{v.min_value:.6g}, {v.max_value:.6g}] is outside [0, xi*Lambda = {v.bound:.6g}]"
            )

    def trace_at(self, region: str, u: TrigPoly) -> np.ndarray:
        """Trace values at the quadrature nodes of ``region``."""
        if u.degree == self.N:
            return self.basis[region] @ u.to_real()
        return real_basis(u.degree, self.quad[region].nodes) @ u.to_real()


@dataclass
class GalerkinSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    dtn_diag: np.ndarray = field(repr=False)
    robin_mass: np.ndarray = field(repr=False)
    dirichlet_mass: np.ndarray = field(repr=False)
    eta: float = 0.0
    dirichlet_eigen: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def bilinear(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(x @ self.matrix @ y)

    def continuity_constant(self) -> float:
        """Largest generalized eigenvalue of the matrix against the
        ``H^{1/2}``-type weight ``diag(2 pi, pi (n+1), pi (n+1))``.

        An empirical stand-in for the continuity bound of the bilinear form;
        it grows with the penalty.
        """
        w = self.dtn_diag.copy()
        w[0] = 2.0 * math.pi
        w[1:] += math.pi
        s = 1.0 / np.sqrt(w)
        return float(np.linalg.eigvalsh(self.matrix * np.outer(s, s))[-1])


def assemble(inst: ProblemInstance, weight) -> GalerkinSystem:
    """Galerkin matrix ``A_DtN + M_R[varphi * weight] + eta M_D`` and load vector."""
    w = np.asarray(weight, dtype=float)
    qR = inst.quad[ROBIN]
    if w.shape != qR.nodes.shape:
        raise ValueError(f"weight has shape {w.shape}, Robin quadrature has {qR.nodes.shape}")
    if w.size and not (np.all(np.isfinite(w)) and np.min(w) > 0.0):
        raise ValueError("Robin weight must be finite and strictly positive")
    BR = inst.basis[ROBIN]
    robin = (BR.T * (qR.weights * inst.varphi_nodes * w)) @ BR
    matrix = np.diag(inst.dtn_diag) + robin + inst.eta * inst.dirichlet_mass
    matrix = 0.5 * (matrix + matrix.T)
    eig = inst.dirichlet_eigen if inst.eta > 0 else None
    return GalerkinSystem(matrix, inst.rhs.copy(), inst.dtn_diag, robin, inst.dirichlet_mass, inst.eta, eig)


def _scaled_cholesky_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = 1.0 / np.sqrt(np.diag(A))
    As = A * np.outer(d, d)
    try:
        factor = sla.cho_factor(As, lower=True)
    except sla.LinAlgError as exc:
        raise IndefiniteSystemError("Galerkin matrix is not positive definite; check penalty and quadrature") from exc
    bs = b * d
    y = sla.cho_solve(factor, bs)
    y = y + sla.cho_solve(factor, bs - As @ y)
    return y * d


def solve_step(sys: GalerkinSystem) -> TrigPoly:
    """SPD solve with diagonal scaling and one refinement step.

    With a penalty the system is rotated into the eigenbasis of ``M_D``
    first, so ``eta`` enters only on the diagonal.
    """
    A, b = sys.matrix, sys.rhs
    if np.any(np.diag(A) <= 0):
        raise IndefiniteSystemError("Galerkin matrix has a non-positive diagonal entry; check penalty and quadrature")
    if sys.dirichlet_eigen is not None and sys.eta > 0:
        mu, Q = sys.dirichlet_eigen
        K = Q.T @ (sys.robin_mass @ Q) + (Q.T * sys.dtn_diag) @ Q
        K = 0.5 * (K + K.T)
        K[np.diag_indices_from(K)] += sys.eta * mu
        x = Q @ _scaled_cholesky_solve(K, Q.T @ b)
    else:
        x = _scaled_cholesky_solve(A, b)
    rel = backward_error(A, x, b)
    if rel > SOLVE_RTOL:
        raise IndefiniteSystemError(f"backward error {rel:.3g} above {SOLVE_RTOL}")
    return TrigPoly.from_real(x)


def backward_error(A: np.ndarray, x: np.ndarray, b: np.ndarray) -> float:
    """Normwise backward error ``||Ax - b|| / (||A|| ||x|| + ||b||)``.

    The penalty makes ``||A||`` of order ``1e9``, so the plain relative
    residual cannot fall below about ``1e-7`` in double precision.
    """
    denom = np.linalg.norm(A, 2) * np.linalg.norm(x) + np.linalg.norm(b)
    return float(np.linalg.norm(A @ x - b) / denom) if denom > 0 else 0.0


@dataclass(frozen=True)
class ResidualRecord:
    dirichlet: float
    neumann: float
    robin: float

    def as_dict(self) -> dict:
        return {"dirichlet": self.dirichlet, "neumann": self.neumann, "robin": self.robin}

    def max(self) -> float:
        return max(self.dirichlet, self.neumann, self.robin)


def boundary_residuals(u: TrigPoly, inst: ProblemInstance) -> ResidualRecord:
    """Surface-L2 residuals of the nonlinear problem at ``u``.

    Dirichlet: ``||u||``; Neumann: ``||du/dn - phi||``; Robin:
    ``||du/dn + varphi f_alpha(u) u - g||``, each on its own arcs.
    """
    du = dtn_apply(u)

    def l2(region, values):
        q = inst.quad[region]
        return math.sqrt(float(np.dot(q.weights, values * values))) if len(q) else 0.0

    qN, qR = inst.quad[NEUMANN], inst.quad[ROBIN]
    uR = inst.trace_at(ROBIN, u)
    dirichlet = l2(DIRICHLET, inst.trace_at(DIRICHLET, u))
    neumann = l2(NEUMANN, inst.trace_at(NEUMANN, du) - inst.phi(qN.nodes))
    robin_res = inst.trace_at(ROBIN, du) + inst.varphi_nodes * f_alpha(inst.alpha, uR) * uR - inst.g(qR.nodes)
    return ResidualRecord(dirichlet, neumann, l2(ROBIN, robin_res))
