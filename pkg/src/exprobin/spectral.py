"""Trigonometric polynomials on the unit circle and their norms.

A trace is stored by its complex Fourier coefficients ``c_n``, ``n = -N..N``,
so that ``f(theta) = sum c_n e^{i n theta}``. Its harmonic extension into
the disk is ``sum c_n r^{|n|} e^{i n theta}``.

Two normalizations coexist and are never mixed:

* ``lp_norm_periodic`` / ``hs_norm`` use the normalized measure
  ``dt / 2pi`` of the periodic spaces ``L^p_{2pi}``, ``H^s_{2pi}``;
* ``surface_l2_on_arcs`` and ``v_norm`` use arc length ``d sigma`` and
  area ``dx`` (the solver side).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import AngularArc, ArcQuadrature, build_quadrature

TWO_PI = 2.0 * math.pi
IMAG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TrigPoly:
    coeffs: np.ndarray  # complex, length 2N+1, index j <-> n = j - N

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValueError("coefficient array must have odd length 2N+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, N: int) -> "TrigPoly":
        return cls(np.zeros(2 * N + 1, dtype=complex))

    @classmethod
    def from_dict(cls, N: int, modes: dict[int, complex]) -> "TrigPoly":
        c = np.zeros(2 * N + 1, dtype=complex)
        for n, v in modes.items():
            c[n + N] += v
        return cls(c)

    @classmethod
    def from_real(cls, x: np.ndarray) -> "TrigPoly":
        """From real cos/sin coordinates ``[a_0, a_1..a_N, b_1..b_N]``."""
        x = np.asarray(x, dtype=float)
        N = (len(x) - 1) // 2
        a, b = x[1:N + 1], x[N + 1:]
        c = np.empty(2 * N + 1, dtype=complex)
        c[N] = x[0]
        c[N + 1:] = 0.5 * (a - 1j * b)
        c[:N] = np.conj(c[N + 1:])[::-1]
        return cls(c)

    @classmethod
    def cosine(cls, N: int, n: int, amplitude: float = 1.0) -> "TrigPoly":
        if n == 0:
            return cls.from_dict(N, {0: amplitude})
        return cls.from_dict(N, {n: amplitude / 2, -n: amplitude / 2})

    # views ---------------------------------------------------------------
    @property
    def degree(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        N = self.degree
        return np.arange(-N, N + 1)

    def coeff(self, n: int) -> complex:
        N = self.degree
        return complex(self.coeffs[n + N]) if abs(n) <= N else 0j

    def is_real(self, tol: float = 1e-12) -> bool:
        c = self.coeffs
        return bool(np.max(np.abs(c - np.conj(c[::-1])), initial=0.0) <= tol * max(1.0, np.max(np.abs(c))))

    def to_real(self) -> np.ndarray:
        """Real cos/sin coordinates ``[a_0, a_1..a_N, b_1..b_N]`` of a real-valued polynomial."""
        N = self.degree
        c = self.coeffs
        cp, cm = c[N + 1:], c[:N][::-1]
        a = (cp + cm).real
        b = (1j * (cp - cm)).real
        return np.concatenate([[c[N].real], a, b])

    def resized(self, N: int) -> "TrigPoly":
        """Truncate or zero-pad to degree ``N``."""
        M = self.degree
        out = np.zeros(2 * N + 1, dtype=complex)
        k = min(M, N)
        out[N - k:N + k + 1] = self.coeffs[M - k:M + k + 1]
        return TrigPoly(out)

    # arithmetic ----------------------------------------------------------
    def _aligned(self, other: "TrigPoly"):
        N = max(self.degree, other.degree)
        return self.resized(N).coeffs, other.resized(N).coeffs

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        a, b = self._aligned(other)
        return TrigPoly(a + b)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        a, b = self._aligned(other)
        return TrigPoly(a - b)

    def __mul__(self, s: float) -> "TrigPoly":
        return TrigPoly(self.coeffs * s)

    __rmul__ = __mul__

    # evaluation ----------------------------------------------------------
    def __call__(self, theta) -> np.ndarray:
        return eval_trace(self, theta)

    def evaluate_complex(self, theta) -> np.ndarray:
        t = np.asarray(theta, dtype=float)
        E = np.exp(1j * np.multiply.outer(t, self.modes))
        return E @ self.coeffs

    def uniform_values(self, M: int) -> np.ndarray:
        """Complex values at ``theta_j = 2 pi j / M`` via FFT (``M >= 2N+1``)."""
        N = self.degree
        if M < 2 * N + 1:
            raise ValueError("grid too coarse for the degree")
        buf = np.zeros(M, dtype=complex)
        buf[np.mod(self.modes, M)] = self.coeffs
        return np.fft.ifft(buf) * M


def real_basis(N: int, theta) -> np.ndarray:
    """Rows ``[1, cos theta .. cos N theta, sin theta .. sin N theta]``."""
    t = np.asarray(theta, dtype=float)
    n = np.arange(1, N + 1)
    nt = np.multiply.outer(t, n)
    return np.hstack([np.ones((len(t), 1)), np.cos(nt), np.sin(nt)])


def fourier_from_samples(samples, N: int) -> TrigPoly:
    """Degree-``N`` coefficients from values on the uniform grid ``2 pi j / M``.

    Trapezoid rule, i.e. the DFT divided by ``M``; exact for trigonometric
    polynomials of degree ``<= N`` when ``M >= 2N + 1``.
    """
    f = np.asarray(samples)
    M = len(f)
    if M < 2 * N + 1:
        raise ValueError(f"{M} samples alias degree {N}; need at least {2 * N + 1}")
    F = np.fft.fft(f) / M
    return TrigPoly(F[np.mod(np.arange(-N, N + 1), M)])


def eval_trace(f: TrigPoly, theta):
    """Real value of the trace; raises if the imaginary part is not roundoff."""
    z = f.evaluate_complex(theta)
    scale = max(1.0, float(np.sum(np.abs(f.coeffs))))
    if z.size and np.max(np.abs(z.imag)) > IMAG_TOL * scale:
        raise ValueError("polynomial is not real-valued; use evaluate_complex")
    out = z.real
    return float(out) if out.ndim == 0 else out


def _grid_size(N: int, p: float, quad_points: int | None) -> int:
    need = max(4 * N + 4, int(math.ceil(p)) * N + 1)
    M = need if quad_points is None else quad_points
    if M < 4 * N + 4:
        raise ValueError(f"quad_points must be >= 4N+4 = {4 * N + 4}")
    return M


def lp_norm_periodic(f: TrigPoly, p: float, quad_points: int | None = None) -> float:
    """``((1/2pi) int_0^{2pi} |f|^p dt)^{1/p}`` by the uniform trapezoid rule.

    The default grid has ``max(4N+4, ceil(p) N + 1)`` points, which
    integrates ``|f|^p`` exactly for even integer ``p``.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    M = _grid_size(f.degree, p, quad_points)
    v = np.abs(f.uniform_values(M))
    vmax = float(np.max(v))
    if vmax == 0.0:
        return 0.0
    # scale out the max so |f|^p cannot overflow for large p
    return vmax * float(np.mean((v / vmax) ** p)) ** (1.0 / p)


def hs_norm(f: TrigPoly, s: float) -> float:
    """``(sum (1+k^2)^s |c_k|^2)^{1/2}``."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("Sobolev index must lie in [0, 1]")
    k = f.modes.astype(float)
    return float(math.sqrt(np.sum((1.0 + k * k) ** s * np.abs(f.coeffs) ** 2)))


def dtn_apply(f: TrigPoly) -> TrigPoly:
    """Normal derivative of the harmonic extension: ``c_n -> |n| c_n``."""
    return TrigPoly(np.abs(f.modes) * f.coeffs)


def v_norm(f: TrigPoly) -> float:
    """Dirichlet energy of the harmonic extension, ``(2 pi sum |n| |c_n|^2)^{1/2}``."""
    return float(math.sqrt(TWO_PI * np.sum(np.abs(f.modes) * np.abs(f.coeffs) ** 2)))


def split_low_high(f: TrigPoly, N: int) -> tuple[TrigPoly, TrigPoly]:
    """Frequencies ``|k| < N`` and ``|k| >= N``; both keep the degree of ``f``."""
    if N < 0:
        raise ValueError("cutoff must be >= 0")
    low = np.abs(f.modes) < N
    return TrigPoly(np.where(low, f.coeffs, 0)), TrigPoly(np.where(low, 0, f.coeffs))


def surface_l2_on_arcs(f: TrigPoly, arcs: Sequence[AngularArc], quad: ArcQuadrature | None = None) -> float:
    """``(int_arcs |f|^2 d sigma)^{1/2}``, arc-length measure, no normalization."""
    if quad is None:
        quad = build_quadrature(arcs, None, 8, degree=max(f.degree, 4))
    total = math.fsum(a.length for a in arcs)
    if abs(quad.measure - total) > 1e-12 * max(1.0, total):
        raise ValueError("quadrature does not match the arcs")
    if len(quad) == 0:
        return 0.0
    v = np.abs(f.evaluate_complex(quad.nodes))
    return float(math.sqrt(np.dot(quad.weights, v * v)))


def random_trigpoly(rng: np.random.Generator, degree: int) -> TrigPoly:
    """Real trigonometric polynomial with ``c_n ~ (N(0,1) + i N(0,1)) (1+n^2)^{-1/2}``.

    The decay keeps ``H^{1/2}`` norms of order one across degrees.
    """
    n = np.arange(1, degree + 1)
    scale = (1.0 + n * n) ** -0.5
    pos = (rng.standard_normal(degree) + 1j * rng.standard_normal(degree)) * scale
    c = np.empty(2 * degree + 1, dtype=complex)
    c[degree] = rng.standard_normal()
    c[degree + 1:] = pos
    c[:degree] = np.conj(pos)[::-1]
    return TrigPoly(c)
