"""Partitions of the unit circle into Dirichlet, Neumann and Robin arcs.

Arcs are stored as ``(start, end)`` radian pairs with ``0 <= start < 2*pi``
and ``start < end < start + 2*pi``; an ``end`` beyond ``2*pi`` wraps through
``theta = 0``. Membership is open: the endpoints of an arc belong to no
region, so adjacent arcs may share endpoints exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
COVER_TOL = 1e-12

DIRICHLET = "D"
NEUMANN = "N"
ROBIN = "R"
BOUNDARY_POINT = "boundary-point"

REGIONS = (DIRICHLET, NEUMANN, ROBIN)
_GROUP_NAMES = {DIRICHLET: "dirichlet", NEUMANN: "neumann", ROBIN: "robin"}


class PartitionError(ValueError):
    """Raised when a partition violates the covering hypotheses."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class AngularArc:
    start: float
    end: float

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise PartitionError("malformed", f"non-finite arc {self!r}")
        if not 0.0 <= self.start < TWO_PI:
            raise PartitionError("malformed", f"arc start {self.start} outside [0, 2pi)")
        length = self.end - self.start
        if not 0.0 < length < TWO_PI:
            raise PartitionError("malformed", f"arc length {length} outside (0, 2pi)")

    @classmethod
    def from_pair(cls, start: float, end: float) -> "AngularArc":
        """Normalize an arbitrary ``(start, end)`` pair so that ``start`` lies in ``[0, 2pi)``."""
        shift = math.floor(start / TWO_PI) * TWO_PI
        s, e = start - shift, end - shift
        # floor() can leave s == 2pi through roundoff
        if s >= TWO_PI:
            s, e = s - TWO_PI, e - TWO_PI
        return cls(s, e)

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains(self, theta) -> np.ndarray:
        """Open-interval membership of ``theta`` (any real, taken mod 2pi)."""
        t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        return ((t > self.start) & (t < self.end)) | ((t + TWO_PI > self.start) & (t + TWO_PI < self.end))

    def pieces(self) -> list[tuple[float, float]]:
        """Split into sub-intervals of ``[0, 2pi]`` (two pieces when wrapping)."""
        if self.end <= TWO_PI:
            return [(self.start, self.end)]
        return [(self.start, TWO_PI), (0.0, self.end - TWO_PI)]


def _as_arcs(arcs: Iterable) -> tuple[AngularArc, ...]:
    out = []
    for a in arcs:
        out.append(a if isinstance(a, AngularArc) else AngularArc.from_pair(*a))
    return tuple(out)


@dataclass(frozen=True)
class ArcPartition:
    dirichlet: tuple[AngularArc, ...] = field(default_factory=tuple)
    neumann: tuple[AngularArc, ...] = field(default_factory=tuple)
    robin: tuple[AngularArc, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("dirichlet", "neumann", "robin"):
            object.__setattr__(self, name, _as_arcs(getattr(self, name)))

    @classmethod
    def from_dict(cls, data: dict) -> "ArcPartition":
        return cls(**{k: [tuple(p) for p in data.get(k, [])] for k in ("dirichlet", "neumann", "robin")})

    def to_dict(self) -> dict:
        return {k: [[a.start, a.end] for a in getattr(self, k)] for k in ("dirichlet", "neumann", "robin")}

    def group(self, region: str) -> tuple[AngularArc, ...]:
        return getattr(self, _GROUP_NAMES[region])

    def measure(self, region: str) -> float:
        return math.fsum(a.length for a in self.group(region))


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    kind: str | None = None
    message: str = ""

    def raise_if_invalid(self) -> None:
        if not self.ok:
            raise PartitionError(self.kind, self.message)


def _overlap(a: AngularArc, b: AngularArc) -> float:
    total = 0.0
    for s1, e1 in a.pieces():
        for s2, e2 in b.pieces():
            total += max(0.0, min(e1, e2) - max(s1, s2))
    return total


def validate_partition(p: ArcPartition, require_all_groups: bool = True) -> ValidationResult:
    """Check disjointness, nonempty groups and full coverage, in that order.

    ``require_all_groups=False`` skips the nonempty-group clause; it exists
    only for verification problems without a Dirichlet part.
    """
    tagged = [(r, a) for r in REGIONS for a in p.group(r)]
    for i, (ri, ai) in enumerate(tagged):
        for rj, aj in tagged[i + 1:]:
            ov = _overlap(ai, aj)
            if ov > COVER_TOL:
                return ValidationResult(
                    False, "overlap",
                    f"arcs {ri}({ai.start:.6g}, {ai.end:.6g}) and {rj}({aj.start:.6g}, {aj.end:.6g}) "
                    f"overlap on a set of measure {ov:.3g}",
                )
    if require_all_groups:
        for r in REGIONS:
            if not p.measure(r) > 0.0:
                return ValidationResult(False, "empty-group", f"{_GROUP_NAMES[r]} group has zero measure")
    total = math.fsum(a.length for _, a in tagged)
    if abs(total - TWO_PI) > COVER_TOL:
        return ValidationResult(False, "coverage", f"arcs cover {total!r} instead of 2pi")
    return ValidationResult(True)


def locate(theta: float, p: ArcPartition) -> str:
    """Region tag of the angle ``theta``, or ``"boundary-point"`` on an arc endpoint."""
    for r in REGIONS:
        for a in p.group(r):
            if bool(a.contains(theta)):
                return r
    return BOUNDARY_POINT


@dataclass(frozen=True)
class ArcQuadrature:
    """Nodes (angles) and arc-length weights covering a union of arcs."""

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    @property
    def measure(self) -> float:
        return math.fsum(self.weights)

    def __len__(self) -> int:
        return len(self.nodes)


def default_panels(length: float, degree: int) -> int:
    """Panel count for an arc so that 8-point panels resolve frequency ``2*degree``."""
    return max(16, math.ceil(2.0 * degree * length / math.pi))


def build_quadrature(arcs: Sequence[AngularArc], panels_per_arc: int | None = 16,
                     points_per_panel: int = 8, degree: int | None = None) -> ArcQuadrature:
    """Composite Gauss-Legendre rule on each arc.

    With ``panels_per_arc=None`` the panel count is chosen per arc from
    ``degree`` (see :func:`default_panels`), which keeps mass-matrix entries
    at roundoff for trigonometric polynomials of that degree.
    """
    if panels_per_arc is not None and panels_per_arc < 1:
        raise ValueError("panels_per_arc must be >= 1")
    if points_per_panel < 2:
        raise ValueError("points_per_panel must be >= 2")
    if panels_per_arc is None and degree is None:
        raise ValueError("degree is required when panels_per_arc is None")
    x, w = np.polynomial.legendre.leggauss(points_per_panel)
    nodes, weights = [], []
    for arc in _as_arcs(arcs):
        panels = panels_per_arc if panels_per_arc is not None else default_panels(arc.length, degree)
        edges = np.linspace(arc.start, arc.end, panels + 1)
        h = np.diff(edges)
        nodes.append((edges[:-1, None] + 0.5 * h[:, None] * (x + 1.0)).ravel())
        weights.append((0.5 * h[:, None] * w).ravel())
    if not nodes:
        return ArcQuadrature(np.empty(0), np.empty(0))
    return ArcQuadrature(np.mod(np.concatenate(nodes), TWO_PI), np.concatenate(weights))
