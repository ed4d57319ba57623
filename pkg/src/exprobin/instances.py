"""Ready-made problem instances used by the tests, the acceptance suite and
the CLI examples."""

from __future__ import annotations

import dataclasses
import math

from .boundary_data import Constant, Cosine
from .geometry import ArcPartition
from .linear_step import ProblemInstance
from .nonlinearity import Alpha

PI = math.pi

QUARTER_SPLIT = ArcPartition(
    dirichlet=[(0.0, PI / 2)],
    neumann=[(PI / 2, PI)],
    robin=[(PI, 2 * PI)],
)


def with_admissible_varphi(inst: ProblemInstance, fraction: float) -> ProblemInstance:
    """Replace the Robin coefficient by the constant ``fraction * xi * Lambda(M0)``."""
    return dataclasses.replace(inst, varphi=Constant(fraction * inst.xi * inst.Lambda))


def canonical_instance(N: int = 128, **overrides) -> ProblemInstance:
    """alpha = 0.3, quarter/quarter/half split, phi = 1, g = 0.5, xi = 0.5,
    varphi = 0.9 xi Lambda(M0)."""
    base = ProblemInstance(
        alpha=Alpha(0.3),
        partition=QUARTER_SPLIT,
        phi=Constant(1.0),
        g=Constant(0.5),
        varphi=Constant(0.0),
        xi=0.5,
        N=N,
        **overrides,
    )
    return with_admissible_varphi(base, 0.9)


def zero_data_instance(N: int = 16, **overrides) -> ProblemInstance:
    return ProblemInstance(
        alpha=Alpha(0.3),
        partition=QUARTER_SPLIT,
        phi=Constant(0.0),
        g=Constant(0.0),
        varphi=Constant(0.0),
        N=N,
        allow_zero_phi=True,
        **overrides,
    )


def constant_solution_instance(c: float = 2.0, N: int = 16, **overrides) -> ProblemInstance:
    """Robin data on the whole circle with ``varphi = c``, ``g = c``: for the
    frozen weight 1 the linear solution is the constant trace 1."""
    return ProblemInstance(
        alpha=Alpha(0.3),
        partition=ArcPartition(robin=[(0.0, PI), (PI, 2 * PI)]),
        phi=Constant(0.0),
        g=Constant(c),
        varphi=Constant(c),
        N=N,
        penalty_eta=0.0,
        allow_zero_phi=True,
        verification_mode=True,
        **overrides,
    )


def small_data_instance(scale: float = 0.004, N: int = 64, **overrides) -> ProblemInstance:
    """Canonical geometry with ``phi = scale``, ``g = scale/2``: small enough
    that ``Lambda`` is of order one and the admissible coefficient is not tiny."""
    base = ProblemInstance(
        alpha=Alpha(0.3),
        partition=QUARTER_SPLIT,
        phi=Constant(scale),
        g=Constant(scale / 2),
        varphi=Constant(0.0),
        N=N,
        **overrides,
    )
    return with_admissible_varphi(base, 0.9)


def smooth_robin_instance(N: int = 32, **overrides) -> ProblemInstance:
    """Robin condition on the whole circle with smooth data; the solution is
    analytic, so the discretization converges spectrally."""
    return ProblemInstance(
        alpha=Alpha(0.3),
        partition=ArcPartition(robin=[(0.0, PI), (PI, 2 * PI)]),
        phi=Constant(0.0),
        g=Cosine(1.0, 3, 0.2, 0.5),
        varphi=Cosine(0.5, 2, 0.0, 1.5),
        N=N,
        penalty_eta=0.0,
        allow_zero_phi=True,
        verification_mode=True,
        **overrides,
    )
