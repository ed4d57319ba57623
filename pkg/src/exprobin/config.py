"""Run configuration: a versioned JSON document validated with pydantic.

Schema errors surface as :class:`pydantic.ValidationError`; partition
problems are left to :func:`exprobin.geometry.validate_partition` so the
CLI can report them with their own exit code.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .boundary_data import Constant, Cosine, GaussianBump, SampleTable
from .geometry import ArcPartition
from .instances import with_admissible_varphi
from .linear_step import ProblemInstance

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ConstantFn(_Strict):
    kind: Literal["constant"]
    value: float

    def build(self):
        return Constant(self.value)


class CosineFn(_Strict):
    kind: Literal["cosine"]
    amplitude: float = 1.0
    frequency: int = 1
    phase: float = 0.0
    offset: float = 0.0

    def build(self):
        return Cosine(self.amplitude, self.frequency, self.phase, self.offset)


class GaussianBumpFn(_Strict):
    kind: Literal["gaussian-bump"]
    amplitude: float = 1.0
    center: float = 0.0
    width: float = Field(0.25, gt=0)
    offset: float = 0.0

    def build(self):
        return GaussianBump(self.amplitude, self.center, self.width, self.offset)


class SamplesFn(_Strict):
    """Values on the uniform grid ``2 pi j / M``, linearly interpolated."""

    kind: Literal["samples"]
    values: list[float] = Field(min_length=2)

    def build(self):
        return SampleTable(tuple(self.values))


class AdmissibleFractionFn(_Strict):
    """Constant ``fraction * xi * Lambda(M0)``; only meaningful for ``varphi``."""

    kind: Literal["admissible-fraction"]
    fraction: float = Field(ge=0)


DataFn = Annotated[Union[ConstantFn, CosineFn, GaussianBumpFn, SamplesFn], Field(discriminator="kind")]
CoefficientFn = Annotated[
    Union[ConstantFn, CosineFn, GaussianBumpFn, SamplesFn, AdmissibleFractionFn], Field(discriminator="kind")
]

ArcPair = tuple[float, float]


class PartitionSpec(_Strict):
    units: Literal["radians", "pi"] = "radians"
    dirichlet: list[ArcPair] = Field(default_factory=list)
    neumann: list[ArcPair] = Field(default_factory=list)
    robin: list[ArcPair] = Field(default_factory=list)

    def build(self) -> ArcPartition:
        """Raises :class:`exprobin.geometry.PartitionError` for malformed arcs."""
        s = math.pi if self.units == "pi" else 1.0
        scale = lambda pairs: [(a * s, b * s) for a, b in pairs]  # noqa: E731
        return ArcPartition(scale(self.dirichlet), scale(self.neumann), scale(self.robin))


class ProblemSpec(_Strict):
    alpha: float = Field(gt=0, lt=1)
    partition: PartitionSpec
    phi: DataFn
    g: DataFn
    varphi: CoefficientFn
    xi: float = Field(0.5, gt=0, lt=1)
    allow_zero_phi: bool = False


class QuadratureSpec(_Strict):
    panels_per_arc: int | None = Field(None, ge=1)
    points_per_panel: int = Field(8, ge=2)


class SolverSpec(_Strict):
    tol: float = Field(1e-10, gt=0)
    max_iter: int = Field(200, ge=1)
    N: int = Field(128, ge=4)
    quadrature: QuadratureSpec = QuadratureSpec()
    penalty: float | None = Field(None, gt=0)
    dirichlet_tol: float | None = Field(None, gt=0)
    start: Literal["zero", "first-step"] = "zero"


class OutputSpec(_Strict):
    directory: str = "out"
    formats: list[Literal["json", "csv"]] = Field(default_factory=lambda: ["json", "csv"])


class VerifySpec(_Strict):
    seed: int = 0
    embedding_trials: int = Field(10_000, ge=1)
    embedding_degree: int = Field(64, ge=1)
    p_values: list[float] = Field(default_factory=lambda: [3.0, 4.0, 6.0, 8.0, 12.0])
    nonlinearity_samples: int = Field(100_000, ge=1)
    harmonic_N_max: int = Field(10_000, ge=1)
    vnorm_trials: int = Field(100, ge=1)
    vnorm_degree: int = Field(16, ge=1)

    @field_validator("p_values")
    @classmethod
    def _p_range(cls, v: list[float]) -> list[float]:
        if any(p < 2 for p in v):
            raise ValueError("embedding exponents must be >= 2")
        return v


class SweepSpec(_Strict):
    """Cartesian grid over dotted config paths, e.g. ``{"solver.N": [32, 64]}``."""

    grid: dict[str, list] = Field(min_length=1)
    workers: int = Field(1, ge=1)

    @field_validator("grid")
    @classmethod
    def _paths(cls, v: dict[str, list]) -> dict[str, list]:
        for key, values in v.items():
            head = key.split(".", 1)[0]
            if head not in ("problem", "solver") or "." not in key:
                raise ValueError(f"sweep key {key!r} must start with 'problem.' or 'solver.'")
            if not values:
                raise ValueError(f"sweep key {key!r} has no values")
        return v


class RunConfig(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    problem: ProblemSpec
    solver: SolverSpec = SolverSpec()
    output: OutputSpec = OutputSpec()
    verify: VerifySpec = VerifySpec()
    sweep: SweepSpec | None = None

    @model_validator(mode="after")
    def _nonzero_phi(self) -> "RunConfig":
        if self.problem.allow_zero_phi is False and isinstance(self.problem.phi, ConstantFn) \
                and self.problem.phi.value == 0.0:
            raise ValueError("phi must not vanish identically unless allow_zero_phi is set")
        return self

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2)


def load_config_text(text: str) -> RunConfig:
    """Parse JSON text; raises ``json.JSONDecodeError`` or ``pydantic.ValidationError``."""
    return RunConfig.model_validate(json.loads(text))


def parse_config(path: str | Path) -> RunConfig:
    return load_config_text(Path(path).read_text(encoding="utf-8"))


def build_instance(cfg: RunConfig, guarantee_mode: bool = False) -> ProblemInstance:
    """Materialize the problem. Partition errors propagate as ``PartitionError``."""
    pr, so = cfg.problem, cfg.solver
    fraction = pr.varphi.fraction if isinstance(pr.varphi, AdmissibleFractionFn) else None
    inst = ProblemInstance(
        alpha=pr.alpha,
        partition=pr.partition.build(),
        phi=pr.phi.build(),
        g=pr.g.build(),
        varphi=Constant(0.0) if fraction is not None else pr.varphi.build(),
        xi=pr.xi,
        N=so.N,
        panels_per_arc=so.quadrature.panels_per_arc,
        points_per_panel=so.quadrature.points_per_panel,
        penalty_eta=so.penalty,
        dirichlet_tol=so.dirichlet_tol,
        guarantee_mode=guarantee_mode,
        allow_zero_phi=pr.allow_zero_phi,
    )
    if fraction is None:
        return inst
    if not math.isfinite(inst.Lambda):
        if fraction == 0.0:
            return inst
        raise ValueError("admissible-fraction needs M0 > 0 (Lambda is unbounded for zero data)")
    return with_admissible_varphi(inst, fraction)


def with_override(cfg: RunConfig, dotted: str, value) -> RunConfig:
    """Copy of ``cfg`` with one dotted path replaced, re-validated."""
    data = cfg.model_dump(mode="json")
    node = data
    parts = dotted.split(".")
    for p in parts[:-1]:
        if not isinstance(node, dict) or p not in node:
            raise KeyError(dotted)
        node = node[p]
    if not isinstance(node, dict):
        raise KeyError(dotted)
    node[parts[-1]] = value
    data["sweep"] = None
    return RunConfig.model_validate(data)
