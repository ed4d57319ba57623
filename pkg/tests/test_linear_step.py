import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exprobin.boundary_data import Constant, Cosine
from exprobin.geometry import ROBIN, PartitionError
from exprobin.instances import (
    canonical_instance,
    constant_solution_instance,
    small_data_instance,
    smooth_robin_instance,
    zero_data_instance,
)
from exprobin.nonlinearity import f_alpha
from exprobin.linear_step import (
    GalerkinSystem,
    IndefiniteSystemError,
    ProblemInstance,
    assemble,
    backward_error,
    boundary_residuals,
    solve_step,
)
from exprobin.spectral import TrigPoly, v_norm


def ones(inst):
    return np.ones(len(inst.quad[ROBIN]))


def with_rhs(sys, b):
    return dataclasses.replace(sys, rhs=b)


def test_pure_dtn_matrix_is_diagonal():
    inst = canonical_instance(8, penalty_eta=0.0, verification_mode=True)
    sys = assemble(inst, ones(inst))
    n = np.arange(1, 9) * math.pi
    assert np.array_equal(np.diag(sys.matrix), np.concatenate([[0.0], n, n]))
    assert np.count_nonzero(sys.matrix - np.diag(np.diag(sys.matrix))) == 0


def test_zero_data_gives_zero_rhs():
    assert np.all(assemble(zero_data_instance(), ones(zero_data_instance())).rhs == 0)


@given(seed=st.integers(0, 10_000))
def test_matrix_symmetric(seed):
    inst = small_data_instance(N=12)
    w = np.random.default_rng(seed).uniform(0.1, 3.0, len(inst.quad[ROBIN]))
    A = assemble(inst, w).matrix
    assert np.max(np.abs(A - A.T)) <= 1e-12 * np.max(np.abs(A))


def test_weight_validation():
    inst = small_data_instance(N=8)
    with pytest.raises(ValueError):
        assemble(inst, np.zeros(len(inst.quad[ROBIN])))
    with pytest.raises(ValueError):
        assemble(inst, np.ones(3))


def test_instance_validation():
    base = small_data_instance(N=8)
    for bad in (dict(xi=1.2), dict(xi=0.0), dict(N=3), dict(penalty_eta=-1.0), dict(penalty_eta=0.0)):
        with pytest.raises(ValueError):
            dataclasses.replace(base, **bad)
    with pytest.raises(PartitionError):
        dataclasses.replace(base, verification_mode=False, partition=constant_solution_instance().partition)


def test_zero_rhs_gives_zero_solution():
    inst = small_data_instance(N=16)
    sys = assemble(inst, ones(inst))
    u = solve_step(with_rhs(sys, np.zeros_like(sys.rhs)))
    assert np.all(u.coeffs == 0)


def test_manufactured_round_trip():
    rng = np.random.default_rng(0)
    inst = small_data_instance(N=32, penalty_eta=1e4)
    sys = assemble(inst, ones(inst))
    x = rng.standard_normal(len(sys.rhs))
    got = solve_step(with_rhs(sys, sys.matrix @ x)).to_real()
    assert np.linalg.norm(got - x) <= 1e-10 * np.linalg.norm(x)


def test_manufactured_round_trip_default_penalty_is_conditioning_limited():
    rng = np.random.default_rng(1)
    inst = small_data_instance(N=32)
    sys = assemble(inst, ones(inst))
    x = rng.standard_normal(len(sys.rhs))
    got = solve_step(with_rhs(sys, sys.matrix @ x)).to_real()
    cond = np.linalg.cond(sys.matrix)
    assert np.linalg.norm(got - x) <= 10 * cond * np.finfo(float).eps * np.linalg.norm(x)


def test_constant_solution():
    inst = constant_solution_instance(c=2.0, N=16)
    u = solve_step(assemble(inst, ones(inst)))
    assert abs(u.coeff(0) - 1.0) < 1e-10
    assert np.max(np.abs(np.delete(u.coeffs, 16))) < 1e-10


def test_indefinite_system_is_reported():
    inst = small_data_instance(N=8)
    sys = assemble(inst, ones(inst))
    bad = dataclasses.replace(sys, matrix=-sys.matrix, dirichlet_eigen=None)
    with pytest.raises(IndefiniteSystemError):
        solve_step(bad)
    singular = dataclasses.replace(sys, matrix=np.diag(sys.dtn_diag), dirichlet_eigen=None)
    with pytest.raises(IndefiniteSystemError):
        solve_step(singular)


def test_residuals_of_zero_data():
    inst = zero_data_instance()
    r = boundary_residuals(TrigPoly.zero(inst.N), inst)
    assert r.as_dict() == {"dirichlet": 0.0, "neumann": 0.0, "robin": 0.0}
    assert r.max() == 0.0


def test_constant_solution_residual():
    # the nonlinear residual at u = 1 is (varphi f(1) - g); with the weight
    # frozen at f(1) the linear residual must vanish
    inst = constant_solution_instance(c=2.0, N=16)
    frozen = dataclasses.replace(inst, g=Constant(2.0 * f_alpha(inst.alpha, 1.0)))
    r = boundary_residuals(TrigPoly.cosine(16, 0), frozen)
    assert r.robin < 1e-10


def test_dirichlet_residual_decreases_with_penalty():
    res = []
    for eta in (1e4, 1e5, 1e6):
        inst = small_data_instance(N=64, penalty_eta=eta)
        u = solve_step(assemble(inst, ones(inst)))
        res.append(boundary_residuals(u, inst).dirichlet)
    assert res[0] > res[1] > res[2]


@given(seed=st.integers(0, 10_000))
def test_discrete_coercivity(seed):
    rng = np.random.default_rng(seed)
    inst = small_data_instance(N=12)
    sys = assemble(inst, rng.uniform(0.5, 2.0, len(inst.quad[ROBIN])))
    x = rng.standard_normal(len(sys.rhs))
    x[0] = 0.0
    assert sys.bilinear(x, x) >= v_norm(TrigPoly.from_real(x)) ** 2 * (1 - 1e-12)


@given(seed=st.integers(0, 10_000))
def test_continuity_witness(seed):
    rng = np.random.default_rng(seed)
    inst = small_data_instance(N=12, penalty_eta=10.0)
    sys = assemble(inst, ones(inst))
    kappa = sys.continuity_constant()
    assert math.isfinite(kappa) and kappa > 0
    w = sys.dtn_diag.copy()
    w[0] = 2 * math.pi
    w[1:] += math.pi
    x, y = rng.standard_normal((2, len(w)))
    nx, ny = math.sqrt(np.sum(w * x * x)), math.sqrt(np.sum(w * y * y))
    assert abs(sys.bilinear(x, y)) <= kappa * nx * ny * (1 + 1e-12)


def test_galerkin_orthogonality_moderate_penalty():
    inst = canonical_instance(64, penalty_eta=1e4)
    sys = assemble(inst, ones(inst))
    x = solve_step(sys).to_real()
    assert np.max(np.abs(sys.matrix @ x - sys.rhs)) <= 1e-9


def test_galerkin_orthogonality_default_penalty_backward_stable():
    inst = canonical_instance(64)
    sys = assemble(inst, ones(inst))
    x = solve_step(sys).to_real()
    assert backward_error(sys.matrix, x, sys.rhs) <= 1e-14


def test_mode_refinement_smooth_data():
    norms = [v_norm(solve_step(assemble(i, ones(i)))) for i in (smooth_robin_instance(N) for N in (16, 32))]
    assert abs(norms[0] - norms[1]) < 1e-6


def test_quadrature_doubling_changes_mass_entries_at_roundoff():
    inst = small_data_instance(N=32)
    finer = dataclasses.replace(inst, points_per_panel=16)
    a = assemble(inst, ones(inst))
    b = assemble(finer, ones(finer))
    assert np.max(np.abs(a.robin_mass - b.robin_mass)) < 1e-12
    assert np.max(np.abs(a.dirichlet_mass - b.dirichlet_mass)) < 1e-12


def test_quadrature_mismatch_is_detected():
    inst = small_data_instance(N=8)
    with pytest.raises(ValueError):
        assemble(inst, np.ones(len(inst.quad[ROBIN]) + 1))


def test_data_norms_and_admissible_coefficient():
    inst = small_data_instance(0.004, N=16)
    assert inst.phi_l2 == pytest.approx(0.004 * math.sqrt(math.pi / 2), rel=1e-13)
    assert inst.g_l2 == pytest.approx(0.002 * math.sqrt(math.pi), rel=1e-13)
    assert inst.admissibility.admissible
    assert inst.admissibility.margin == pytest.approx(0.1 * inst.xi * inst.Lambda, rel=1e-12)


def test_trace_at_other_degree():
    inst = small_data_instance(N=16)
    f = TrigPoly.cosine(4, 2)
    nodes = inst.quad[ROBIN].nodes
    assert np.allclose(inst.trace_at(ROBIN, f), np.cos(2 * nodes), atol=1e-14)


def test_sample_table_coefficient_assembles():
    inst = dataclasses.replace(small_data_instance(N=16), varphi=Cosine(0.01, 1, 0.0, 0.02))
    sys = assemble(inst, ones(inst))
    assert isinstance(sys, GalerkinSystem)
    assert np.all(np.linalg.eigvalsh(sys.matrix) > 0)
