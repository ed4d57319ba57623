import dataclasses
import math

import numpy as np
import pytest

from exprobin.boundary_data import Constant
from exprobin.instances import (
    canonical_instance,
    small_data_instance,
    smooth_robin_instance,
    zero_data_instance,
)
from exprobin.linear_step import InadmissibleCoefficientError, assemble, boundary_residuals, solve_step
from exprobin.picard import (
    DivergenceError,
    NonConvergenceError,
    SolverReport,
    ball_check,
    cauchy_tail_bound,
    contraction_report,
    run_picard,
)
from exprobin.spectral import TrigPoly, v_norm


def synthetic(increments, K=0.5, M0=1.0, norms=None):
    ratios = [b / a for a, b in zip(increments, increments[1:])]
    norms = norms if norms is not None else [0.5] * len(increments)
    return SolverReport(len(increments), norms, increments, ratios, K, M0,
                        [v <= M0 for v in norms], None, True)


def test_zero_data_converges_in_one_step():
    u, rep = run_picard(zero_data_instance())
    assert rep.converged and rep.iterations == 1
    assert np.all(u.coeffs == 0) and rep.v_norms == [0.0]
    assert ball_check(rep)


def test_admissible_small_data_run():
    inst = small_data_instance(N=64)
    assert inst.admissibility.admissible and inst.varphi_nodes[0] > 0.1
    u, rep = run_picard(inst, tol=1e-10)
    assert rep.converged and rep.increments[-1] <= 1e-10
    assert all(r <= inst.xi for r in rep.ratios)
    assert ball_check(rep)
    assert contraction_report(rep).certified


def test_uniqueness_from_different_starts():
    inst = small_data_instance(N=64)
    u0, _ = run_picard(inst)
    start = solve_step(assemble(inst, np.ones(len(inst.quad["R"]))))
    u1, _ = run_picard(inst, start=start)
    assert v_norm(u0 - u1) <= 1e-8


def test_limit_consistency_smooth_problem():
    inst = smooth_robin_instance(N=32)
    tol = 1e-10
    u, rep = run_picard(inst, tol=tol)
    phi_inf = float(np.max(np.abs(inst.varphi_nodes)))
    assert rep.final_residuals["robin"] <= 10 * tol * (1 + phi_inf)


def test_exploratory_inadmissible_still_contracts():
    inst = dataclasses.replace(canonical_instance(32), varphi=Constant(2.0))
    assert not inst.admissibility.admissible
    _, rep = run_picard(inst)
    assert rep.converged and rep.admissible is False
    assert max(rep.ratios) < 0.5


def test_guarantee_mode_rejects_inadmissible():
    inst = dataclasses.replace(canonical_instance(16), varphi=Constant(2.0), guarantee_mode=True)
    with pytest.raises(InadmissibleCoefficientError):
        run_picard(inst)


def test_non_convergence_carries_partial_report():
    inst = dataclasses.replace(canonical_instance(16), varphi=Constant(2.0))
    with pytest.raises(NonConvergenceError) as info:
        run_picard(inst, tol=1e-30, max_iter=3)
    rep = info.value.report
    assert rep.iterations == 3 and not rep.converged and len(rep.ratios) == 2
    assert rep.final_residuals is not None
    assert "last ratio" in str(info.value)


def test_divergence_detected():
    inst = dataclasses.replace(canonical_instance(16), varphi=Constant(1.0))
    start = TrigPoly.cosine(16, 0, 5000.0)
    with pytest.raises(DivergenceError) as info:
        run_picard(inst, start=start)
    assert info.value.report.final_residuals is None


def test_argument_validation():
    inst = zero_data_instance()
    with pytest.raises(ValueError):
        run_picard(inst, tol=0.0)
    with pytest.raises(ValueError):
        run_picard(inst, max_iter=0)


def test_deterministic_reports():
    inst_a, inst_b = small_data_instance(N=32), small_data_instance(N=32)
    ua, ra = run_picard(inst_a)
    ub, rb = run_picard(inst_b)
    assert np.array_equal(ua.coeffs, ub.coeffs)
    assert ra.to_dict() == rb.to_dict()


def test_contraction_report_examples():
    rep = synthetic([1.0, 0.4, 0.18, 0.0756])
    s = contraction_report(rep)
    assert s.max_ratio == pytest.approx(0.45)
    assert s.certified and s.verdict == "contraction certified"
    assert 0.4 <= s.fitted_rate <= 0.45
    with pytest.raises(ValueError):
        contraction_report(synthetic([1.0, 0.5]))
    bad = contraction_report(synthetic([1.0, 0.6, 0.36, 0.2]))
    assert not bad.certified


def test_tail_bound():
    assert cauchy_tail_bound(1e-3, 0.5) == pytest.approx(2e-3)
    with pytest.raises(ValueError):
        cauchy_tail_bound(1.0, 1.0)


def test_ball_check_examples():
    assert ball_check(synthetic([1.0], M0=1.0, norms=[1.0 + 1e-9]))
    assert not ball_check(synthetic([1.0, 0.1], M0=1.0, norms=[0.5, 2.0]))


def test_iteration_rows_and_serialization():
    _, rep = run_picard(small_data_instance(N=16))
    rows = rep.iteration_rows()
    assert rows[0][0] == 1 and rows[0][3] is None
    assert rows[1][3] == pytest.approx(rep.ratios[0])
    d = run_picard(canonical_instance(16))[1].to_dict()
    assert d["log_Lambda"] < -1000
    assert set(d) >= {"iterations", "v_norms", "increments", "ratios", "theoretical_K", "M0", "in_ball",
                      "final_residuals", "converged"}


def test_residuals_shrink_with_smooth_refinement():
    r = [run_picard(smooth_robin_instance(N))[1].final_residuals["robin"] for N in (8, 16)]
    assert r[1] < r[0]
    assert math.isfinite(r[1])


def test_canonical_residuals_are_reported():
    inst = canonical_instance(32)
    u, rep = run_picard(inst)
    assert rep.final_residuals == boundary_residuals(u, inst).as_dict()
