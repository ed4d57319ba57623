import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exprobin.geometry import (
    BOUNDARY_POINT,
    DIRICHLET,
    NEUMANN,
    ROBIN,
    AngularArc,
    ArcPartition,
    PartitionError,
    build_quadrature,
    locate,
    validate_partition,
)

PI = math.pi
QUARTER = ArcPartition(dirichlet=[(0, PI / 2)], neumann=[(PI / 2, PI)], robin=[(PI, 2 * PI)])


def test_three_arc_cover_is_valid():
    assert validate_partition(QUARTER).ok


def test_overlap_is_reported():
    p = ArcPartition(dirichlet=[(0, PI)], neumann=[(PI / 2, 3 * PI / 2)], robin=[(3 * PI / 2, 2 * PI)])
    res = validate_partition(p)
    assert not res.ok and res.kind == "overlap"
    with pytest.raises(PartitionError) as info:
        res.raise_if_invalid()
    assert info.value.kind == "overlap"


def test_empty_group_is_reported():
    p = ArcPartition(dirichlet=[(0, PI)], neumann=[(PI, 3 * PI / 2)], robin=[])
    res = validate_partition(p)
    assert not res.ok and res.kind == "empty-group"


def test_coverage_gap_is_reported():
    p = ArcPartition(dirichlet=[(0, PI / 2)], neumann=[(PI / 2, PI)], robin=[(PI, 1.9 * PI)])
    assert validate_partition(p).kind == "coverage"


@pytest.mark.parametrize("pair", [(0.0, 0.0), (1.0, 0.5), (0.0, 2 * PI), (float("nan"), 1.0)])
def test_malformed_arcs(pair):
    with pytest.raises(PartitionError):
        AngularArc(*pair)


def test_wraparound_arc_normalization_and_membership():
    a = AngularArc.from_pair(-PI / 4, PI / 4)
    assert a.start == pytest.approx(7 * PI / 4) and a.length == pytest.approx(PI / 2)
    assert a.contains(0.0) and a.contains(2 * PI - 0.1) and not a.contains(PI)
    p = ArcPartition(dirichlet=[(-PI / 4, PI / 4)], neumann=[(PI / 4, PI)], robin=[(PI, 7 * PI / 4)])
    assert validate_partition(p).ok
    assert locate(0.0, p) == DIRICHLET


def test_locate_examples():
    assert locate(PI / 4, QUARTER) == DIRICHLET
    assert locate(3 * PI / 2, QUARTER) == ROBIN
    assert locate(3 * PI / 4, QUARTER) == NEUMANN
    assert locate(PI / 2, QUARTER) == BOUNDARY_POINT
    assert locate(PI / 4 + 2 * PI, QUARTER) == DIRICHLET


def test_quadrature_examples():
    q = build_quadrature([AngularArc(PI, 2 * PI)], 1, 4)
    assert q.measure == pytest.approx(PI, abs=1e-12)
    q = build_quadrature([AngularArc(0, PI)], 8, 8)
    assert q.integrate(np.sin(q.nodes)) == pytest.approx(2.0, abs=1e-12)
    q = build_quadrature([AngularArc(0, PI), AngularArc(PI, 2 * PI)], 16, 8)
    assert q.integrate(np.ones(len(q))) == pytest.approx(2 * PI, abs=1e-12)


def test_quadrature_nodes_inside_arcs_and_positive_weights():
    arcs = [AngularArc(1.5 * PI, 2.5 * PI)]
    q = build_quadrature(arcs, 5, 6)
    assert np.all(q.weights > 0)
    assert np.all(arcs[0].contains(q.nodes))


def test_quadrature_preconditions():
    with pytest.raises(ValueError):
        build_quadrature([AngularArc(0, 1)], 0, 8)
    with pytest.raises(ValueError):
        build_quadrature([AngularArc(0, 1)], 4, 1)


@given(k=st.integers(0, 8), ppp=st.integers(4, 8))
def test_doubling_points_does_not_increase_error(k, ppp):
    arc = AngularArc(0.3, 2.1)
    exact = (np.exp(1j * k * arc.end) - np.exp(1j * k * arc.start)) / (1j * k) if k else arc.length
    errs = []
    for n in (ppp, 2 * ppp):
        q = build_quadrature([arc], 4, n)
        errs.append(abs(q.integrate(np.cos(k * q.nodes)) + 1j * q.integrate(np.sin(k * q.nodes)) - exact))
    assert errs[1] <= errs[0] + 1e-13


cut_points = st.lists(st.floats(0.05, 2 * PI - 0.05), min_size=2, max_size=6, unique=True)


@given(cuts=cut_points, data=st.data())
def test_validation_invariant_under_permutation_and_splitting(cuts, data):
    edges = [0.0] + sorted(cuts) + [2 * PI]
    edges = [e for i, e in enumerate(edges) if i == 0 or e - edges[i - 1] > 1e-3]
    if len(edges) < 4 or edges[-1] != 2 * PI:
        return
    arcs = list(zip(edges[:-1], edges[1:]))
    labels = [0, 1, 2] + [data.draw(st.integers(0, 2)) for _ in arcs[3:]]
    groups = {0: [], 1: [], 2: []}
    for lab, arc in zip(labels, arcs):
        groups[lab].append(arc)
    p = ArcPartition(groups[0], groups[1], groups[2])
    assert validate_partition(p).ok
    shuffled = ArcPartition(groups[0][::-1], groups[1][::-1], groups[2][::-1])
    assert validate_partition(shuffled).ok
    a, b = groups[0][0]
    mid = 0.5 * (a + b)
    split = ArcPartition([(a, mid), (mid, b)] + groups[0][1:], groups[1], groups[2])
    assert validate_partition(split).ok
