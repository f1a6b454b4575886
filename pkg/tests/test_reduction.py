"""Reduction engine: Schur complements, support inference, law recovery."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import kronred as kr
from kronred.errors import AssumptionError, NonQuadraticLawError
from kronred.graph import build_incidence
from kronred.reduction import (
    SamplingPlan,
    _pool_edge_samples,
    monotone_cubic,
    schur_complement,
)

from conftest import (
    SHIPPED_ACYCLIC,
    diode_opposite_net,
    diode_same_net,
    finite_difference_jacobian,
    linear_series_net,
    linear_star_net,
    random_connected_graph,
    triangle_center_net,
)

PLAN = SamplingPlan(count=400, seed=3)


def test_reduced_hessian_diode_at_origin(diode_opposite):
    h = kr.reduced_hessian(diode_opposite, np.zeros(2))
    np.testing.assert_allclose(h, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-12)


def test_reduced_hessian_linear_series_everywhere(linear_series):
    rng = np.random.default_rng(0)
    for _ in range(5):
        z_b = rng.uniform(-2, 2, 2)
        h = kr.reduced_hessian(linear_series, z_b)
        np.testing.assert_allclose(h, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-12)


def test_reduced_hessian_no_central_nodes():
    g = kr.DirectedGraph(("a", "b"), (("a", "b"),))
    net = kr.build_network(g, [kr.edge_law("2*y")], ("a", "b"))
    h = kr.reduced_hessian(net, np.array([0.3, 0.0]))
    np.testing.assert_allclose(h, kr.weighted_laplacian(net, np.array([0.3, 0.0])))


def test_reduced_hessian_matches_current_jacobian(diode_opposite):
    rng = np.random.default_rng(1)
    for _ in range(5):
        z_b = rng.uniform(-1.5, 1.5, 2)
        h = kr.reduced_hessian(diode_opposite, z_b)
        fd = finite_difference_jacobian(
            lambda v: kr.solve_interior(diode_opposite, v).j_b, z_b, h=1e-4)
        assert np.abs(h - fd).max() <= 1e-5 * (1.0 + np.abs(h).max())


def test_infer_support_path(diode_opposite):
    graph, cert = kr.infer_reduced_graph(diode_opposite, SamplingPlan(count=8))
    assert graph.edges == (("1", "2"),)
    assert cert.support_stable and cert.acyclic


def test_infer_support_star_triangle(linear_star):
    graph, cert = kr.infer_reduced_graph(linear_star, SamplingPlan(count=8))
    assert graph.edges == (("1", "2"), ("1", "3"), ("2", "3"))
    assert cert.support_stable and not cert.acyclic


def test_infer_support_interior_paths_only():
    # b1 - c - b2 - b3: b1 and b3 connect only through boundary node b2,
    # so no reduced edge appears between them
    g = kr.DirectedGraph(("b1", "c", "b2", "b3"),
                         (("b1", "c"), ("c", "b2"), ("b2", "b3")))
    laws = [kr.edge_law("y + tanh(y)") for _ in range(3)]
    net = kr.build_network(g, laws, ("b1", "b2", "b3"))
    graph, cert = kr.infer_reduced_graph(net, SamplingPlan(count=8))
    assert set(graph.edges) == {("b1", "b2"), ("b2", "b3")}
    assert cert.support_stable


def test_support_matches_interior_path_oracle():
    # reduced edges exactly where boundary nodes share an interior component
    rng = np.random.default_rng(5)
    for _ in range(5):
        graph = random_connected_graph(rng, n_min=3, n_max=6, allow_parallel=False)
        laws = [kr.edge_law("y + 0.25*y^3") for _ in range(graph.m)]
        n_b = int(rng.integers(2, graph.n))
        boundary = sorted(rng.choice(graph.n, size=n_b, replace=False))
        names = [graph.node_ids[i] for i in boundary]
        net = kr.build_network(graph, laws, names)
        inferred, _ = kr.infer_reduced_graph(net, SamplingPlan(count=4))
        central = set(graph.node_ids) - set(names)
        # oracle: union-find over central nodes, then adjacency of boundary
        comp = {c: c for c in central}

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        for t, h in graph.edges:
            if t in central and h in central:
                comp[find(t)] = find(h)
        expected = set()
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                direct = any({t, h} == {a, b} for t, h in graph.edges)
                comps_a = {find(c) for t, h in graph.edges
                           for c in (t, h) if c in central and a in (t, h)}
                comps_b = {find(c) for t, h in graph.edges
                           for c in (t, h) if c in central and b in (t, h)}
                if direct or (comps_a & comps_b):
                    expected.add((a, b))
        got = {tuple(sorted(e)) for e in inferred.edges}
        assert got == {tuple(sorted(e)) for e in expected}


def test_acyclic_recovery_diode_opposite_tanh(diode_opposite):
    rn = kr.recover_edge_laws_acyclic(
        diode_opposite, kr.infer_reduced_graph(diode_opposite, SamplingPlan(count=8))[0], PLAN)
    assert rn.graph.edges == (("1", "2"),)
    table = rn.edge_tables[0]
    assert np.abs(table.current - np.tanh(table.y / 2.0)).max() <= 1e-8
    assert (np.diff(table.y) > 0).all() and (np.diff(table.current) > 0).all()


def test_acyclic_recovery_diode_same_exponential(diode_same):
    graph, _ = kr.infer_reduced_graph(diode_same, SamplingPlan(count=8))
    rn = kr.recover_edge_laws_acyclic(diode_same, graph, PLAN)
    table = rn.edge_tables[0]
    # reduced edge oriented 1 -> 2, so the table value is z2 - z1
    assert np.abs(table.current - (np.exp(table.y / 2.0) - 1.0)).max() <= 1e-8


def test_acyclic_recovery_linear_series(linear_series):
    graph, _ = kr.infer_reduced_graph(linear_series, SamplingPlan(count=8))
    rn = kr.recover_edge_laws_acyclic(linear_series, graph, PLAN)
    table = rn.edge_tables[0]
    np.testing.assert_allclose(table.current, 0.5 * table.y, atol=1e-10)


def test_acyclic_recovery_cocontent_anchored(diode_opposite):
    graph, _ = kr.infer_reduced_graph(diode_opposite, SamplingPlan(count=8))
    rn = kr.recover_edge_laws_acyclic(diode_opposite, graph, PLAN)
    law = rn.edge_tables[0].law()
    assert law.cocontent(0.0) == pytest.approx(0.0, abs=1e-14)
    # analytic reduced co-content for the tanh law
    for v in (-2.0, 1.0, 3.0):
        want = 2.0 * math.log((math.exp(-v / 2) + math.exp(v / 2)) / 2.0)
        assert law.cocontent(v) == pytest.approx(want, abs=1e-7)


def test_cyclic_recovery_quadratic_triangle(triangle_center):
    rn = kr.reduce_network(triangle_center, SamplingPlan(count=64, seed=1))
    # all-quadratic input takes the exact path; force the sampled one too
    graph, cert = kr.infer_reduced_graph(triangle_center, SamplingPlan(count=16, seed=1))
    fitted = kr.recover_edge_laws_cyclic(triangle_center, graph,
                                         SamplingPlan(count=64, seed=1), cert)
    assert fitted.certificate.consistency_residual <= 1e-8
    assert fitted.certificate.accepted
    exact = {tuple(sorted(e)): t for e, t in zip(rn.graph.edges, rn.edge_tables)}
    for edge, table in zip(fitted.graph.edges, fitted.edge_tables):
        want = exact[tuple(sorted(edge))]
        w = want.current[-1] / want.y[-1]
        slope = np.polyfit(table.y, table.current, 1)[0]
        assert slope == pytest.approx(w, abs=1e-7)


def test_cyclic_path_on_acyclic_support_matches_exact(diode_opposite):
    graph, cert = kr.infer_reduced_graph(diode_opposite, SamplingPlan(count=8))
    a = kr.recover_edge_laws_acyclic(diode_opposite, graph, PLAN)
    c = kr.recover_edge_laws_cyclic(diode_opposite, graph, PLAN)
    for ta, tc in zip(a.edge_tables, c.edge_tables):
        np.testing.assert_allclose(ta.y, tc.y, atol=1e-12)
        np.testing.assert_allclose(ta.current, tc.current, atol=1e-8)


def test_integrability_zero_for_acyclic(diode_opposite):
    graph, _ = kr.infer_reduced_graph(diode_opposite, SamplingPlan(count=8))
    rn = kr.recover_edge_laws_acyclic(diode_opposite, graph, PLAN)
    value = kr.integrability_diagnostic(
        diode_opposite, graph, kr.cycle_space(graph), PLAN, rn)
    assert value == 0.0


def test_integrability_small_for_quadratic_cycle(triangle_center):
    plan = SamplingPlan(count=64, seed=1)
    graph, cert = kr.infer_reduced_graph(triangle_center, SamplingPlan(count=8, seed=1))
    rn = kr.recover_edge_laws_cyclic(triangle_center, graph, plan, cert)
    value = kr.integrability_diagnostic(
        triangle_center, graph, kr.cycle_space(graph), plan, rn)
    assert value <= 1e-6


def test_integrability_reports_finite_value_for_nonlinear_cycle():
    from conftest import diode_ring_net

    net = diode_ring_net()
    plan = SamplingPlan(count=96, seed=2, scale=1.0)
    graph, cert = kr.infer_reduced_graph(net, SamplingPlan(count=8, seed=2, scale=1.0))
    rn = kr.recover_edge_laws_cyclic(net, graph, plan, cert)
    value = kr.integrability_diagnostic(net, graph, kr.cycle_space(graph), plan, rn,
                                        max_points=2)
    assert np.isfinite(value)


def test_effective_curve_diode_opposite(diode_opposite):
    pts = kr.effective_curve(diode_opposite, "1", "2", [0.0, 2.0])
    assert pts[0].current == pytest.approx(0.0, abs=1e-12)
    assert pts[0].cocontent == pytest.approx(0.0, abs=1e-12)
    assert pts[1].current == pytest.approx(math.tanh(1.0), abs=1e-9)


def test_effective_curve_diode_same_reversed_pair(diode_same):
    pts = kr.effective_curve(diode_same, "2", "1", [2.0])
    assert pts[0].current == pytest.approx(math.e - 1.0, abs=1e-9)


def test_effective_curve_strictly_increasing(diode_opposite):
    grid = np.linspace(-3, 3, 21)
    pts = kr.effective_curve(diode_opposite, "1", "2", grid)
    currents = [p.current for p in pts]
    assert all(b > a for a, b in zip(currents, currents[1:]))


def test_effective_curve_odd_symmetry(diode_opposite):
    for v in (0.5, 1.5, 3.0):
        plus, minus = kr.effective_curve(diode_opposite, "1", "2", [v, -v])
        assert plus.current == pytest.approx(-minus.current, abs=1e-9)


def test_effective_curve_orientation_asymmetry(diode_same):
    plus, minus = kr.effective_curve(diode_same, "2", "1", [2.0, -2.0])
    assert abs(plus.current + minus.current) > 0.5  # e - 1 vs 1/e - 1


def test_effective_curve_ignores_boundary_partition(linear_star):
    # all other nodes become central for the curve regardless of partition
    pts = kr.effective_curve(linear_star, "1", "2", [1.0])
    # 1 -- 0 -- 2 with unit laws, leaf 3 dangling: conductance 0.5
    assert pts[0].current == pytest.approx(0.5, abs=1e-10)


def test_reduce_linear_series(linear_series):
    rn = kr.reduce_linear(linear_series)
    assert rn.graph.edges == (("1", "2"),)
    table = rn.edge_tables[0]
    np.testing.assert_allclose(table.current, 0.5 * table.y, atol=1e-12)
    assert rn.certificate.exact_linear


def test_reduce_linear_star(linear_star):
    rn = kr.reduce_linear(linear_star)
    assert rn.graph.edges == (("1", "2"), ("1", "3"), ("2", "3"))
    for table in rn.edge_tables:
        np.testing.assert_allclose(table.current, table.y / 3.0, atol=1e-12)


def test_reduce_linear_no_central_nodes():
    g = kr.DirectedGraph(("a", "b"), (("a", "b"),))
    net = kr.build_network(g, [kr.edge_law("2*y")], ("a", "b"))
    rn = kr.reduce_linear(net)
    assert rn.graph.edges == (("a", "b"),)
    np.testing.assert_allclose(rn.edge_tables[0].current, 2.0 * rn.edge_tables[0].y)


def test_reduce_linear_rejects_nonquadratic(diode_opposite):
    with pytest.raises(NonQuadraticLawError):
        kr.reduce_linear(diode_opposite)


def test_one_by_one_elimination_matches_block():
    rng = np.random.default_rng(7)
    for _ in range(20):
        graph = random_connected_graph(rng, n_min=3, n_max=8)
        w = rng.uniform(0.2, 3.0, graph.m)
        d = build_incidence(graph)
        lap = (d * w) @ d.T
        n_b = int(rng.integers(1, graph.n))
        keep = sorted(rng.choice(graph.n, size=n_b, replace=False))
        elim = [i for i in range(graph.n) if i not in keep]
        block = schur_complement(lap, keep, elim)
        # eliminate central nodes one at a time
        current = lap
        remaining = list(range(graph.n))
        for node in elim:
            pos = remaining.index(node)
            others = [i for i in range(len(remaining)) if i != pos]
            current = schur_complement(current, others, [pos])
            remaining.remove(node)
        assert np.abs(current - block).max() <= 1e-10 * (1.0 + np.abs(block).max())


def test_weight_locality_under_gauge_shift(diode_opposite):
    rng = np.random.default_rng(9)
    for _ in range(10):
        z_b = rng.uniform(-1.5, 1.5, 2)
        c = rng.uniform(-2.0, 2.0)
        h0 = kr.reduced_hessian(diode_opposite, z_b)
        h1 = kr.reduced_hessian(diode_opposite, z_b + c)
        assert np.abs(h1 - h0).max() <= 1e-9


@pytest.mark.parametrize("name", sorted(SHIPPED_ACYCLIC))
def test_input_output_equivalence_shipped(name):
    net = SHIPPED_ACYCLIC[name]()
    rn = kr.reduce_network(net, PLAN)
    report = kr.holdout_residual(net, rn, PLAN, count=50)
    assert report.max_rel <= 1e-6, (name, report)


@pytest.mark.parametrize("name", sorted(SHIPPED_ACYCLIC))
def test_reduced_hessian_consistency_shipped(name):
    net = SHIPPED_ACYCLIC[name]()
    rn = kr.reduce_network(net, PLAN)
    dhat = build_incidence(rn.graph).astype(float)
    laws = rn.laws()
    for z_b in PLAN.holdout_samples(2, count=10):
        h = kr.reduced_hessian(net, z_b)
        yh = dhat.T @ z_b
        w = np.array([laws[j].gp_at(yh[j]) for j in range(rn.graph.m)])
        model = (dhat * w) @ dhat.T
        assert np.abs(model - h).max() <= 1e-4 * (1.0 + np.abs(h).max()), name


def test_reduction_is_deterministic(diode_opposite):
    plan = SamplingPlan(count=32, seed=5)
    a = kr.reduce_network(diode_opposite, plan)
    b = kr.reduce_network(diode_opposite, plan)
    np.testing.assert_array_equal(a.edge_tables[0].y, b.edge_tables[0].y)
    np.testing.assert_array_equal(a.edge_tables[0].current, b.edge_tables[0].current)


def test_cyclic_rank_deficiency_with_too_few_samples(triangle_center):
    graph, cert = kr.infer_reduced_graph(triangle_center, SamplingPlan(count=2, seed=1))
    with pytest.raises(AssumptionError):
        kr.recover_edge_laws_cyclic(triangle_center, graph, SamplingPlan(count=2, seed=1), cert)


def test_pooling_rejects_inconsistent_pairs():
    ys = np.array([0.0, 1e-10, 1.0])
    cs = np.array([0.0, 1e-3, 2.0])
    with pytest.raises(AssumptionError):
        _pool_edge_samples(ys, cs, "edge test")


def test_pooling_rejects_nonmonotone_currents():
    ys = np.array([0.0, 0.5, 1.0])
    cs = np.array([0.0, 0.4, 0.3])
    with pytest.raises(AssumptionError):
        _pool_edge_samples(ys, cs, "edge test")


def test_acyclic_recovery_requires_forest(triangle_center):
    graph, _ = kr.infer_reduced_graph(triangle_center, SamplingPlan(count=4, seed=1))
    with pytest.raises(AssumptionError):
        kr.recover_edge_laws_acyclic(triangle_center, graph, SamplingPlan(count=8, seed=1))


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=30, unique=True),
       st.integers(0, 2**31))
def test_monotone_cubic_is_monotone(xs, seed):
    x = np.sort(np.asarray(xs))
    if np.diff(x).min() < 1e-9:
        return
    rng = np.random.default_rng(seed)
    y = np.cumsum(rng.uniform(1e-6, 2.0, len(x)))
    f = monotone_cubic(x, y)
    grid = np.linspace(x[0], x[-1], 801)
    vals = f(grid)
    assert (np.diff(vals) >= -1e-12 * (1.0 + np.abs(vals).max())).all()


def test_reduced_network_view_evaluates(diode_opposite):
    rn = kr.reduce_network(diode_opposite, PLAN)
    net = rn.as_network()
    z_b = np.array([0.8, -0.3])
    j_direct = kr.nodal_currents(net, z_b)
    j_orig = kr.solve_interior(diode_opposite, z_b).j_b
    assert np.abs(j_direct - j_orig).max() <= 1e-7
