import math

import numpy as np
import pytest

import oracles
from stresslab.errors import AnalysisError
from stresslab.graphs import Drawing, Graph, generate_graph
from stresslab.quality import (
    adjacent_crossing_exclusions,
    correlation_matrix,
    count_crossings,
    crossing_bound,
    edge_crossing_metric,
    four_cycle_count,
    node_uniformity,
    average_edge_length,
    average_node_distance,
    orientation,
    pearson,
    segments_cross,
    triangle_crossing_exclusions,
    triangles,
)


def _graph_of(nx_graph):
    import networkx as nx

    mapping = {v: i for i, v in enumerate(sorted(nx_graph.nodes()))}
    g = nx.relabel_nodes(nx_graph, mapping)
    return Graph(g.number_of_nodes(), list(g.edges()))


# -- segment predicates -------------------------------------------------------


def test_orientation_signs():
    assert orientation(0, 0, 1, 0, 0, 1) > 0
    assert orientation(0, 0, 0, 1, 1, 0) < 0
    assert orientation(0, 0, 1, 1, 2, 2) == 0


def test_orientation_filter_matches_exact_on_near_degenerate(rng):
    # points nearly collinear at 1e-16 scale exercise the exact fallback
    for _ in range(2000):
        ax, ay = rng.random(2)
        bx, by = ax + rng.random(), ay + rng.random()
        t = rng.random()
        cx = ax + t * (bx - ax) + rng.choice([-1e-18, 0, 1e-18])
        cy = ay + t * (by - ay)
        got = orientation(ax, ay, bx, by, cx, cy)
        from fractions import Fraction

        exact = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (
            Fraction(by) - Fraction(ay)
        ) * (Fraction(cx) - Fraction(ax))
        want = 0 if exact == 0 else (1 if exact > 0 else -1)
        assert got == want


def test_segments_cross_cases():
    # proper crossing
    assert segments_cross((0, 0), (1, 1), (0, 1), (1, 0))
    # far apart
    assert not segments_cross((0, 0), (1, 0), (0, 1), (1, 1))
    # T-junction: endpoint of one strictly inside the other
    assert segments_cross((0, 0), (2, 0), (1, 0), (1, 1))
    # collinear with positive overlap
    assert segments_cross((0, 0), (2, 0), (1, 0), (3, 0))
    # collinear, disjoint
    assert not segments_cross((0, 0), (1, 0), (2, 0), (3, 0))
    # meeting exactly endpoint-to-endpoint is a touch, not a crossing;
    # between graph edges this would mean coincident nodes, which Drawing rejects
    assert not segments_cross((0, 0), (1, 0), (1, 0), (2, 1))
    # collinear touch at a single point is likewise not an overlap
    assert not segments_cross((0, 0), (1, 0), (1, 0), (2, 0))


def test_count_crossings_square_with_diagonals():
    # 4-cycle drawn convex: diagonals cross once, sides do not
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)])
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert count_crossings(Drawing(g, pos)) == 1


def test_count_crossings_ignores_shared_endpoints():
    g = Graph(3, [(0, 1), (0, 2)])
    # edges collinear and overlapping but share node 0: not a crossing
    pos = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]])
    assert count_crossings(Drawing(g, pos)) == 0


def test_count_crossings_matches_exact_oracle(rng):
    for trial in range(60):
        n = int(rng.integers(5, 11))
        g = generate_graph(n, seed=np.random.SeedSequence([71, trial]))
        d = Drawing(g, rng.random((n, 2)))
        assert count_crossings(d) == oracles.count_crossings_reference(d)


def test_count_crossings_on_snapped_grid_layouts(rng):
    # coarse grid coordinates make collinear/T-junction cases common
    for trial in range(40):
        n = int(rng.integers(5, 10))
        g = generate_graph(n, seed=np.random.SeedSequence([72, trial]))
        pos = rng.integers(0, 4, (n, 2)).astype(float)
        pos += np.arange(n)[:, None] * 1e-9  # break exact coincidences only
        d = Drawing(g, pos)
        assert count_crossings(d) == oracles.count_crossings_reference(d)


# -- crossing bound -----------------------------------------------------------


def test_adjacent_exclusions_star():
    g = _star(5)
    # all 5 edges share the hub: C(5,2) pairs excluded
    assert adjacent_crossing_exclusions(g) == 10


def _star(k):
    return Graph(k + 1, [(0, i) for i in range(1, k + 1)])


def test_triangle_enumeration():
    g = Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    assert triangles(g) == [(0, 1, 2), (2, 3, 4)]


def test_triangle_exclusions_triangle_plus_far_edge():
    g = Graph(5, [(0, 1), (1, 2), (0, 2), (3, 4)])
    assert triangle_crossing_exclusions(g) == 1


def test_triangle_exclusions_two_disjoint_triangles():
    g = Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert triangle_crossing_exclusions(g) == 3


def test_triangle_exclusions_shared_edge_and_shared_node():
    # two triangles sharing edge (1,2): contributes 1
    g = Graph(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
    assert triangle_crossing_exclusions(g) == 1
    # two triangles sharing only node 2: contributes 2
    g = Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    assert triangle_crossing_exclusions(g) == 2


def test_four_cycle_fixtures():
    import networkx as nx

    assert four_cycle_count(_graph_of(nx.cycle_graph(4))) == 1
    assert four_cycle_count(_graph_of(nx.complete_graph(4))) == 3
    assert four_cycle_count(_graph_of(nx.diamond_graph())) == 1
    assert four_cycle_count(_graph_of(nx.cycle_graph(5))) == 0


def test_four_cycles_match_brute_force(rng):
    for trial in range(40):
        n = int(rng.integers(5, 12))
        g = generate_graph(n, seed=np.random.SeedSequence([73, trial]))
        assert four_cycle_count(g) == oracles.four_cycles_brute(g)


def test_crossing_bound_c4():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    b = crossing_bound(g)
    assert b.four_cycle == 1
    assert b.max_crossings == 1


def test_crossing_bound_is_clamped_not_sound_on_dense_graphs():
    """The exclusion terms overlap on triangle-dense graphs.

    K4 drawn convex has one diagonal crossing, but the subtraction
    over-counts and clamps to zero. Known behavior of the formula, kept
    verbatim; the metric clamps into [0,1] regardless.
    """
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    b = crossing_bound(g)
    assert b.max_crossings == 0
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert count_crossings(Drawing(g, pos)) == 1
    assert edge_crossing_metric(Drawing(g, pos)) == 1.0  # bound 0 convention


def test_bound_holds_on_triangle_free_random_layouts(rng):
    import networkx as nx

    for base in (nx.cycle_graph(8), nx.balanced_tree(2, 3), nx.grid_2d_graph(3, 3)):
        g = _graph_of(base)
        b = crossing_bound(g)
        for _ in range(200):
            d = Drawing(g, rng.random((g.n, 2)))
            assert count_crossings(d) <= b.max_crossings


def test_edge_crossing_metric_range(rng):
    for trial in range(20):
        g = generate_graph(10, seed=np.random.SeedSequence([74, trial]))
        d = Drawing(g, rng.random((10, 2)))
        v = edge_crossing_metric(d)
        assert 0.0 <= v <= 1.0


def test_edge_crossing_metric_planar_drawing_scores_one():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    assert edge_crossing_metric(Drawing(g, pos)) == 1.0


# -- node uniformity ----------------------------------------------------------


def test_uniformity_perfect_grid():
    # 9 nodes on a 3x3 grid: one per cell
    g = _star(8)
    xs, ys = np.meshgrid(np.linspace(0, 1, 3), np.linspace(0, 1, 3))
    pos = np.column_stack([xs.ravel(), ys.ravel()])
    assert node_uniformity(Drawing(g, pos)) == pytest.approx(1.0)


def test_uniformity_clustered_scores_low():
    # the grid covers the bounding box, so nodes always span it and the
    # theoretical 0 (everything in one cell) is unreachable; heavy corner
    # clustering is the practical floor
    g = _star(8)
    pos = np.full((9, 2), 0.0)
    pos[8] = [1.0, 1.0]
    pos[:8] += np.arange(8)[:, None] * 1e-9  # distinct but tightly packed
    v = node_uniformity(Drawing(g, pos))
    assert v == pytest.approx(0.125, abs=1e-6)
    assert v < 0.15


def test_uniformity_in_unit_interval(rng):
    for trial in range(50):
        n = int(rng.integers(5, 30))
        g = _star(n - 1)
        d = Drawing(g, rng.random((n, 2)))
        assert 0.0 <= node_uniformity(d) <= 1.0


def test_uniformity_handles_degenerate_axis(rng):
    g = _star(7)
    pos = np.column_stack([np.linspace(0, 1, 8), np.full(8, 0.3)])
    v = node_uniformity(Drawing(g, pos))
    assert 0.0 <= v <= 1.0


# -- simple layout statistics ------------------------------------------------


def test_average_edge_length():
    g = Graph(3, [(0, 1), (1, 2)])
    pos = np.array([[0.0, 0.0], [3.0, 4.0], [3.0, 5.0]])
    assert average_edge_length(Drawing(g, pos)) == pytest.approx((5.0 + 1.0) / 2)


def test_average_node_distance():
    g = Graph(3, [(0, 1), (1, 2)])
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    want = (1.0 + 1.0 + math.sqrt(2)) / 3
    assert average_node_distance(Drawing(g, pos)) == pytest.approx(want)


# -- correlation --------------------------------------------------------------


def test_pearson_matches_numpy(rng):
    for _ in range(50):
        x = rng.normal(size=30)
        y = 0.4 * x + rng.normal(size=30)
        assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1])


def test_pearson_perfect_and_degenerate():
    x = np.arange(10.0)
    assert pearson(x, 3 * x + 1) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    with pytest.raises(AnalysisError):
        pearson(x, np.ones(10))
    with pytest.raises(AnalysisError):
        pearson(x[:2], x[:2])


def test_correlation_matrix_shape_and_diagonal():
    rows = [
        {"drawing_id": f"d{i}", "a": float(i), "b": float(-i), "c": float(i * i)}
        for i in range(10)
    ]
    m = correlation_matrix(rows)
    assert m.metrics == ["a", "b", "c"]
    for i in range(3):
        assert m.pearson[i][i] == 1.0
    assert m.pearson[0][1] == pytest.approx(-1.0)
    assert m.pearson[0][1] == m.pearson[1][0]
    doc = m.to_json()
    assert doc["metrics"] == ["a", "b", "c"]
    assert doc["pearson"][0][2] == pytest.approx(m.pearson[0][2])


def test_correlation_matrix_zero_variance_column_is_none():
    rows = [{"a": float(i), "b": 5.0} for i in range(6)]
    m = correlation_matrix(rows)
    bi = m.metrics.index("b")
    assert m.pearson[bi][bi] is None
    assert m.pearson[0][bi] is None


def test_correlation_matrix_needs_three_rows():
    with pytest.raises(AnalysisError):
        correlation_matrix([{"a": 1.0}, {"a": 2.0}])
