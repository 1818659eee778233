import json

import numpy as np
import pytest
from hypothesis import given, settings

from cdbound.generators import generate_family
from cdbound.graph import (
    DisconnectedGraphError,
    GraphError,
    WeightedGraph,
    combinatorial_distances,
    degree_ratio,
    laplacian_apply,
)
from cdbound.io import graph_from_edges, graph_to_document, load_graph, parse_edge_list

from conftest import single_edge, small_graphs
from oracles import dense_laplacian, hop_distances


class TestLoad:
    def test_single_edge(self):
        G = load_graph({"edges": [["a", "b", 1.0]], "measure": "unit"})
        assert G.vertices == ("a", "b")
        assert G.degree[G.index["a"]] == 1.0

    def test_asymmetric_rejected(self):
        with pytest.raises(GraphError, match="asymmetric"):
            load_graph({"edges": [["a", "b", 1.0], ["b", "a", 2.0]]})

    def test_self_loop_rejected(self):
        with pytest.raises(GraphError, match="self-loop"):
            load_graph({"edges": [["a", "a", 1.0]]})

    def test_zero_self_loop_ignored(self):
        G = load_graph({"edges": [["a", "a", 0.0], ["a", "b", 2.0]]})
        assert G.weight[0, 0] == 0 and G.weight[0, 1] == 2.0

    def test_consistent_reverse_edge_accepted(self):
        G = load_graph({"edges": [["a", "b", 1.5], ["b", "a", 1.5]]})
        assert G.weight[0, 1] == G.weight[1, 0] == 1.5

    @pytest.mark.parametrize("measure", [{"a": 1.0, "b": 0.0}, {"a": 1.0, "b": -2.0}, {"a": 1.0}])
    def test_bad_measure(self, measure):
        with pytest.raises(GraphError):
            load_graph({"edges": [["a", "b", 1.0]], "measure": measure})

    def test_negative_weight(self):
        with pytest.raises(GraphError):
            load_graph({"edges": [["a", "b", -1.0]]})

    def test_degree_measure(self):
        G = load_graph({"edges": [["a", "b", 2.0], ["b", "c", 3.0]], "measure": "degree"})
        np.testing.assert_array_equal(G.measure, [2.0, 5.0, 3.0])

    def test_declared_vertices_keep_isolated(self):
        G = load_graph({"vertices": ["a", "b", "z"], "edges": [["a", "b", 1.0]]})
        assert len(G) == 3 and not G.is_connected

    def test_unknown_vertex_with_declared_list(self):
        with pytest.raises(GraphError, match="unknown vertex"):
            load_graph({"vertices": ["a", "b"], "edges": [["a", "c", 1.0]]})

    def test_edge_list_text(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# path\na b 1\nb c 2.5\n\n")
        G = load_graph(p)
        assert G.vertices == ("a", "b", "c")
        assert G.weight[1, 2] == 2.5 and G.measure.tolist() == [1.0, 1.0, 1.0]

    def test_edge_list_malformed(self):
        with pytest.raises(GraphError, match="line 1"):
            parse_edge_list("a b c d\n")

    def test_json_file_roundtrip(self, tmp_path):
        G = generate_family("hypercube", 2, "degree")
        p = tmp_path / "g.json"
        p.write_text(json.dumps(graph_to_document(G)))
        H = load_graph(p)
        assert H.vertices == G.vertices
        np.testing.assert_array_equal(H.weight, G.weight)
        np.testing.assert_array_equal(H.measure, G.measure)

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "g.json"
        p.write_text("{not json")
        with pytest.raises(GraphError, match="invalid JSON"):
            load_graph(p)

    def test_immutable(self):
        G = single_edge()
        with pytest.raises(ValueError):
            G.weight[0, 1] = 5.0


class TestGenerators:
    def test_triangle(self):
        G = generate_family("complete", 3)
        np.testing.assert_array_equal(G.degree, [2, 2, 2])

    def test_hypercube(self):
        G = generate_family("hypercube", 3)
        assert len(G) == 8
        np.testing.assert_array_equal(G.degree, np.full(8, 3.0))

    def test_path_degree_measure(self):
        G = generate_family("path", 3, "degree")
        np.testing.assert_allclose(degree_ratio(G).values, 1.0)

    def test_star_sizes(self):
        G = generate_family("star", 3)
        assert len(G) == 4 and G.degree[0] == 3

    def test_erdos_renyi_seeded(self):
        a = generate_family("erdos_renyi", 9, p=0.4, seed=3)
        b = generate_family("erdos_renyi", 9, p=0.4, seed=3)
        np.testing.assert_array_equal(a.weight, b.weight)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(family="complete", size=0),
            dict(family="cycle", size=2),
            dict(family="erdos_renyi", size=5, p=1.5, seed=1),
            dict(family="erdos_renyi", size=5, p=0.5),
            dict(family="wheel", size=5),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(GraphError):
            generate_family(**kwargs)


class TestLaplacian:
    def test_constant(self):
        G = generate_family("cycle", 5)
        np.testing.assert_array_equal(laplacian_apply(G, np.full(5, 3.0)), 0.0)

    def test_path_middle(self):
        G = generate_family("path", 3)
        assert laplacian_apply(G, [0, 0, 1])[1] == 1.0

    def test_single_edge(self):
        np.testing.assert_array_equal(laplacian_apply(single_edge(), [0, 1]), [1, -1])

    def test_shape_mismatch(self):
        with pytest.raises(GraphError):
            laplacian_apply(single_edge(), [0, 1, 2])

    @settings(max_examples=40, deadline=None)
    @given(small_graphs())
    def test_matches_dense_matrix(self, G):
        rng = np.random.default_rng(len(G))
        f = rng.standard_normal(len(G))
        ref = dense_laplacian(G) @ f
        np.testing.assert_allclose(laplacian_apply(G, f), ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())

    @settings(max_examples=40, deadline=None)
    @given(small_graphs())
    def test_self_adjoint_and_mass(self, G):
        rng = np.random.default_rng(7)
        f, g = rng.standard_normal((2, len(G)))
        m = G.measure
        lhs = np.sum(m * g * laplacian_apply(G, f))
        rhs = np.sum(m * f * laplacian_apply(G, g))
        scale = np.sum(m * np.abs(g) * np.abs(f)) * G.degree.max() / m.min()
        assert abs(lhs - rhs) <= 1e-12 * scale
        mass = np.sum(m * laplacian_apply(G, f))
        assert abs(mass) <= 1e-12 * np.sum(np.abs(G.weight @ f)) + 1e-12 * np.sum(G.degree * np.abs(f))


class TestDegree:
    def test_complete(self):
        prof = degree_ratio(generate_family("complete", 5))
        np.testing.assert_array_equal(prof.values, 4.0)
        assert prof.maximum == 4.0

    def test_path(self):
        prof = degree_ratio(generate_family("path", 3))
        np.testing.assert_array_equal(prof.values, [1, 2, 1])
        assert prof.maximum == 2

    def test_isolated_flagged(self):
        G = WeightedGraph(["a", "b", "c"], [[0, 1, 0], [1, 0, 0], [0, 0, 0]], [1, 1, 1])
        assert degree_ratio(G).isolated == ("c",)


class TestDistances:
    def test_single_edge(self):
        D = combinatorial_distances(single_edge())
        assert D(0, 1) == 1 and D.diameter == 1

    def test_cycle(self):
        assert combinatorial_distances(generate_family("cycle", 6)).diameter == 3

    @pytest.mark.parametrize("d", range(1, 7))
    def test_hypercube_hamming(self, d):
        G = generate_family("hypercube", d)
        D = combinatorial_distances(G)
        ham = np.array([[bin(x ^ y).count("1") for y in range(2**d)] for x in range(2**d)])
        np.testing.assert_array_equal(D.entries, ham)
        assert D.diameter == d

    def test_weights_do_not_change_hops(self):
        G = graph_from_edges([("a", "b", 7.0), ("b", "c", 0.01)])
        assert combinatorial_distances(G)(0, 2) == 2

    def test_disconnected(self):
        G = graph_from_edges([("a", "b", 1.0), ("c", "d", 1.0)])
        with pytest.raises(DisconnectedGraphError) as err:
            combinatorial_distances(G)
        assert err.value.components == [["a", "b"], ["c", "d"]]

    @settings(max_examples=40, deadline=None)
    @given(small_graphs(max_size=9))
    def test_metric_axioms(self, G):
        D = combinatorial_distances(G).entries
        np.testing.assert_array_equal(D, hop_distances(G))
        np.testing.assert_array_equal(D, D.T)
        assert np.all(np.diag(D) == 0)
        assert np.all((D == 1) == (G.weight > 0))
        N = len(G)
        for k in range(N):
            assert np.all(D <= D[:, [k]] + D[[k], :])
