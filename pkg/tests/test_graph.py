"""Tests for graph instances, generators and the exact Max-Cut oracle."""

import itertools

import pytest

from orbitqaoa.graph import (
    MODELS,
    Graph,
    bits_to_index,
    brute_force_maxcut,
    cut_value,
    gen_path,
    gen_sk,
    generate,
    index_to_bits,
)
from orbitqaoa.utils import InvalidArgumentError, SizeLimitError


def naive_maxcut(g: Graph) -> float:
    return max(cut_value(g, bits) for bits in itertools.product((0, 1), repeat=g.n))


class TestGraph:
    def test_edges_are_canonical(self):
        g = Graph(3, ((2, 0, 1.0), (1, 0, 1.0)))
        assert g.edges == ((0, 1, 1.0), (0, 2, 1.0))
        assert g == Graph(3, ((0, 1, 1.0), (0, 2, 1.0)))

    def test_two_tuple_edges_default_to_unit_weight(self):
        g = Graph(2, ((0, 1),))
        assert g.edges == ((0, 1, 1.0),)
        assert g.is_unit_weight

    @pytest.mark.parametrize(
        "edges",
        [((0, 0, 1.0),), ((0, 1, 1.0), (1, 0, 1.0)), ((0, 3, 1.0),)],
        ids=["self-loop", "duplicate", "out-of-range"],
    )
    def test_rejects_malformed_edges(self, edges):
        with pytest.raises(InvalidArgumentError):
            Graph(3, edges)

    def test_rejects_single_node(self):
        with pytest.raises(InvalidArgumentError):
            Graph(1, ())

    def test_text_form(self, path5, tmp_path):
        text = path5.to_text()
        assert text.splitlines()[0] == "5 4"
        path = tmp_path / "p5.graph"
        path5.save(path)
        assert Graph.load(path) == path5

    def test_text_header_must_match_edge_count(self):
        with pytest.raises(InvalidArgumentError):
            Graph.from_text("3 2\n0 1 1.0\n")

    def test_disconnected_graph_fails_validation(self):
        g = Graph(4, ((0, 1, 1.0), (2, 3, 1.0)))
        assert not g.is_connected()
        with pytest.raises(InvalidArgumentError):
            g.validate_connected()


class TestBits:
    def test_bit_order_is_little_endian(self):
        assert index_to_bits(1, 3) == "100"
        assert bits_to_index("001") == 4
        assert all(bits_to_index(index_to_bits(i, 4)) == i for i in range(16))

    def test_cut_value(self, path5):
        assert cut_value(path5, "01010") == 4.0
        assert cut_value(path5, [0, 0, 0, 0, 0]) == 0.0
        with pytest.raises(InvalidArgumentError):
            cut_value(path5, "0101")


class TestBruteForce:
    def test_path(self, path5):
        result = brute_force_maxcut(path5)
        assert result.max_value == 4.0
        assert result.optimal_assignments == frozenset({"01010", "10101"})

    def test_triangle(self, triangle):
        result = brute_force_maxcut(triangle)
        assert result.max_value == 2.0
        assert len(result.optimal_assignments) == 6

    def test_star(self, star3):
        assert brute_force_maxcut(star3).max_value == 3.0

    def test_complete_graph(self):
        assert brute_force_maxcut(gen_sk(6)).max_value == 9.0

    @pytest.mark.parametrize("model", sorted(MODELS))
    def test_matches_naive_enumeration(self, model):
        for seed in range(3):
            g = generate(model, 7, seed=seed)
            assert brute_force_maxcut(g).max_value == naive_maxcut(g)

    def test_every_optimal_assignment_attains_the_max(self, pl6):
        result = brute_force_maxcut(pl6)
        assert all(cut_value(pl6, z) == result.max_value for z in result.optimal_assignments)

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            brute_force_maxcut(gen_path(8), max_nodes=6)


class TestGenerators:
    def test_path_and_complete_sizes(self):
        assert gen_path(5).m == 4
        assert gen_sk(6).m == 15

    def test_sk_signed_weights(self):
        g = gen_sk(6, seed=3, weights="pm1")
        assert set(g.weights.tolist()) <= {-1.0, 1.0}
        assert g == gen_sk(6, seed=3, weights="pm1")

    @pytest.mark.parametrize("model", sorted(MODELS))
    def test_seeded_and_connected(self, model):
        a = generate(model, 9, seed=11)
        b = generate(model, 9, seed=11)
        assert a == b
        assert a.n == 9
        assert a.is_connected()

    def test_power_law_is_a_tree(self, pl6):
        assert pl6.m == 5

    def test_model_parameters(self):
        sparse = generate("ra", 10, seed=1, r=0.2)
        dense = generate("ra", 10, seed=1, r=0.9)
        assert sparse.m < dense.m

    def test_unknown_model(self):
        with pytest.raises(InvalidArgumentError):
            generate("lattice", 5)

    def test_unknown_parameter(self):
        with pytest.raises(InvalidArgumentError):
            generate("pl", 5, prob=0.3)

    def test_parameter_range_checked(self):
        with pytest.raises(InvalidArgumentError):
            generate("er", 5, prob=1.5)

    def test_extra_models(self):
        def ring(n, seed, **params):
            return Graph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))

        g = generate("ring", 5, extra_models={"ring": ring})
        assert g.m == 5
