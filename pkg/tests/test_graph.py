from fractions import Fraction
import math

import pytest
from hypothesis import given, settings, strategies as st

from nested_drc import graph as gr
from nested_drc.errors import InputError, ParseError, ResourceError, ValidationError


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return gr.Graph.from_edges(n, chosen)


def test_common_neighborhood_examples():
    k4 = gr.complete(4)
    assert gr.common_neighborhood(k4, (0, 1)) == {2, 3}
    assert gr.common_neighborhood(k4, (0, 0)) == {1, 2, 3}
    assert gr.common_neighborhood(gr.path(3), (0, 2)) == {1}


def test_common_neighborhood_rejects_bad_input():
    with pytest.raises(InputError):
        gr.common_neighborhood(gr.complete(3), ())
    with pytest.raises(InputError):
        gr.common_neighborhood(gr.complete(3), (0, 3))


def test_star_counts():
    assert gr.star_hom_count(gr.complete(3), 2) == 12
    assert gr.star_hom_count(gr.path(3), 2) == 6


@given(graphs(), st.integers(1, 4))
def test_star_count_is_degree_power_sum(g, r):
    assert gr.star_hom_count(g, 1) == 2 * g.edge_count
    assert gr.star_hom_count(g, r) == sum(d**r for d in g.degrees)


def test_r_norm_density_examples():
    p, t = gr.r_norm_density(gr.complete(3), 2)
    assert t == Fraction(12, 27) and p == pytest.approx(2 / 3)
    p1, t1 = gr.r_norm_density(gr.path(3), 1)
    assert t1 == Fraction(4, 9) and p1 == pytest.approx(4 / 9)
    p2, _ = gr.r_norm_density(gr.path(3), 2)
    assert p2 == pytest.approx(math.sqrt(2 / 9), rel=1e-12)
    for n in (2, 5, 9):
        for r in (1, 2, 3, 4):
            assert gr.r_norm_density(gr.complete(n), r)[0] == pytest.approx((n - 1) / n)


def test_density_of_empty_vertex_set_rejected():
    with pytest.raises(InputError):
        gr.star_density(gr.Graph(0, ()), 1)


@given(graphs(), st.integers(1, 3), st.integers(1, 3))
def test_r_norm_monotone(g, s, extra):
    r = s + extra
    ts, tr = gr.star_density(g, s), gr.star_density(g, r)
    assert tr**s >= ts**r


def test_power_mean_examples():
    assert gr.power_mean([2, 2, 2], 3) == pytest.approx(2)
    assert gr.power_mean([1, 2, 1], 1) == pytest.approx(4 / 3)
    assert gr.power_mean([1, 2, 1], 2) == pytest.approx(math.sqrt(2))


def test_tensor_product_examples():
    k2 = gr.complete(2)
    prod = gr.tensor_product(k2, k2)
    assert prod.n == 4 and prod.edge_count == 2
    assert gr.common_neighborhood(prod, (0,)) == {3}
    g = gr.cycle(5)
    assert gr.tensor_product(g, gr.complete(1)).edge_count == 0


@given(graphs(6), graphs(6))
@settings(max_examples=40)
def test_tensor_edge_count(g1, g2):
    prod = gr.tensor_product(g1, g2)
    assert prod.n == g1.n * g2.n
    assert prod.edge_count == 2 * g1.edge_count * g2.edge_count


def test_tensor_product_cap():
    with pytest.raises(ResourceError):
        gr.tensor_product(gr.complete(10), gr.complete(10), cap=50)


def test_generators():
    assert gr.complete(4).edge_count == 6
    c4 = gr.complete_bipartite(2, 2)
    assert c4.degrees == (2, 2, 2, 2) and c4.edge_count == 4
    assert gr.common_neighborhood(c4, (0, 1)) == {2, 3}
    assert gr.random_graph(10, 0.5, seed=7) == gr.random_graph(10, 0.5, seed=7)
    assert gr.random_graph(10, 0.5, seed=7) != gr.random_graph(10, 0.5, seed=8)
    assert gr.generate("path", "4").edge_count == 3


def test_graph_validation():
    with pytest.raises(ValidationError):
        gr.Graph(2, (0b01, 0b00))
    with pytest.raises(ValidationError):
        gr.Graph(2, (0b10, 0b00))


@given(graphs())
def test_edge_list_round_trip(g):
    assert gr.parse_graph(gr.format_graph(g)) == g


def test_edge_list_file_round_trip(tmp_path):
    g = gr.random_graph(9, 0.4, seed=2)
    path = tmp_path / "g.txt"
    gr.save_graph(g, path)
    assert gr.load_graph(path) == g


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("3\n", 1),
    ("3 1\n0 3\n", 2),
    ("3 1\n1 1\n", 2),
    ("3 1\n1 0\n", 2),
    ("3 2\n0 1\n0 1\n", 3),
    ("3 2\n0 1\n", None),
    ("3 1\n0 x\n", 2),
])
def test_edge_list_parse_errors(text, line):
    with pytest.raises(ParseError) as exc:
        gr.parse_graph(text)
    if line is not None:
        assert f"line {line}" in str(exc.value)


def test_edge_list_comments():
    g = gr.parse_graph("# triangle\n3 3\n0 1\n1 2 # edge\n0 2\n")
    assert g == gr.complete(3)
