from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nested_drc import blocks as blk
from nested_drc.errors import ParameterError, ParseError, ValidationError

STAR3 = """blocks 2
block 0 size 1
block 1 size 3 parent 0 anchors all
"""

C4 = """# K_{2,2}
blocks 2
block 0 size 2
block 1 size 2 parent 0 anchors all
"""


def test_parse_star():
    b = blk.parse_block_spec(STAR3)
    assert b == blk.star(3)
    assert (b.s, b.r, b.m, b.h) == (1, 1, 1, 4)
    assert blk.realize(b).edge_count == 3


def test_parse_c4():
    b = blk.parse_block_spec(C4)
    assert (b.s, b.r) == (2, 2)
    g = blk.realize(b)
    assert g.edge_count == 4 and all(d == 2 for d in g.degrees)


def test_parent_size_monotonicity_violation():
    text = """blocks 3
block 0 size 3
block 1 size 3 parent 0 anchors all
block 2 size 2 parent 1 anchors 2 0 1
"""
    with pytest.raises(ValidationError):
        blk.parse_block_spec(text)


@pytest.mark.parametrize("text", [
    "blocks 2\nblock 0 size 1\n",
    "blocks 2\nblock 0 size 1\nblock 1 size 2 parent 0 anchors 1 0\nblock 1 size 2 parent 0 anchors all\n",
    "blocks 2\nblock 0 size 1\nblock 1 size x parent 0 anchors all\n",
    "blocks 2\nblock 0 size 1\nblock 1 size 2 parent 0 anchor all\n",
    "bloks 2\n",
])
def test_parse_errors(text):
    with pytest.raises((ParseError, ValidationError)):
        blk.parse_block_spec(text)


def test_validation_rules():
    with pytest.raises(ValidationError):
        blk.BlockRepresentation((2, 2), (-1, 0), ((), (0,)))
    with pytest.raises(ValidationError):
        blk.BlockRepresentation((1, 2, 2), (-1, 0, 0), ((), (0,), (0,)))
    with pytest.raises(ValidationError):
        blk.BlockRepresentation((1, 2, 2), (-1, 0, 1), ((), (0,), (0, 0)))
    with pytest.raises(ValidationError):
        blk.BlockRepresentation((1, 2, 2), (-1, 0, 1), ((), (0,), (5,)))


def test_rt_blowup_examples():
    assert blk.realize(blk.rt_blowup(1, 2, [])) == blk.realize(blk.star(2))
    chain = blk.rt_blowup(2, 2, [1])
    g = blk.realize(chain)
    assert g.n == 6 and g.edge_count == 8
    sides = chain.side_of()
    assert sorted([sides.count(0), sides.count(1)]) == [2, 4]
    with pytest.raises(ValidationError):
        blk.rt_blowup(2, 3, [0, 0])
    with pytest.raises(ParameterError):
        blk.rt_blowup(3, 2, [])


@st.composite
def blowups(draw):
    r = draw(st.integers(1, 3))
    t = draw(st.integers(r, 3))
    m = draw(st.integers(1, 4))
    gamma = [draw(st.integers(1, i - 1)) for i in range(2, m + 1)]
    anchors = [tuple(draw(st.permutations(range(t)))[:r]) for _ in gamma]
    return blk.rt_blowup(r, t, gamma, anchors)


@given(blowups())
def test_spec_round_trip(b):
    assert blk.parse_block_spec(blk.format_block_spec(b)) == b


@given(blowups())
def test_realized_graph_is_bipartite_with_expected_edges(b):
    g = blk.realize(b)
    sides = b.side_of()
    assert all(sides[u] != sides[v] for u, v in g.edges())
    assert g.edge_count == sum(b.sizes[i] * len(b.anchors[i]) for i in range(1, len(b.sizes)))


def test_constants_examples():
    k = blk.constants(blk.star(2), Fraction(1, 10**6))
    assert k.beta == Fraction(1, 32)
    assert float(k.c1) == pytest.approx((31 / 32) ** 2, rel=1e-15)
    assert float(k.c2) == pytest.approx(12 * 10**6)
    assert k.c3 == k.c1 / 2**9


def test_constants_reject_alpha_outside_range():
    with pytest.raises(ParameterError):
        blk.constants(blk.star(2), Fraction(1, 2))
    with pytest.raises(ParameterError):
        blk.constants(blk.star(2), 0)
