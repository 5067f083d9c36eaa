from fractions import Fraction
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from nested_drc import graph as gr
from nested_drc.errors import ParameterError
from nested_drc.goodness import (GoodnessParams, alpha_schedule, bad_mass_check, classify,
                                 compute_alpha, distinct_goodness_check,
                                 nested_goodness_check, structural_check, total_sequence_check)
from nested_drc.numeric import to_fraction, to_mpf


def test_alpha_closed_form_h1():
    a = compute_alpha(1, 1, Fraction(1, 8))
    assert a < mp.mpf(1) / 72
    assert abs(a * 72 - 1) < 1e-9


def test_alpha_h2_magnitude():
    a = compute_alpha(2, 1, Fraction(1, 16))
    assert 5.7e-11 < float(a) < 5.9e-11


@pytest.mark.parametrize("h", [1, 2, 3, 4, 6])
@pytest.mark.parametrize("beta", [Fraction(1, 8), Fraction(1, 32)])
def test_alpha_schedule_postcondition(h, beta):
    a = compute_alpha(h, 1, beta)
    sched = alpha_schedule(a, h, beta)
    assert all(x < y for x, y in zip(sched, sched[1:]))
    assert sched[-1] < to_mpf(beta)


def test_alpha_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        compute_alpha(2, 1, Fraction(3, 2))
    with pytest.raises(ParameterError):
        compute_alpha(2, 3, Fraction(1, 8))
    with pytest.raises(ParameterError):
        GoodnessParams.build(2, 1, alpha=-1)


def test_override_is_not_guaranteed():
    assert GoodnessParams.build(2, 1).guaranteed
    assert not GoodnessParams.build(2, 1, alpha=0.001).guaranteed


def test_k4_all_zero_good_and_good():
    tb = classify(gr.complete(4), GoodnessParams.build(3, 1))
    for i in range(4):
        for j in range(1, 4):
            assert tb.good[i][j].all()


def test_edgeless_every_sequence_good():
    tb = classify(gr.empty(5), GoodnessParams.build(2, 1))
    assert all(tb.good[i][j].all() for i in range(3) for j in range(1, 3))


def test_k4_override_alpha_one():
    tb = classify(gr.complete(4), GoodnessParams.build(2, 1, alpha=1))
    assert tb.neighborhood_size((0, 1)) == 2
    assert not tb.is_good(0, (0, 1))
    assert tb.is_good(0, (0,))


def _naive_zero_good(g, seq, params, t):
    size = g.common_mask(seq).bit_count()
    j = len(seq)
    return Fraction(size) ** params.r >= params.alpha**params.r * t**j * g.n**params.r


def _naive_classify(g, params):
    """Straight transcription of the definition, no shared work at all."""
    t = gr.star_density(g, params.r)
    n, h = g.n, params.h
    good = {0: {s: _naive_zero_good(g, s, params, t)
                for j in range(1, h + 1) for s in itertools.product(range(n), repeat=j)}}
    for i in range(1, h + 1):
        level = {}
        for s, ok in good[0].items():
            if ok:
                nb = gr.mask_to_list(g.common_mask(s))
                size = len(nb)
                for k in range(len(s), h + 1):
                    cnt = sum(good[i - 1][u] for u in itertools.product(nb, repeat=k))
                    if cnt < (1 - params.beta) * size**k:
                        ok = False
                        break
            level[s] = ok
        good[i] = level
    return good


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 5))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return gr.Graph.from_edges(n, edges)


@given(small_graphs(), st.integers(1, 2), st.sampled_from([None, 0.3, 0.6, 0.9]),
       st.sampled_from([Fraction(1, 4), Fraction(1, 2)]))
@settings(max_examples=60, deadline=None)
def test_classification_matches_definition(g, h, alpha, beta):
    params = GoodnessParams.build(h, 1, beta=beta, alpha=alpha)
    naive = _naive_classify(g, params)
    fast = classify(g, params)
    direct = classify(g, params, memoize=False)
    for i in range(h + 1):
        for j in range(1, h + 1):
            assert np.array_equal(fast.good[i][j], direct.good[i][j])
            for idx in range(g.n**j):
                s = fast.sequence(j, idx)
                assert bool(fast.good[i][j][idx]) == naive[i][s], (i, s)


@given(small_graphs(), st.sampled_from([0.2, 0.5, 0.8]))
@settings(max_examples=30, deadline=None)
def test_goodness_is_nested(g, alpha):
    tb = classify(g, GoodnessParams.build(3, 1, beta=Fraction(1, 3), alpha=alpha))
    assert structural_check(tb).ok
    for i in range(1, 4):
        for j in range(1, 4):
            assert not (tb.good[i][j] & ~tb.good[i - 1][j]).any()


def test_power_sum_matches_loop():
    g = gr.random_graph(6, 0.5, seed=3)
    tb = classify(g, GoodnessParams.build(2, 1, alpha=0.4, beta=Fraction(1, 4)))
    for j in (1, 2):
        want = sum(tb.neighborhood_size(s) ** 2
                   for s in itertools.product(range(6), repeat=j) if tb.is_good(2, s))
        assert tb.power_sum(2, j, 2) == want


@pytest.mark.parametrize("g, h, r", [
    (gr.complete(4), 2, 1),
    (gr.empty(4), 2, 1),
    (gr.random_graph(8, 0.5, seed=11), 2, 2),
    (gr.random_graph(8, 0.5, seed=11), 2, 1),
    (gr.complete(14), 2, 1),
])
def test_goodness_lemmas_examples(g, h, r):
    tb = classify(g, GoodnessParams.build(h, r))
    for rep in (nested_goodness_check(tb), bad_mass_check(tb), distinct_goodness_check(tb)):
        assert rep.ok, [c.to_dict() for c in rep.failures]
        assert rep.guaranteed


def test_k14_distinct_hypothesis_holds():
    tb = classify(gr.complete(14), GoodnessParams.build(2, 1))
    rep = distinct_goodness_check(tb)
    assert rep.counts()["SKIP"] == 0 and rep.counts()["PASS"] == 4


def test_total_sequence_examples():
    for n in (3, 6, 9):
        rep = total_sequence_check(gr.complete(n), 1, 1)
        c = rep.checks[0]
        assert c.passed and c.lhs == c.rhs
    k8 = total_sequence_check(gr.complete(8), 2, 1)
    assert [c.status for c in k8.checks] == ["PASS", "SKIP"]
    k12 = total_sequence_check(gr.complete(12), 2, 1)
    assert [c.status for c in k12.checks] == ["PASS", "PASS"]
    assert all(c.status == "SKIP" for c in total_sequence_check(gr.empty(4), 1, 1).checks[1:])


def test_export_is_deterministic_and_parseable():
    g = gr.random_graph(5, 0.5, seed=1)
    p = GoodnessParams.build(2, 1)
    a, b = classify(g, p).export(), classify(g, p).export()
    assert a == b
    first = a.splitlines()[0].split()
    assert len(first) == 5
    assert to_fraction(1) == 1
