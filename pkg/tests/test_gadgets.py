import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopcond.core import Relation
from loopcond.errors import BudgetExceeded, LoopCondError
from loopcond.gadgets import build_q2_gadget, build_q_gadget, phi_eval
from loopcond.hom import find_hom, find_loop, is_hom, make_clique

from oracles import phi_naive, q2_member, q_member


def embed(k, d, extra):
    """K_k^2 on {0..k-1} plus the symmetric edges in ``extra``, over d elements."""
    ts = [t for t in itertools.product(range(k), repeat=2) if t[0] != t[1]]
    for a, b in extra:
        ts += [(a, b), (b, a)]
    return Relation(d, 2, ts)


K4_IN_6 = embed(4, 6, [(4, 5), (0, 4), (1, 5)])
K5_IN_6 = embed(5, 6, [(0, 5), (1, 5)])


def test_phi_examples():
    K3 = make_clique(3, 2)
    assert phi_eval(K3, (0, 1, 2))
    assert not phi_eval(K3, (0, 0, 1))
    assert phi_eval(K3, (2,))
    assert phi_eval(make_clique(2, 3), (0, 1))


@settings(max_examples=100)
@given(st.integers(2, 4).flatmap(lambda d: st.tuples(
    st.lists(st.tuples(st.integers(0, d - 1), st.integers(0, d - 1)), max_size=12),
    st.lists(st.integers(0, d - 1), min_size=1, max_size=4))))
def test_phi_matches_naive_and_forces_distinct(case):
    ts, z = case
    R = Relation(4, 2, ts)
    assert phi_eval(R, z) == phi_naive(R.tuple_set, 2, z)
    if find_loop(R) is None and phi_eval(R, z):
        assert len(set(z)) == len(z)


def test_q_gadget_on_k5_frozen():
    # the loop-carrying case: K_5 itself, k = 4
    R = make_clique(5, 2)
    Q = build_q_gadget(R, 4)
    assert (len(Q.relation), Q.candidates, len(Q.loops())) == (400, 625, 20)
    c = (0, 1, 2, 3)
    S = [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0]), (c[0], c[2])]
    assert phi_eval(Q.relation, [Q.encode(a, b) for a, b in S])
    for e in Q.loops():
        a, b = Q.decode(e)
        assert phi_eval(R, Q.witnesses[(e, e)] + (a, b))


@pytest.mark.parametrize("k, R", [(4, K4_IN_6), (5, K5_IN_6)])
def test_q_gadget_forward(k, R):
    assert find_loop(R) is None
    assert find_hom(make_clique(k, 2), R) is not None
    assert find_hom(make_clique(k + 1, 2), R) is None
    Q = build_q_gadget(R, k)
    h = find_hom(make_clique(k + 1, 2), Q.relation)
    assert h is not None and is_hom(make_clique(k + 1, 2), Q.relation, h)
    # no K_{k+1} in R means no loop in Q
    assert Q.loops() == []
    assert Q.to_json()["encoding"] == "a*d+b"


def test_q_gadget_matches_oracle_binary():
    R = embed(4, 5, [(0, 4), (1, 4)])
    Q = build_q_gadget(R, 4)
    pairs = list(itertools.product(range(5), repeat=2))
    oracle = {tuple(a * 5 + b for a, b in c) for c in itertools.product(pairs, repeat=2)
              if q_member(R.tuple_set, 5, 2, 4, c)}
    assert set(Q.relation.tuples) == oracle
    assert len(oracle) == 144


def test_q_gadget_matches_oracle_ternary():
    R = Relation(4, 3, [t for t in make_clique(4, 3).tuples if t != (0, 1, 2)])
    Q = build_q_gadget(R, 4)
    pairs = list(itertools.product(range(4), repeat=2))
    oracle = {tuple(a * 4 + b for a, b in c) for c in itertools.product(pairs, repeat=3)
              if q_member(R.tuple_set, 4, 3, 4, c)}
    assert set(Q.relation.tuples) == oracle


def test_loop_pullback_k6():
    R = make_clique(6, 2)
    Q = build_q_gadget(R, 5)
    assert (len(Q.relation), len(Q.loops())) == (900, 30)
    for e in Q.loops():
        a, b = Q.decode(e)
        assert phi_eval(R, Q.witnesses[(e, e)] + (a, b))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=4, max_size=20))
def test_loop_pullback_random(ts):
    R = Relation(5, 2, ts)
    Q = build_q_gadget(R, 4)
    for e in Q.loops():
        a, b = Q.decode(e)
        assert phi_eval(R, Q.witnesses[(e, e)] + (a, b))
    for t, xs in list(Q.witnesses.items())[:20]:
        assert q_member(R.tuple_set, 5, 2, 4, [Q.decode(e) for e in t])


def test_q2_gadget():
    Q = build_q2_gadget(make_clique(5, 2), 4)
    assert find_hom(make_clique(5, 2), Q.relation) is not None
    Q4 = build_q2_gadget(make_clique(4, 2), 4)
    assert len(Q4.relation) == 120 and Q4.loops() == []
    h = find_hom(make_clique(4, 2), Q4.relation)
    assert h is not None
    assert len(build_q2_gadget(Relation(3, 2, []), 4).relation) == 0


def test_q2_gadget_matches_oracle():
    R = embed(4, 5, [(0, 4), (1, 4)])
    Q = build_q2_gadget(R, 4)
    pairs = list(itertools.product(range(5), repeat=2))
    oracle = {tuple(a * 5 + b for a, b in c) for c in itertools.product(pairs, repeat=2)
              if q2_member(R.tuple_set, 5, 4, c)}
    assert set(Q.relation.tuples) == oracle


def test_preconditions_and_budget():
    with pytest.raises(LoopCondError, match="k >= max"):
        build_q_gadget(make_clique(4, 2), 3)
    with pytest.raises(LoopCondError, match="k >= max"):
        build_q_gadget(make_clique(4, 4), 4)
    with pytest.raises(LoopCondError):
        build_q2_gadget(make_clique(4, 3), 4)
    with pytest.raises(BudgetExceeded):
        build_q_gadget(make_clique(6, 2), 5, work_budget=1000)
