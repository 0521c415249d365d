import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopcond.core import FiniteAlgebra, LoopCondition, Relation, condition_of, parse_condition, verify_witness
from loopcond.errors import ArityError, LoopCondError
from loopcond.hom import (
    brute_force_hom,
    column_map,
    find_hom,
    find_loop,
    implies_by_hom,
    is_hom,
    make_clique,
)
from loopcond.terms import App, parse_term, positional, substitute


def test_clique_sizes():
    assert len(make_clique(3, 2)) == 6
    assert len(make_clique(2, 3)) == 6
    assert len(make_clique(4, 3)) == 60
    assert find_loop(make_clique(5, 2)) is None
    with pytest.raises(LoopCondError):
        make_clique(1, 2)


def test_clique_homs():
    # (a,a,b) is in K_k^m, so any map between cliques separates points
    for m in (2, 3):
        for k, l in itertools.product(range(2, 6), repeat=2):
            assert (find_hom(make_clique(k, m), make_clique(l, m)) is not None) == (k <= l)


def test_first_map_is_lexicographic_in_search_order():
    h = find_hom(make_clique(2, 2), make_clique(3, 2))
    assert h == (0, 1)
    assert is_hom(make_clique(2, 2), make_clique(3, 2), h)


def test_injective():
    C4 = Relation(4, 2, [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2), (3, 0), (0, 3)])
    K2 = make_clique(2, 2)
    assert find_hom(C4, K2) is not None
    assert find_hom(C4, K2, injective=True) is None
    assert find_hom(K2, C4, injective=True) is not None


def test_arity_mismatch():
    with pytest.raises(ArityError):
        find_hom(make_clique(2, 2), make_clique(2, 3))


def _relations(max_d, m):
    return st.integers(1, max_d).flatmap(lambda d: st.builds(
        lambda ts: Relation(d, m, ts),
        st.lists(st.tuples(*[st.integers(0, d - 1)] * m), min_size=1, max_size=8)))


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 3).flatmap(lambda m: st.tuples(_relations(4, m), _relations(3, m))), st.booleans())
def test_find_hom_matches_brute_force(pair, injective):
    src, dst = pair
    h = find_hom(src, dst, injective)
    oracle = brute_force_hom(src, dst, injective)
    assert (h is None) == (oracle is None)
    if h is not None:
        assert is_hom(src, dst, h)
        if injective:
            assert len(set(h)) == len(h)


def test_implies_examples():
    comm = parse_condition("f(x,y) = f(y,x)")
    six = parse_condition("f(x,y,z) = f(y,z,x)")
    assert implies_by_hom(comm, comm) is not None
    # a 2-cycle maps into a 3-cycle? no: K_2 has an edge both ways, the 3-cycle does not
    assert implies_by_hom(comm, parse_condition("f(x,y,z)=f(y,z,x)")) is None
    # the directed 3-cycle has no map into a single symmetric edge
    assert implies_by_hom(six, comm) is None
    assert implies_by_hom(six, six) == {"x": "x", "y": "y", "z": "z"}
    with pytest.raises(ArityError):
        implies_by_hom(comm, parse_condition(
            "o(x,y,y,y,x,x) = o(y,x,y,x,y,x) = o(y,y,x,x,x,y)"))


def test_olsak_implies_k33():
    olsak = parse_condition("o(x,y,y,y,x,x) = o(y,x,y,x,y,x) = o(y,y,x,x,x,y)")
    K33 = condition_of(make_clique(3, 3))
    vm = implies_by_hom(olsak, K33)
    assert vm is not None
    cmap = column_map(olsak, K33, vm)
    assert len(cmap) == 6 and all(0 <= j < K33.arity for j in cmap)
    assert implies_by_hom(K33, olsak) is None


def _transfer(L, L2, t):
    """Witness for L2 built from a witness t for L via the column map."""
    vm = implies_by_hom(L, L2)
    sigma = column_map(L, L2, vm)
    ys = positional(L2.arity)
    return substitute(t, {f"x{j + 1}": ys[s] for j, s in enumerate(sigma)})


XOR3 = FiniteAlgebra.from_function(2, {"xor3": (3, lambda a, b, c: a ^ b ^ c)})
MAJ = FiniteAlgebra.from_function(2, {"maj": (3, lambda a, b, c: int(a + b + c >= 2))})


def test_transfer_examples():
    L = parse_condition("f(x,x,y) = f(x,y,x) = f(y,x,x)")
    L2 = parse_condition("g(x,x,y,y) = g(x,y,x,y) = g(y,x,x,x)")
    assert implies_by_hom(L, L2) is not None
    t2 = _transfer(L, L2, parse_term("maj(x1,x2,x3)"))
    assert verify_witness(MAJ, L2, t2)


conditions = st.integers(2, 3).flatmap(lambda w: st.tuples(
    st.lists(st.lists(st.sampled_from("xyz"), min_size=w, max_size=w), min_size=1, max_size=5),
    st.lists(st.lists(st.sampled_from("uvw"), min_size=w, max_size=w), min_size=1, max_size=5)))


@settings(max_examples=100, deadline=None)
@given(conditions, st.sampled_from([XOR3, MAJ]))
def test_hom_transfer_is_sound(cols, A):
    cols1, cols2 = cols
    L = LoopCondition(tuple(zip(*cols1)))
    L2 = LoopCondition(tuple(zip(*cols2)))
    name = A.operations[0].name
    xs = positional(L.arity)
    for idx in itertools.product(range(L.arity), repeat=3):
        t = App(name, tuple(xs[i] for i in idx))
        if verify_witness(A, L, t) and implies_by_hom(L, L2) is not None:
            assert verify_witness(A, L2, _transfer(L, L2, t))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 3).flatmap(lambda m: st.tuples(_relations(3, m), _relations(3, m), _relations(3, m))))
def test_composite_of_homs_is_hom(triple):
    a, b, c = triple
    h1, h2 = find_hom(a, b), find_hom(b, c)
    if h1 is not None and h2 is not None:
        assert is_hom(a, c, tuple(h2[v] for v in h1))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 3), st.integers(2, 3).flatmap(lambda m: st.tuples(st.just(m), _relations(4, m))))
def test_non_injective_clique_map_forces_loop(k, mr):
    m, R = mr
    h = find_hom(make_clique(k, m), R)
    if h is not None and len(set(h)) < k:
        assert find_loop(R) is not None


def test_l24_implies_l25():
    L4, L5 = condition_of(make_clique(4, 2)), condition_of(make_clique(5, 2))
    assert implies_by_hom(L4, L5) is not None
    assert implies_by_hom(L5, L4) is None
    assert implies_by_hom(parse_condition("f(x,y)=f(y,x)"), condition_of(make_clique(3, 2))) is not None
