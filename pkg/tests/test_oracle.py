import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submax.fixtures import random_graph_cut, triangle_cut
from submax.oracle import brute_cardinality, brute_polytope_integral, brute_unconstrained
from submax.polytope import CardinalityPolytope, KnapsackPolytope
from submax.setfn import SetFunction, hardness_instance


def zero_function(n):
    return SetFunction(n, lambda m: 0.0)


def test_brute_unconstrained_examples():
    mask, value = brute_unconstrained(triangle_cut())
    assert value == 2.0
    mask, value = brute_unconstrained(zero_function(4))
    assert (mask, value) == (0, 0.0)  # ties go to the smallest bitmask
    f = hardness_instance(1, 2)
    mask, value = brute_unconstrained(f)
    assert value == 1.0 and mask == 0b0001


def test_brute_cardinality_examples():
    assert brute_cardinality(triangle_cut(), None, 1, "eq")[1] == 2.0
    mask, value = brute_cardinality(triangle_cut(), None, 0, "eq")
    assert (mask, value) == (0, 0.0)
    assert brute_cardinality(hardness_instance(1, 2), None, 2, "eq")[1] == 1.0


def test_brute_polytope_examples():
    tri = triangle_cut()
    P = KnapsackPolytope([1.0, 1.0, 3.0], 2.0)
    mask, value = brute_polytope_integral(tri, P)
    assert value == 2.0
    # a polytope admitting every subset reproduces the unconstrained optimum
    P_all = CardinalityPolytope(3, 3)
    assert brute_polytope_integral(tri, P_all) == brute_unconstrained(tri)
    # and the cardinality polytope matches the le-mode cardinality oracle
    P_k = CardinalityPolytope(3, 1)
    assert brute_polytope_integral(tri, P_k) == brute_cardinality(tri, None, 1, "le")


@settings(max_examples=25, deadline=None)
@given(n=st.integers(min_value=2, max_value=9), seed=st.integers(min_value=0, max_value=500))
def test_oracle_ordering_chain(n, seed):
    f = random_graph_cut(n, seed)
    k = max(1, n // 2)
    eq = brute_cardinality(f, n, k, "eq")[1]
    le = brute_cardinality(f, n, k, "le")[1]
    un = brute_unconstrained(f)[1]
    assert eq <= le + 1e-12 <= un + 1e-12


def test_oracle_rejects_oversized_ground_sets():
    f = SetFunction(23, lambda m: 0.0)
    with pytest.raises(ValueError):
        brute_unconstrained(f)
    with pytest.raises(ValueError):
        brute_cardinality(f, 23, 2, "eq")
    with pytest.raises(ValueError):
        brute_polytope_integral(f, CardinalityPolytope(23, 2))
    with pytest.raises(ValueError):
        brute_cardinality(triangle_cut(), None, 1, "exact")


def test_oracle_determinism():
    f = random_graph_cut(8, seed=9)
    assert brute_unconstrained(f) == brute_unconstrained(f)


def test_brute_cardinality_respects_mode():
    # value at |S| = 3 on the triangle is 0 (full set), le mode keeps the max
    tri = triangle_cut()
    assert brute_cardinality(tri, None, 3, "eq")[1] == 0.0
    assert brute_cardinality(tri, None, 3, "le")[1] == 2.0
