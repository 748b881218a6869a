from __future__ import annotations

import pytest
from hypothesis import given

from conftest import distinct_subtrees, ranked_trees
from treeslp.corpus import gen_complete, gen_dag_hard, gen_random_binary
from treeslp.dag import build_dag, dag_as_tslp, dag_rules, unfold
from treeslp.grammar import val
from treeslp.trees import parse_term, print_term


def test_small_examples():
    d = build_dag([parse_term("b(b(a,a),b(a,a))")])
    assert d.node_count == 3
    assert {print_term(unfold_node(d, v)) for v in range(3)} == {"a", "b(a,a)", "b(b(a,a),b(a,a))"}
    assert build_dag([parse_term("a")]).node_count == 1
    forest = build_dag([parse_term("b(a,a)"), parse_term("b(a,a)")])
    assert forest.node_count == 2 and forest.roots[0] == forest.roots[1]


def unfold_node(d, v):
    from treeslp.dag import Dag
    return unfold(Dag(d.labels, d.children, [v]))


def test_first_occurrence_numbering():
    d = build_dag([parse_term("f(g(a),a,g(a))")])
    assert d.labels == ["f", "g", "a"]
    assert d.children == [(1, 2, 1), (2,), ()]


def test_unfold_examples():
    for text in ["b(a,a)", "b(b(a,a),b(a,a))", "a"]:
        t = parse_term(text)
        assert unfold(build_dag([t])) == t
    with pytest.raises(IndexError):
        unfold(build_dag([parse_term("a")]), 1)


def test_dag_as_tslp_examples():
    g = dag_as_tslp(build_dag([parse_term("b(b(a,a),b(a,a))")]))
    # S -> b(B,B), B -> b(A,A), A -> a; every rhs node counts, so 3 + 3 + 1
    assert g.size == 7 and len(g.rules) == 3
    assert print_term(val(g)) == "b(b(a,a),b(a,a))"
    g = dag_as_tslp(build_dag([parse_term("a")]))
    assert len(g.rules) == 1 and g.size == 1
    g = dag_as_tslp(build_dag([parse_term("f(a,b)")]))
    assert len(g.rules) == 3 and g.size == 5


def test_dag_as_tslp_refuses_forests_and_parameters():
    with pytest.raises(ValueError):
        dag_as_tslp(build_dag([parse_term("a"), parse_term("b")]))
    with pytest.raises(ValueError):
        dag_as_tslp(build_dag([parse_term("f(x1)")]))
    rules, names = dag_rules(build_dag([parse_term("a"), parse_term("b")]))
    assert len(rules) == 2 and len(names) == 2


def test_parameters_are_constants():
    d = build_dag([parse_term("f(x1,a)"), parse_term("g(x1)")])
    assert d.labels.count(1) == 1


@given(ranked_trees(max_nodes=200))
def test_matches_brute_force(t):
    d = build_dag([t])
    assert d.node_count == distinct_subtrees(t)
    assert unfold(d) == t


@given(ranked_trees(max_nodes=120))
def test_minimal_and_idempotent(t):
    d = build_dag([t])
    shapes = {print_term(unfold_node(d, v)) for v in range(d.node_count)}
    assert len(shapes) == d.node_count
    assert build_dag([unfold(d)]).node_count == len(d.reachable(d.roots[0]))


def test_deterministic():
    t = gen_random_binary(501, 3, seed=5)
    a, b = build_dag([t]), build_dag([t])
    assert a.labels == b.labels and a.children == b.children


def test_known_dag_sizes():
    assert build_dag([gen_complete(1023)]).node_count == 10
    assert build_dag([gen_dag_hard(1024)]).node_count >= 1024
