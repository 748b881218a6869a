from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import pinned
from treeslp.bisection import tree_bisection
from treeslp.bushrink import combined
from treeslp.circuits import (Circuit, check_equivalence, evaluate, evaluate_formula,
                              format_circuit, formula_to_circuit, formula_vars, linear_forms,
                              parse_circuit, tslp_to_circuit)
from treeslp.corpus import catalan, gen_random_formula, unrank_binary
from treeslp.errors import MissingVariableError, ParseError, UnsupportedShapeError
from treeslp.grammar import expansion_sizes, grammar_depth, parse_tslp, tslp_depth, val
from treeslp.monadic import to_monadic
from treeslp.semirings import Integers, MatrixModP, ModP, Semiring, check_laws
from treeslp.trees import Tree, parse_term

SAMPLE = "circuit v1 vars 2\ng0 = VAR 1\ng1 = VAR 2\ng2 = ADD g0 g1\ng3 = MUL g2 g0\noutput g3\n"


class FreeWords(Semiring):
    """Noncommutative polynomials: dict from letter tuples to counts."""

    name = "free words"
    zero = {}
    one = {(): 1}

    def add(self, a, b):
        out = dict(a)
        for w, k in b.items():
            out[w] = out.get(w, 0) + k
        return out

    def mul(self, a, b):
        out = {}
        for (u, j), (v, k) in itertools.product(a.items(), b.items()):
            out[u + v] = out.get(u + v, 0) + j * k
        return out

    def eq(self, a, b):
        return a == b


FW = FreeWords()


def expand(t: Tree, v: int = 0) -> dict:
    """Direct polynomial of a formula subtree, with x1 as the letter 'x'."""
    lab = t.labels[v]
    kids = t.children[v]
    if type(lab) is int:
        return {("x",): 1}
    if kids:
        a, b = (expand(t, c) for c in kids)
        return FW.add(a, b) if lab == "add" else FW.mul(a, b)
    if lab == "c0":
        return {}
    if lab == "c1":
        return {(): 1}
    return {(lab,): 1}


WORDS = {i: {(f"y{i}",): 1} for i in range(1, 65)}


def gate_value(gates, g, memo=None):
    """Free-word value of gate ``g``, touching only the gates below it."""
    memo = {} if memo is None else memo
    stack = [g]
    while stack:
        h = stack[-1]
        if h in memo:
            stack.pop()
            continue
        gate = gates[h]
        if len(gate) == 3:
            todo = [c for c in gate[1:] if c not in memo]
            if todo:
                stack.extend(todo)
                continue
            op = FW.add if gate[0] == "ADD" else FW.mul
            memo[h] = op(memo[gate[1]], memo[gate[2]])
        elif gate[0] == "VAR":
            memo[h] = WORDS[gate[1]]
        else:
            memo[h] = FW.one if gate[0] == "CONST1" else FW.zero
        stack.pop()
    return memo[g]


def test_sample_formula():
    f = parse_term("mul(add(y1,y2),y1)")
    c = formula_to_circuit(f)
    assert evaluate(c, Integers(), {1: 2, 2: 3}) == 10
    assert evaluate_formula(f, Integers(), [2, 3]) == 10


def test_single_variable():
    c = formula_to_circuit(parse_term("y1"))
    assert c.gates == [("VAR", 1)] and c.size == 1 and c.depth == 0


def test_constants():
    s = Integers()
    assert evaluate(Circuit([("CONST1",)], 0), s, {}) == 1
    assert evaluate(formula_to_circuit(parse_term("mul(c0,y1)")), s, {1: 5}) == 0
    assert evaluate(formula_to_circuit(parse_term("add(c1,c1)")), s, {}) == 2


def test_matrix_evaluation_matches_direct():
    f = parse_term("mul(add(y1,y2),y1)")
    y1 = np.array([[1, 2], [3, 4]], dtype=object)
    y2 = np.array([[0, 1], [5, 0]], dtype=object)
    expected = (y1 + y2) @ y1
    for algo in ("combined", "treebisection"):
        got = evaluate(formula_to_circuit(f, algo), MatrixModP(10 ** 9 + 7), {1: y1, 2: y2})
        assert (got == expected).all()


def test_linear_forms_of_primitive_rules():
    g = parse_tslp("tslp v1\nstart S\nS -> A(C)\nA(x1) -> add(B,x1)\nB -> y1\nC -> y2\n"
                   "D(x1) -> mul(x1,B)\nE(x1) -> A(D(x1))\n")
    gates, forms = linear_forms(g)
    a0, a1, a2 = (gate_value(gates, i) for i in forms["A"])
    assert a0 == {("y1",): 1} and a1 == a2 == {(): 1}
    g = parse_tslp("tslp v1\nstart S\nS -> E(C)\nA(x1) -> add(B,x1)\nB -> y1\nC -> y2\n"
                   "D(x1) -> mul(x1,B)\nE(x1) -> A(D(x1))\n")
    gates, forms = linear_forms(g)
    d0, d1, d2 = (gate_value(gates, i) for i in forms["D"])
    assert d0 == {} and d1 == {(): 1} and d2 == {("y1",): 1}
    e0, e1, e2 = (gate_value(gates, i) for i in forms["E"])
    # E0 = A0 + A1 D0 A2, E1 = A1 D1, E2 = D2 A2
    assert (e0, e1, e2) == ({("y1",): 1}, {(): 1}, {("y1",): 1})
    assert gate_value(gates, forms["S"]) == {("y1",): 1, ("y2", "y1"): 1}


def test_gate_value_agrees_with_evaluate():
    c = formula_to_circuit(parse_term("mul(add(y1,c1),mul(y2,y1))"))
    assert gate_value(c.gates, c.output) == evaluate(c, FW, WORDS)


def test_identity_and_copy_forms():
    g = parse_tslp("tslp v1\nstart S\nS -> B(C)\nA(x1) -> x1\nB(x1) -> A(x1)\nC -> y3\n")
    gates, forms = linear_forms(g)
    assert forms["B"] == forms["A"]
    assert [gate_value(gates, i) for i in forms["A"]] == [{}, {(): 1}, {(): 1}]


def test_unsupported_rule_is_named():
    g = parse_tslp("tslp v1\nstart S\nS -> add(y1,y2)\n")
    with pytest.raises(UnsupportedShapeError, match="S"):
        tslp_to_circuit(g)
    g = parse_tslp("tslp v1\nstart S\nS -> f(B,B)\nB -> y1\n")
    with pytest.raises(UnsupportedShapeError, match="'f'"):
        tslp_to_circuit(g)


def _small_formulas():
    # every shape with at most 11 nodes, each with two labellings
    leaves = ["y1", "y2", "c1", "y3", "c0"]
    for m in range(6):
        for i in range(catalan(m)):
            arities = [2 if lab == "c" else 0 for lab in unrank_binary(m, i)]
            for shift in (0, 1):
                labels, li, ii = [], shift, shift
                for a in arities:
                    if a:
                        labels.append("add" if ii % 2 == 0 else "mul")
                        ii += 1
                    else:
                        labels.append(leaves[li % len(leaves)])
                        li += 1
                yield Tree.from_preorder(labels, arities)


def _check_forms(m):
    gates, forms = linear_forms(m)
    sizes = expansion_sizes(m)
    x = {("x",): 1}
    memo = {}
    checked = 0
    for a, form in forms.items():
        if sizes[a] + m.rules[a].rank > 12:
            continue
        t = val(m, a)
        if isinstance(form, tuple):
            f0, f1, f2 = (gate_value(gates, i, memo) for i in form)
            got = FW.add(f0, FW.mul(FW.mul(f1, x), f2))
        else:
            got = gate_value(gates, form, memo)
        assert got == expand(t), a
        checked += 1
    return checked


def test_linear_form_oracle_on_small_formulas():
    checked = 0
    for f in _small_formulas():
        for algo in (tree_bisection, combined):
            checked += _check_forms(to_monadic(algo(f)))
    assert checked > 500


@given(st.integers(1, 200), st.integers(1, 6), st.integers(0, 2 ** 32))
def test_linear_form_oracle_random(n, m, seed):
    f = gen_random_formula(2 * n + 1, m, seed)
    _check_forms(to_monadic(tree_bisection(f)))


@given(st.integers(0, 400), st.integers(1, 64), st.integers(0, 2 ** 32),
       st.sampled_from(["combined", "treebisection"]))
def test_soundness_property(n, m, seed, algo):
    f = gen_random_formula(2 * n + 1, m, seed)
    c = formula_to_circuit(f, algo)
    assert check_equivalence(f, c, trials=4, seed=seed).equivalent
    mod = ModP()
    point = {i: (seed * i) % mod.p for i in range(1, m + 1)}
    assert evaluate(c, mod, point) == evaluate_formula(f, mod, point)


def test_left_comb_depth_and_value():
    n = 2 ** 15
    labels = ["add"] * (n - 1) + ["y1"] * n
    arities = [2] * (n - 1) + [0] * n
    # preorder of a left comb: all adds first, then the leaves
    f = Tree.from_preorder(labels, arities)
    c = formula_to_circuit(f)
    assert c.depth <= pinned()["circuit"]["depth_per_log2n"] * 15
    assert evaluate(c, Integers(), {1: 1}) == n


def test_size_and_depth_against_grammar():
    p = pinned()["circuit"]
    for s in range(12):
        f = gen_random_formula([255, 2047, 8191][s % 3], [1, 8, 64][s % 3], seed=s)
        for algo in (tree_bisection, combined):
            g = algo(f)
            c = tslp_to_circuit(to_monadic(g))
            assert c.size <= p["size_per_tslp_size"] * g.size
            assert c.depth <= p["depth_per_tslp_depth"] * max(1, tslp_depth(g))


@given(st.integers(0, 600), st.integers(1, 16), st.integers(0, 2 ** 32),
       st.sampled_from([tree_bisection, combined]))
def test_per_rule_gate_budget(n, m, seed, algo):
    # each rule adds at most five gates and three levels on top of its callees
    g = to_monadic(algo(gen_random_formula(2 * n + 1, m, seed)))
    c = tslp_to_circuit(g)
    assert c.size <= 5 * len(g.rules) + 2
    assert c.depth <= 3 * grammar_depth(g)


def test_noncommutative_counterexample():
    f = parse_term("mul(y1,y2)")
    c = formula_to_circuit(parse_term("mul(y2,y1)"))
    v = check_equivalence(f, c, trials=8, seed=1)
    assert not v.equivalent and v.semiring.startswith("M2")
    s = MatrixModP()
    assert not s.eq(evaluate_formula(f, s, v.assignment), evaluate(c, s, v.assignment))
    assert str(v).startswith("COUNTEREXAMPLE")
    # the hand-picked witness
    e12 = np.array([[0, 1], [0, 0]], dtype=object)
    e21 = np.array([[0, 0], [1, 0]], dtype=object)
    assert not s.eq(s.mul(e12, e21), s.mul(e21, e12))


def test_addition_commutes():
    v = check_equivalence(parse_term("add(y1,y2)"), formula_to_circuit(parse_term("add(y2,y1)")))
    assert v.equivalent and str(v) == "EQUIVALENT-WITH-HIGH-PROBABILITY"


def test_scalar_mismatch_found_over_zp():
    v = check_equivalence(parse_term("add(y1,y1)"), formula_to_circuit(parse_term("y1")), trials=2)
    assert not v.equivalent and v.semiring.startswith("Z_")


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        check_equivalence(parse_term("y1"), formula_to_circuit(parse_term("y1")), trials=0)


def test_missing_variable():
    c = formula_to_circuit(parse_term("add(y1,y2)"))
    with pytest.raises(MissingVariableError, match="y2"):
        evaluate(c, Integers(), {1: 1})


def test_foreign_symbols_rejected():
    with pytest.raises(UnsupportedShapeError):
        formula_vars(parse_term("sub(y1,y2)"))
    assert formula_vars(parse_term("add(y3,c1)")) == 3


@pytest.mark.parametrize("s", [Integers(), ModP(), MatrixModP(), ModP(101), MatrixModP(7)],
                         ids=repr)
def test_semiring_laws(s):
    elements = s.sample(np.random.default_rng(3), 5) + [s.zero, s.one]
    assert check_laws(s, elements) == []


def test_matrices_do_not_commute():
    s = MatrixModP()
    s.commutative = True
    elements = s.sample(np.random.default_rng(0), 4)
    assert check_laws(s, elements) == ["multiplicative commutativity"]


def test_text_format():
    c = parse_circuit(SAMPLE)
    assert c.nvars == 2 and c.size == 4 and c.depth == 2
    assert evaluate(c, Integers(), {1: 2, 2: 3}) == 10
    assert format_circuit(c) == SAMPLE


@given(st.integers(0, 200), st.integers(1, 9), st.integers(0, 2 ** 32))
def test_text_roundtrip(n, m, seed):
    c = formula_to_circuit(gen_random_formula(2 * n + 1, m, seed))
    d = parse_circuit(format_circuit(c))
    assert d.gates == c.gates and d.output == c.output and d.nvars == c.nvars


@pytest.mark.parametrize("text", [
    "",
    "circuit v2 vars 1\ng0 = VAR 1\noutput g0\n",
    "circuit v1 vars 1\ng1 = VAR 1\noutput g1\n",
    "circuit v1 vars 1\ng0 = VAR 1\n",
    "circuit v1 vars 1\ng0 = VAR 1\ng1 = ADD g0 g1\noutput g1\n",
    "circuit v1 vars 1\ng0 = VAR 2\noutput g0\n",
    "circuit v1 vars 1\ng0 = SUB g0 g0\noutput g0\n",
    "circuit v1 vars 1\ng0 = VAR 1\noutput g3\n",
    "circuit v1 vars 1\ng0 = VAR 1\noutput g0\ng1 = CONST1\n",
])
def test_text_errors(text):
    with pytest.raises(ParseError):
        parse_circuit(text)


def test_circuit_validation():
    with pytest.raises(ValueError):
        Circuit([("ADD", 0, 0)], 0)
    with pytest.raises(ValueError):
        Circuit([("NOT",)], 0)
    assert Circuit([("CONST0",)], 0).depth == 0
