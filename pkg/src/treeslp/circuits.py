"""Arithmetic formulas, circuits built from monadic TSLPs, and equivalence testing.

A formula is a Tree over ``add``/2, ``mul``/2, ``c0``, ``c1`` and ``y1, y2, ...``.
A rank-1 nonterminal ``A`` of a monadic TSLP denotes a polynomial of the form
``A0 + A1 * x * A2``; the converter keeps the three gates of that linear form
for each such nonterminal and one gate for each rank-0 nonterminal.
"""
from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .bisection import tree_bisection
from .bushrink import combined
from .errors import MissingVariableError, ParseError, UnsupportedShapeError
from .grammar import Tslp
from .monadic import monadic_form, to_monadic
from .semirings import MatrixModP, ModP, Semiring
from .trees import Tree

VAR_RE = re.compile(r"y([1-9][0-9]*)\Z")
OPS = {"add": "ADD", "mul": "MUL"}


def formula_vars(f: Tree) -> int:
    """Largest variable index in ``f`` (0 if none); raises on foreign symbols."""
    m = 0
    for lab, kids in zip(f.labels, f.children):
        if lab in OPS and len(kids) == 2:
            continue
        if not kids and lab in ("c0", "c1"):
            continue
        match = VAR_RE.match(lab) if not kids and isinstance(lab, str) else None
        if match is None:
            raise UnsupportedShapeError(
                f"{lab!r} with {len(kids)} children is not a formula symbol")
        m = max(m, int(match.group(1)))
    return m


@dataclass
class Circuit:
    """Gates in topological order: ``("VAR", i)``, ``("CONST0",)``, ``("CONST1",)``,
    ``("ADD", a, b)`` or ``("MUL", a, b)`` with ``a, b`` earlier gate ids."""

    gates: list
    output: int
    nvars: int = 0

    def __post_init__(self):
        for g, gate in enumerate(self.gates):
            op = gate[0]
            if op in ("ADD", "MUL"):
                if len(gate) != 3 or not (0 <= gate[1] < g and 0 <= gate[2] < g):
                    raise ValueError(f"gate g{g} has bad inputs")
            elif op == "VAR":
                if len(gate) != 2 or gate[1] < 1:
                    raise ValueError(f"gate g{g} has a bad variable index")
                self.nvars = max(self.nvars, gate[1])
            elif op not in ("CONST0", "CONST1") or len(gate) != 1:
                raise ValueError(f"gate g{g}: unknown gate {gate!r}")
        if not 0 <= self.output < len(self.gates):
            raise ValueError("output gate out of range")

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def depth(self) -> int:
        d = [0] * len(self.gates)
        for g, gate in enumerate(self.gates):
            if len(gate) == 3:
                d[g] = 1 + max(d[gate[1]], d[gate[2]])
        return d[self.output]


class _Gates:
    """Gate list with lazily shared constants and 0/1 identity folding."""

    def __init__(self):
        self.gates = []
        self.zero = self.one = None

    def _new(self, gate):
        self.gates.append(gate)
        return len(self.gates) - 1

    def const(self, bit):
        if bit:
            if self.one is None:
                self.one = self._new(("CONST1",))
            return self.one
        if self.zero is None:
            self.zero = self._new(("CONST0",))
        return self.zero

    def var(self, i):
        return self._new(("VAR", i))

    def add(self, a, b):
        if a == self.zero:
            return b
        if b == self.zero:
            return a
        return self._new(("ADD", a, b))

    def mul(self, a, b):
        if a == self.zero or b == self.zero:
            return self.const(0)
        if a == self.one:
            return b
        if b == self.one:
            return a
        return self._new(("MUL", a, b))

    def leaf(self, symbol):
        if symbol == "c0":
            return self.const(0)
        if symbol == "c1":
            return self.const(1)
        match = VAR_RE.match(symbol) if isinstance(symbol, str) else None
        if match is None:
            raise UnsupportedShapeError(f"{symbol!r} is not a formula leaf")
        return self.var(int(match.group(1)))


def _prune(gates, output):
    live = [False] * len(gates)
    live[output] = True
    for g in range(output, -1, -1):
        if live[g] and len(gates[g]) == 3:
            live[gates[g][1]] = live[gates[g][2]] = True
    remap = {}
    out = []
    for g, gate in enumerate(gates):
        if live[g]:
            remap[g] = len(out)
            out.append(gate if len(gate) < 3 else (gate[0], remap[gate[1]], remap[gate[2]]))
    return out, remap


def linear_forms(g: Tslp):
    """Gate list plus, per nonterminal, a gate id (rank 0) or a linear form (rank 1)."""
    b = _Gates()
    forms = {}
    rules = g.rules
    for a in reversed(g.reachable_order()):
        kind = monadic_form(g, a)
        rhs = rules[a]
        labels = rhs.labels
        if kind is None:
            raise UnsupportedShapeError(f"rule for {a} is not in a monadic rule form")
        if kind == "A -> a":
            forms[a] = b.leaf(labels[0])
        elif kind == "A -> B(C)":
            b0, b1, b2 = forms[labels[0]]
            forms[a] = b.add(b0, b.mul(b.mul(b1, forms[labels[1]]), b2))
        elif kind == "A -> f(B,C)":
            op = _op(labels[0], a)
            left, right = forms[labels[1]], forms[labels[2]]
            forms[a] = b.add(left, right) if op == "ADD" else b.mul(left, right)
        elif kind == "A(x) -> x":
            forms[a] = (b.const(0), b.const(1), b.const(1))
        elif kind == "A(x) -> B(x)":
            forms[a] = forms[labels[0]]
        elif kind == "A(x) -> B(C(x))":
            b0, b1, b2 = forms[labels[0]]
            c0, c1, c2 = forms[labels[1]]
            forms[a] = (b.add(b0, b.mul(b.mul(b1, c0), b2)), b.mul(b1, c1), b.mul(c2, b2))
        else:
            op = _op(labels[0], a)
            other = forms[labels[2] if kind == "A(x) -> f(x,B)" else labels[1]]
            one = b.const(1)
            if op == "ADD":
                forms[a] = (other, one, one)
            elif kind == "A(x) -> f(x,B)":
                forms[a] = (b.const(0), one, other)
            else:
                forms[a] = (b.const(0), other, one)
    return b.gates, forms


def _op(symbol, a):
    op = OPS.get(symbol)
    if op is None:
        raise UnsupportedShapeError(f"rule for {a} uses {symbol!r}, not add or mul")
    return op


def tslp_to_circuit(g: Tslp) -> Circuit:
    """Circuit computing the formula derived by the monadic TSLP ``g``."""
    if g.rules[g.start].rank:
        raise UnsupportedShapeError("start nonterminal must have rank 0")
    gates, forms = linear_forms(g)
    gates, remap = _prune(gates, forms[g.start])
    return Circuit(gates, remap[forms[g.start]])


def formula_to_circuit(f: Tree, algo: str = "combined") -> Circuit:
    """Logarithmic-depth circuit equivalent to ``f`` over every semiring."""
    m = formula_vars(f)
    if algo == "combined":
        g = combined(f)
    elif algo == "treebisection":
        g = tree_bisection(f)
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    c = tslp_to_circuit(to_monadic(g))
    c.nvars = max(c.nvars, m)
    return c


# -- evaluation ------------------------------------------------------------------------

def _lookup(assignment):
    if isinstance(assignment, Mapping):
        get = assignment.get
    else:
        seq = list(assignment)

        def get(i, default=None):
            return seq[i - 1] if 1 <= i <= len(seq) else default
    missing = object()

    def value(i):
        v = get(i, missing)
        if v is missing:
            raise MissingVariableError(i)
        return v
    return value


def evaluate(c: Circuit, s: Semiring, assignment) -> object:
    """Value of the output gate; ``assignment`` maps i to the value of y_i."""
    value = _lookup(assignment)
    vals = [None] * len(c.gates)
    add, mul = s.add, s.mul
    for g, gate in enumerate(c.gates):
        op = gate[0]
        if op == "ADD":
            vals[g] = add(vals[gate[1]], vals[gate[2]])
        elif op == "MUL":
            vals[g] = mul(vals[gate[1]], vals[gate[2]])
        elif op == "VAR":
            vals[g] = value(gate[1])
        else:
            vals[g] = s.one if op == "CONST1" else s.zero
    return vals[c.output]


def evaluate_formula(f: Tree, s: Semiring, assignment) -> object:
    """Value of the formula tree ``f`` under ``assignment``."""
    value = _lookup(assignment)
    labels, children = f.labels, f.children
    vals = [None] * len(labels)
    for v in range(len(labels) - 1, -1, -1):
        kids = children[v]
        lab = labels[v]
        if kids:
            a, b = kids
            vals[v] = s.add(vals[a], vals[b]) if lab == "add" else s.mul(vals[a], vals[b])
            vals[a] = vals[b] = None
        elif lab == "c0":
            vals[v] = s.zero
        elif lab == "c1":
            vals[v] = s.one
        else:
            vals[v] = value(int(lab[1:]))
    return vals[0]


@dataclass
class Verdict:
    """Outcome of a randomized equivalence test."""

    equivalent: bool
    trials: int
    semiring: str | None = None
    trial: int | None = None
    assignment: dict | None = None
    formula_value: object = None
    circuit_value: object = None

    def __str__(self):
        if self.equivalent:
            return "EQUIVALENT-WITH-HIGH-PROBABILITY"
        return f"COUNTEREXAMPLE over {self.semiring} at trial {self.trial}"


def probe_semirings() -> list:
    return [ModP(), MatrixModP()]


def check_equivalence(f: Tree, c: Circuit, trials: int = 32, seed: int = 0) -> Verdict:
    """Compare ``f`` and ``c`` on random assignments over the probe semirings.

    Each trial draws from its own stream seeded by ``(seed, trial)``; a reported
    counterexample is re-checked with a plain, unbatched evaluation.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    m = max(formula_vars(f), c.nvars)
    for pid, s in enumerate(probe_semirings()):
        draws = [s.sample(np.random.default_rng([seed, trial, pid]), m) for trial in range(trials)]
        batched = {i + 1: s.batch([d[i] for d in draws]) for i in range(m)}
        fv = evaluate_formula(f, s, batched)
        cv = evaluate(c, s, batched)
        for trial in range(trials):
            if s.eq(s.unbatch(fv, trial), s.unbatch(cv, trial)):
                continue
            point = {i + 1: v for i, v in enumerate(draws[trial])}
            fx, cx = evaluate_formula(f, s, point), evaluate(c, s, point)
            if not s.eq(fx, cx):
                return Verdict(False, trials, s.name, trial, point, fx, cx)
    return Verdict(True, trials)


# -- text format -------------------------------------------------------------------------

def format_circuit(c: Circuit) -> str:
    lines = [f"circuit v1 vars {c.nvars}"]
    for g, gate in enumerate(c.gates):
        op = gate[0]
        if op == "VAR":
            lines.append(f"g{g} = VAR {gate[1]}")
        elif len(gate) == 3:
            lines.append(f"g{g} = {op} g{gate[1]} g{gate[2]}")
        else:
            lines.append(f"g{g} = {op}")
    lines.append(f"output g{c.output}")
    return "\n".join(lines) + "\n"


_GATE_RE = re.compile(r"g(\d+)\s*=\s*(VAR\s+([1-9]\d*)|CONST0|CONST1|(ADD|MUL)\s+g(\d+)\s+g(\d+))\s*\Z")


def parse_circuit(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty circuit")
    head = re.fullmatch(r"circuit v1 vars (\d+)", lines[0])
    if head is None:
        raise ParseError(f"bad header {lines[0]!r}")
    gates = []
    output = None
    for ln in lines[1:]:
        if output is not None:
            raise ParseError(f"text after the output line: {ln!r}")
        out = re.fullmatch(r"output g(\d+)", ln)
        if out:
            output = int(out.group(1))
            continue
        mt = _GATE_RE.match(ln)
        if mt is None:
            raise ParseError(f"bad gate line {ln!r}")
        if int(mt.group(1)) != len(gates):
            raise ParseError(f"gate ids must be consecutive: expected g{len(gates)} in {ln!r}")
        if mt.group(3):
            gates.append(("VAR", int(mt.group(3))))
        elif mt.group(4):
            gates.append((mt.group(4), int(mt.group(5)), int(mt.group(6))))
        else:
            gates.append((mt.group(2),))
    if output is None:
        raise ParseError("missing output line")
    try:
        c = Circuit(gates, output)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    declared = int(head.group(1))
    if c.nvars > declared:
        raise ParseError(f"VAR {c.nvars} exceeds the declared {declared} variables")
    c.nvars = declared
    return c
