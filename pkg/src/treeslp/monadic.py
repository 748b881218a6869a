"""Conversion of rank-3 CNF TSLPs over binary terminals into monadic TSLPs.

A nonterminal of rank 2 or 3 is represented by a *skeleton*: its binary
branching nodes, with a chain of unary nonterminals on every edge, e.g.
``A0(f(A1(x1), A2(x2)))``.  Skeleton terms are nested tuples:

* ``("x", i)``        parameter
* ``("c", name)``     rank-0 nonterminal
* ``("u", name, t)``  unary nonterminal applied to ``t``
* ``("f", sym, l, r)`` binary terminal
"""
from __future__ import annotations

from .errors import UnsupportedShapeError
from .grammar import Tslp, cnf_index, name_supply
from .trees import Tree


def _has_param(t) -> bool:
    kind = t[0]
    if kind == "x":
        return True
    if kind == "c":
        return False
    if kind == "u":
        return _has_param(t[2])
    return _has_param(t[2]) or _has_param(t[3])


def _substitute(outer, i, inner, inner_rank):
    """Plug ``inner`` into parameter ``i`` of ``outer``, renumbering the rest."""
    kind = outer[0]
    if kind == "x":
        j = outer[1]
        if j < i:
            return outer
        if j == i:
            return _shift(inner, i - 1)
        return ("x", j + inner_rank - 1)
    if kind == "c":
        return outer
    if kind == "u":
        return ("u", outer[1], _substitute(outer[2], i, inner, inner_rank))
    return ("f", outer[1], _substitute(outer[2], i, inner, inner_rank),
            _substitute(outer[3], i, inner, inner_rank))


def _shift(t, by):
    if by == 0:
        return t
    kind = t[0]
    if kind == "x":
        return ("x", t[1] + by)
    if kind == "c":
        return t
    if kind == "u":
        return ("u", t[1], _shift(t[2], by))
    return ("f", t[1], _shift(t[2], by), _shift(t[3], by))


def _carve(t):
    """Follow ``t`` down to its first branching node or parameter.

    Returns the passed context items and that node.  Items are ``("u", U)``,
    ``("fl", f, closed)`` (path continues left) or ``("fr", f, closed)``.
    """
    items = []
    while True:
        kind = t[0]
        if kind == "x":
            return items, t
        if kind == "u":
            items.append(("u", t[1]))
            t = t[2]
            continue
        if kind != "f":
            raise ValueError("closed term on a parameter path")
        left, right = _has_param(t[2]), _has_param(t[3])
        if left and right:
            return items, t
        if left:
            items.append(("fl", t[1], t[3]))
            t = t[2]
        else:
            items.append(("fr", t[1], t[2]))
            t = t[3]


class _Builder:
    def __init__(self, g: Tslp):
        self.g = g
        terminals = g.terminals()
        self.fresh = name_supply("M", set(g.rules) | set(terminals))
        self.rules = {}
        self.closed = {}

    def rule(self, name, labels, arities):
        self.rules[name] = Tree.from_preorder(labels, arities, check=False)

    def closed_nt(self, t) -> str:
        """Rank-0 nonterminal deriving the closed skeleton term ``t``."""
        if t[0] == "c":
            return t[1]
        name = self.closed.get(t)
        if name is not None:
            return name
        name = next(self.fresh)
        if t[0] == "u":
            self.rule(name, [t[1], self.closed_nt(t[2])], [1, 0])
        else:
            self.rule(name, [t[1], self.closed_nt(t[2]), self.closed_nt(t[3])], [2, 0, 0])
        self.closed[t] = name
        return name

    def unary_of(self, item) -> str:
        if item[0] == "u":
            return item[1]
        name = next(self.fresh)
        self.context_rule(name, [item])
        return name

    def context_rule(self, name, items):
        """Rules for ``name(x) -> items applied to x`` in the primitive monadic forms."""
        if not items:
            self.rule(name, [1], [0])
            return
        if len(items) == 1:
            item = items[0]
            if item[0] == "u":
                self.rule(name, [item[1], 1], [1, 0])
            elif item[0] == "fl":
                self.rule(name, [item[1], 1, self.closed_nt(item[2])], [2, 0, 0])
            else:
                self.rule(name, [item[1], self.closed_nt(item[2]), 1], [2, 0, 0])
            return
        units = [self.unary_of(it) for it in items]
        current = name
        for u in units[:-2]:
            nxt = next(self.fresh)
            self.rule(current, [u, nxt, 1], [1, 1, 0])
            current = nxt
        self.rule(current, [units[-2], units[-1], 1], [1, 1, 0])

    def skeleton(self, t):
        """Carve a rank-2/3 term into edges, emit one rule per edge, return the skeleton."""
        def rec(t):
            items, rest = _carve(t)
            name = next(self.fresh)
            self.context_rule(name, items)
            if rest[0] == "x":
                return ("u", name, rest)
            left = rec(rest[2])
            right = rec(rest[3])
            return ("u", name, ("f", rest[1], left, right))
        return rec(t)


def to_monadic(g: Tslp) -> Tslp:
    """Equivalent TSLP whose nonterminals all have rank at most 1.

    Input: CNF, nonterminal ranks at most 3, terminals of rank 0 or 2.
    Nonterminals of rank 0 and 1 keep their names.
    """
    index = cnf_index(g)
    rules = g.rules
    for a, rhs in rules.items():
        if rhs.rank > 3:
            raise UnsupportedShapeError(f"nonterminal {a} has rank {rhs.rank} > 3")
    for f, r in g.terminals().items():
        if r not in (0, 2):
            raise UnsupportedShapeError(f"terminal {f!r} has rank {r}; only 0 and 2 are supported")

    b = _Builder(g)
    skel = {}
    rank = g.ranks
    for a in reversed(g.reachable_order()):
        rhs = rules[a]
        r = rank[a]
        if index[a] == 0:
            f = rhs.labels[0]
            if r == 0:
                b.rule(a, [f], [0])
                skel[a] = ("c", a)
            else:  # r == 2 by the checks above
                skel[a] = b.skeleton(("f", f, ("x", 1), ("x", 2)))
            continue
        outer = rhs.labels[0]
        i = index[a]
        inner = rhs.labels[rhs.children[0][i - 1]]
        t = _substitute(skel[outer], i, skel[inner], rank[inner])
        if r == 0:
            if t[0] == "u":
                b.rule(a, [t[1], b.closed_nt(t[2])], [1, 0])
            else:
                b.rule(a, [t[1], b.closed_nt(t[2]), b.closed_nt(t[3])], [2, 0, 0])
            skel[a] = ("c", a)
        elif r == 1:
            items, _ = _carve(t)
            b.context_rule(a, items)
            skel[a] = ("u", a, ("x", 1))
        else:
            skel[a] = b.skeleton(t)
    return Tslp(b.rules, g.start, check=False).trimmed()


def monadic_form(g: Tslp, a: str) -> str | None:
    """Name of the primitive form of the rule for ``a``, or None if it has none."""
    rules = g.rules
    rhs = rules[a]
    labels, children = rhs.labels, rhs.children

    def nt(v, r):
        lab = labels[v]
        return type(lab) is not int and lab in rules and rules[lab].rank == r

    root = labels[0]
    if rhs.rank == 0:
        if len(labels) == 1 and root not in rules:
            return "A -> a"
        if len(labels) == 2 and nt(0, 1) and nt(1, 0):
            return "A -> B(C)"
        if len(labels) == 3 and root not in rules and nt(1, 0) and nt(2, 0):
            return "A -> f(B,C)"
        return None
    if rhs.rank != 1:
        return None
    if len(labels) == 1:
        return "A(x) -> x"
    if len(labels) == 2 and nt(0, 1):
        return "A(x) -> B(x)"
    if len(labels) == 3 and nt(0, 1) and nt(1, 1) and children[1] == (2,):
        return "A(x) -> B(C(x))"
    if len(labels) == 3 and root not in rules and len(children[0]) == 2:
        if type(labels[1]) is int and nt(2, 0):
            return "A(x) -> f(x,B)"
        if type(labels[2]) is int and nt(1, 0):
            return "A(x) -> f(B,x)"
    return None
