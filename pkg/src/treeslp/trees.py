"""Ranked labelled trees, patterns and the term notation.

A tree is stored as a preorder arena: node ids are preorder positions, the
root is node 0 and the subtree of ``v`` occupies ids ``v .. v + span - 1``.
Symbol labels are strings; a parameter ``x<i>`` is stored as the int ``i``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ArityError, NotAPatternError, ParseError

NIL = "_"  # reserved leaf symbol introduced by the fcns encoding

SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
PARAM_RE = re.compile(r"x([0-9]+)\Z")


def is_param(label) -> bool:
    return type(label) is int


@dataclass(frozen=True)
class Alphabet:
    symbols: dict

    @property
    def sigma(self) -> int:
        return len(self.symbols)

    @property
    def max_rank(self) -> int:
        return max(self.symbols.values(), default=0)


class Tree:
    """Immutable ordered tree; doubles as a pattern when it has parameter leaves."""

    __slots__ = ("labels", "children", "_ranks", "_spans", "_size")

    def __init__(self, labels, children, check=True):
        self.labels = labels
        self.children = children
        self._ranks = None
        self._spans = None
        self._size = None
        if check:
            self.ranks  # noqa: B018  (raises on conflicts)

    @classmethod
    def from_preorder(cls, labels, arities, check=True) -> Tree:
        """Build a tree from preorder labels and child counts."""
        stack = []
        children = [()] * len(labels)
        pop = stack.pop
        for v in range(len(labels) - 1, -1, -1):
            a = arities[v]
            if a:
                if len(stack) < a:
                    raise ValueError("preorder arities do not describe a tree")
                children[v] = tuple(pop() for _ in range(a))
            stack.append(v)
        if len(stack) != 1:
            raise ValueError("preorder arities do not describe a single tree")
        return cls(list(labels), children, check)

    @classmethod
    def leaf(cls, label) -> Tree:
        return cls([label], [()])

    @classmethod
    def build(cls, label, *subtrees: Tree) -> Tree:
        """Convenience constructor: ``Tree.build('f', t1, t2)``."""
        labels = [label]
        arities = [len(subtrees)]
        for s in subtrees:
            labels.extend(s.labels)
            arities.extend(len(c) for c in s.children)
        return cls.from_preorder(labels, arities)

    # -- basic measures -------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        """Number of non-parameter nodes."""
        if self._size is None:
            self._size = sum(1 for lab in self.labels if type(lab) is not int)
        return self._size

    @property
    def rank(self) -> int:
        return len(self.labels) - self.size

    @property
    def weight(self) -> int:
        return self.size + self.rank

    @property
    def ranks(self) -> dict:
        """Symbol -> rank, checked for consistency."""
        if self._ranks is None:
            ranks = {}
            for lab, kids in zip(self.labels, self.children):
                if type(lab) is int:
                    if kids:
                        raise NotAPatternError(f"parameter x{lab} has children")
                    continue
                r = ranks.setdefault(lab, len(kids))
                if r != len(kids):
                    raise ArityError(lab, r, len(kids))
            self._ranks = ranks
        return self._ranks

    def alphabet(self) -> Alphabet:
        return Alphabet(dict(self.ranks))

    @property
    def max_rank(self) -> int:
        return max(map(len, self.children))

    def arities(self) -> list:
        return [len(c) for c in self.children]

    def spans(self) -> list:
        """Number of arena nodes (parameters included) in each subtree."""
        if self._spans is None:
            spans = [1] * len(self.labels)
            children = self.children
            for v in range(len(spans) - 1, -1, -1):
                for c in children[v]:
                    spans[v] += spans[c]
            self._spans = spans
        return self._spans

    def depth(self) -> int:
        """Height in edges."""
        depth = [0] * len(self.labels)
        best = 0
        for v, kids in enumerate(self.children):
            d = depth[v] + 1
            for c in kids:
                depth[c] = d
            if kids and d > best:
                best = d
        return best

    def parents(self) -> list:
        parent = [-1] * len(self.labels)
        for v, kids in enumerate(self.children):
            for c in kids:
                parent[c] = v
        return parent

    def params(self) -> list:
        return [lab for lab in self.labels if type(lab) is int]

    def is_valid_pattern(self) -> bool:
        return self.params() == list(range(1, self.rank + 1))

    # -- structure ---------------------------------------------------------

    def subtree(self, v: int) -> Tree:
        """Copy of the subtree rooted at ``v`` (parameters left as they are)."""
        end = v + self.spans()[v]
        return Tree.from_preorder(self.labels[v:end], self.arities()[v:end], check=False)

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return self.labels == other.labels and self.children == other.children

    def __hash__(self):
        return hash((tuple(self.labels), tuple(map(len, self.children))))

    def __repr__(self):
        text = print_term(self) if len(self.labels) <= 60 else print_term(self)[:200] + "..."
        return f"Tree({text})"


# -- term notation -----------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([(),])|(\S))")


def _label_of(name, pos, text):
    m = PARAM_RE.match(name)
    if m:
        i = int(m.group(1))
        if i < 1:
            raise ParseError("parameters are numbered from x1", pos, text)
        return i
    return name


def _parse_ranks_header(line, offset, text):
    declared = {}
    for item in line.split():
        name, sep, rank = item.partition("/")
        if not sep or not SYMBOL_RE.match(name) or not rank.isdigit():
            raise ParseError(f"bad rank declaration {item!r}", offset, text)
        r = int(rank)
        if declared.setdefault(name, r) != r:
            raise ArityError(name, declared[name], r)
    return declared


def parse_term(text: str, ranked: bool = True) -> Tree:
    """Parse one term such as ``f(a,g(x1))``.

    An optional first line ``ranks: f/2 a/0`` declares ranks, which are then
    checked. With ``ranked=False`` child counts may vary per symbol.
    """
    declared = None
    start = 0
    stripped = text.lstrip()
    if stripped.startswith("ranks:"):
        head = len(text) - len(stripped)
        eol = text.find("\n", head)
        eol = len(text) if eol < 0 else eol
        declared = _parse_ranks_header(text[head + 6:eol], head, text)
        start = eol

    labels = []
    arities = []
    open_nodes = []  # indices of nodes whose child list is still open
    expect_term = True
    done = False
    pos = start
    n = len(text)
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break  # only whitespace left
        tok_pos = m.start(m.lastindex)
        pos = m.end()
        name, punct, bad = m.groups()
        if bad is not None:
            raise ParseError(f"unexpected character {bad!r}", tok_pos, text)
        if done:
            raise ParseError("trailing input after term", tok_pos, text)
        if expect_term:
            if name is None:
                raise ParseError(f"expected a symbol, got {punct!r}", tok_pos, text)
            labels.append(_label_of(name, tok_pos, text))
            arities.append(0)
            nxt = _TOKEN_RE.match(text, pos)
            if nxt is not None and nxt.group(2) == "(":
                if type(labels[-1]) is int:
                    raise ParseError("parameters cannot have children", tok_pos, text)
                pos = nxt.end()
                open_nodes.append(len(labels) - 1)
                continue
            expect_term = False
            if open_nodes:
                arities[open_nodes[-1]] += 1
            else:
                done = True
            continue
        if punct == ",":
            if not open_nodes:
                raise ParseError("comma outside of a child list", tok_pos, text)
            expect_term = True
        elif punct == ")":
            if not open_nodes:
                raise ParseError("unbalanced ')'", tok_pos, text)
            open_nodes.pop()
            if open_nodes:
                arities[open_nodes[-1]] += 1
            else:
                done = True
        else:
            raise ParseError(f"unexpected token {(name or punct)!r}", tok_pos, text)
    if not labels:
        raise ParseError("empty input", n, text)
    if open_nodes or expect_term:
        raise ParseError("unexpected end of input", n, text)

    tree = Tree.from_preorder(labels, arities, check=ranked)
    if declared is not None:
        for sym, r in tree.ranks.items() if ranked else _observed(tree).items():
            if sym not in declared:
                raise ParseError(f"symbol {sym!r} missing from the ranks header", 0, text)
            if declared[sym] != r:
                raise ArityError(sym, declared[sym], r)
    return tree


def _observed(tree):
    return {lab: len(k) for lab, k in zip(tree.labels, tree.children) if type(lab) is not int}


def label_text(label) -> str:
    return f"x{label}" if type(label) is int else str(label)


def print_term(t: Tree) -> str:
    out = []
    stack = []  # [remaining, emitted] per open node
    for lab, kids in zip(t.labels, t.children):
        if stack:
            top = stack[-1]
            if top[1]:
                out.append(",")
            top[1] += 1
        out.append(label_text(lab))
        if kids:
            out.append("(")
            stack.append([len(kids), 0])
            continue
        while stack:
            top = stack[-1]
            top[0] -= 1
            if top[0]:
                break
            stack.pop()
            out.append(")")
    return "".join(out)


# -- patterns ----------------------------------------------------------------

def make_valid(p: Tree) -> Tree:
    """Rename parameters to x1..xk in depth-first order."""
    seen = {}
    labels = []
    for lab in p.labels:
        if type(lab) is int:
            if lab in seen:
                raise NotAPatternError(f"parameter x{lab} occurs twice")
            seen[lab] = len(seen) + 1
            labels.append(seen[lab])
        else:
            labels.append(lab)
    return Tree(labels, p.children)


def subtree_sizes(t: Tree) -> list:
    """Per node, the number of non-parameter nodes in its subtree."""
    labels = t.labels
    sizes = [0 if type(lab) is int else 1 for lab in labels]
    children = t.children
    for v in range(len(sizes) - 1, -1, -1):
        for c in children[v]:
            sizes[v] += sizes[c]
    return sizes


def split_pattern(s: Tree, v: int):
    """Return ``(s[v], s\\v, k)``; ``k`` counts the parameters left of ``v``."""
    if v == 0:
        raise ValueError("cannot split a pattern at its root")
    if is_param(s.labels[v]):
        raise ValueError("split node must not be a parameter")
    end = v + s.spans()[v]
    arities = s.arities()
    inner = make_valid(Tree.from_preorder(s.labels[v:end], arities[v:end], check=False))
    k = sum(1 for lab in s.labels[:v] if type(lab) is int)
    labels = s.labels[:v] + [0] + s.labels[end:]   # 0 sorts as the fresh parameter
    outer_ar = arities[:v] + [0] + arities[end:]
    renum = []
    count = 0
    for lab in labels:
        if type(lab) is int:
            count += 1
            renum.append(count)
        else:
            renum.append(lab)
    outer = Tree.from_preorder(renum, outer_ar, check=False)
    return inner, outer, k


def fcns_encode(t: Tree) -> Tree:
    """First-child/next-sibling binarisation; empty slots become ``NIL``."""
    if NIL in _observed(t):
        raise ValueError(f"symbol {NIL!r} is reserved for the encoding")
    children = t.children
    next_sib = [-1] * len(t.labels)
    for kids in children:
        for a, b in zip(kids, kids[1:]):
            next_sib[a] = b
    labels = []
    arities = []
    stack = [0]
    while stack:
        v = stack.pop()
        if v < 0:
            labels.append(NIL)
            arities.append(0)
            continue
        labels.append(t.labels[v])
        arities.append(2)
        stack.append(next_sib[v])
        stack.append(children[v][0] if children[v] else -1)
    return Tree.from_preorder(labels, arities)


def fcns_decode(t: Tree) -> Tree:
    """Inverse of :func:`fcns_encode`."""
    labels = []
    arities = []
    # walk chains: a node's first child chain gives its children in order
    stack = [(0, None)]
    while stack:
        v, parent_slot = stack.pop()
        lab = t.labels[v]
        if lab == NIL:
            continue
        first, sib = t.children[v]
        labels.append(lab)
        arities.append(0)
        me = len(labels) - 1
        if parent_slot is not None:
            arities[parent_slot] += 1
        stack.append((sib, parent_slot))
        stack.append((first, me))
    return Tree.from_preorder(labels, arities, check=False)
