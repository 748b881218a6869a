"""Tree straight-line programs: model, metrics, expansion and text format."""
from __future__ import annotations

import re
from collections import deque
from itertools import count

from .dag import hash_cons
from .errors import ExpansionLimitError, GrammarError, NotCnfError, ParseError
from .trees import SYMBOL_RE, Tree, is_param, label_text, parse_term, print_term

DEFAULT_EXPANSION_LIMIT = 2 ** 30


def name_supply(prefix, avoid=()):
    """Yield ``prefix0, prefix1, ...`` skipping anything in ``avoid``."""
    avoid = set(avoid)
    for i in count():
        name = f"{prefix}{i}"
        if name not in avoid:
            yield name


def pattern(label, rank: int) -> Tree:
    """The pattern ``label(x1, ..., x_rank)``."""
    return Tree([label, *range(1, rank + 1)], [tuple(range(1, rank + 1))] + [()] * rank,
                check=False)


def compose(outer, index: int, inner, inner_rank: int, outer_rank: int) -> Tree:
    """``outer(x1..x_{i-1}, inner(x_i..), ..)`` for two symbols; a CNF type-(1) rhs."""
    i = index
    labels = [outer, *range(1, i), inner, *range(i, i + inner_rank),
              *range(i + inner_rank, outer_rank + inner_rank)]
    arities = [outer_rank] + [0] * (i - 1) + [inner_rank] + [0] * (outer_rank - i + inner_rank)
    return Tree.from_preorder(labels, arities, check=False)


class Tslp:
    """Rules ``A(x1..xn) -> rhs`` and a rank-0 start symbol.

    A label is a nonterminal exactly when it has a rule; every other string
    label is a terminal.
    """

    __slots__ = ("rules", "start", "_order")

    def __init__(self, rules: dict, start: str, check: bool = True):
        self.rules = rules
        self.start = start
        self._order = None
        if check:
            self.validate()

    # -- invariants ------------------------------------------------------

    def validate(self):
        rules = self.rules
        if self.start not in rules:
            raise GrammarError(f"start symbol {self.start!r} has no rule")
        if rules[self.start].rank:
            raise GrammarError("start symbol must have rank 0")
        terminal_rank = {}
        for a, rhs in rules.items():
            if not rhs.is_valid_pattern():
                raise GrammarError(f"rhs of {a} is not a valid pattern over x1..x{rhs.rank}")
            for lab, kids in zip(rhs.labels, rhs.children):
                if type(lab) is int:
                    if kids:
                        raise GrammarError(f"parameter with children in the rule of {a}")
                    continue
                sub = rules.get(lab)
                if sub is not None:
                    if sub.rank != len(kids):
                        raise GrammarError(
                            f"{lab} has rank {sub.rank} but gets {len(kids)} arguments in {a}")
                elif terminal_rank.setdefault(lab, len(kids)) != len(kids):
                    raise GrammarError(f"terminal {lab!r} used with two ranks")
        self.topological_order()

    def topological_order(self) -> list:
        """All nonterminals, every user before what it uses; raises on cycles."""
        if self._order is None:
            rules = self.rules
            users = {a: 0 for a in rules}
            deps = {a: self.deps(a) for a in rules}
            for ds in deps.values():
                for b in ds:
                    users[b] += 1
            queue = deque(a for a in rules if users[a] == 0)
            order = []
            while queue:
                a = queue.popleft()
                order.append(a)
                for b in deps[a]:
                    users[b] -= 1
                    if users[b] == 0:
                        queue.append(b)
            if len(order) != len(rules):
                cyclic = sorted(a for a in rules if users[a] > 0)
                raise GrammarError(f"rules are cyclic (involving {', '.join(cyclic[:5])})")
            self._order = order
        return self._order

    # -- accessors -----------------------------------------------------------

    def deps(self, a) -> list:
        """Distinct nonterminals in the rhs of ``a``, in depth-first order."""
        rules = self.rules
        seen = []
        for lab in rules[a].labels:
            if type(lab) is not int and lab in rules and lab not in seen:
                seen.append(lab)
        return seen

    @property
    def ranks(self) -> dict:
        return {a: rhs.rank for a, rhs in self.rules.items()}

    @property
    def size(self) -> int:
        return sum(rhs.size for rhs in self.rules.values())

    @property
    def max_rank(self) -> int:
        return max(rhs.rank for rhs in self.rules.values())

    def terminals(self) -> dict:
        out = {}
        rules = self.rules
        for rhs in rules.values():
            for lab, kids in zip(rhs.labels, rhs.children):
                if type(lab) is not int and lab not in rules:
                    out[lab] = len(kids)
        return out

    def reachable_order(self) -> list:
        """Nonterminals reachable from the start, users first, start first."""
        post = []
        seen = {self.start}
        stack = [(self.start, iter(self.deps(self.start)))]
        while stack:
            a, it = stack[-1]
            for b in it:
                if b not in seen:
                    seen.add(b)
                    stack.append((b, iter(self.deps(b))))
                    break
            else:
                stack.pop()
                post.append(a)
        return post[::-1]

    def trimmed(self) -> Tslp:
        keep = self.reachable_order()
        return Tslp({a: self.rules[a] for a in keep}, self.start, check=False)

    def renamed(self, mapping: dict) -> Tslp:
        """Rename nonterminals; labels missing from ``mapping`` stay."""
        def rn(t):
            return Tree([mapping.get(lab, lab) if type(lab) is not int else lab
                         for lab in t.labels], t.children, check=False)
        return Tslp({mapping[a]: rn(rhs) for a, rhs in self.rules.items()},
                    mapping[self.start], check=False)

    def __repr__(self):
        return f"Tslp(rules={len(self.rules)}, size={self.size}, start={self.start!r})"


# -- metrics -----------------------------------------------------------------

def tslp_size(g: Tslp) -> int:
    return g.size


def expansion_sizes(g: Tslp) -> dict:
    """|val(A)| for every nonterminal (parameters not counted)."""
    sizes = {}
    rules = g.rules
    for a in reversed(g.topological_order()):
        total = 0
        for lab in rules[a].labels:
            if type(lab) is int:
                continue
            total += sizes.get(lab, 1)
        sizes[a] = total
    return sizes


def grammar_depth(g: Tslp) -> int:
    """Derivation depth: 0 for rules without nonterminals, else 1 + deepest callee.

    The terminal leaf below a terminal rule is not counted, so in CNF this is
    the depth of the modified derivation tree.
    """
    depth = {}
    rules = g.rules
    for a in reversed(g.topological_order()):
        best = -1
        for lab in rules[a].labels:
            d = depth.get(lab) if type(lab) is not int else None
            if d is not None and d > best:
                best = d
        depth[a] = best + 1
    return depth[g.start]


def cnf_index(g: Tslp) -> dict:
    """index(A) for every rule; raises :class:`NotCnfError` if ``g`` is not in CNF."""
    rules = g.rules
    index = {}
    for a, rhs in rules.items():
        labels, children = rhs.labels, rhs.children
        root = labels[0]
        if type(root) is int:
            raise NotCnfError(f"rhs of {a} is a bare parameter")
        kids = children[0]
        if root not in rules:
            if any(type(labels[c]) is not int for c in kids):
                raise NotCnfError(f"terminal rule of {a} has a non-parameter child")
            index[a] = 0
            continue
        inner = [i for i, c in enumerate(kids) if type(labels[c]) is not int]
        if len(inner) != 1:
            raise NotCnfError(f"rule of {a} is not of the form B(.., C(..), ..)")
        c = kids[inner[0]]
        if labels[c] not in rules or any(type(labels[cc]) is not int for cc in children[c]):
            raise NotCnfError(f"rule of {a} is not of the form B(.., C(..), ..)")
        index[a] = inner[0] + 1
    return index


def is_cnf(g: Tslp) -> bool:
    try:
        cnf_index(g)
    except NotCnfError:
        return False
    return True


def tslp_depth(g: Tslp) -> int:
    """Depth of a CNF TSLP, counted as in :func:`grammar_depth`."""
    cnf_index(g)
    return grammar_depth(g)


# -- expansion -----------------------------------------------------------------

def val(g: Tslp, nt: str | None = None, limit: int = DEFAULT_EXPANSION_LIMIT) -> Tree:
    """Expand ``nt`` (default: the start symbol) into its pattern."""
    nt = g.start if nt is None else nt
    rules = g.rules
    if nt not in rules:
        raise KeyError(nt)
    total = expansion_sizes(g)[nt] + rules[nt].rank
    if total > limit:
        raise ExpansionLimitError(f"expansion of {nt} has {total} nodes, limit is {limit}")
    flat = {a: (rhs.labels, rhs.children) for a, rhs in rules.items()}
    out_labels = []
    out_arities = []
    lab_append = out_labels.append
    ar_append = out_arities.append
    labels, children = flat[nt]
    stack = [(labels, children, 0, None)]
    push = stack.append
    pop = stack.pop
    while stack:
        labels, children, v, env = pop()
        lab = labels[v]
        if type(lab) is int:
            if env is None:
                lab_append(lab)
                ar_append(0)
            else:
                push(env[lab - 1])
            continue
        kids = children[v]
        sub = flat.get(lab)
        if sub is None:
            lab_append(lab)
            ar_append(len(kids))
            for c in reversed(kids):
                push((labels, children, c, env))
        else:
            new_env = tuple([(labels, children, c, env) for c in kids]) if kids else ()
            push((sub[0], sub[1], 0, new_env))
    return Tree.from_preorder(out_labels, out_arities, check=False)


# -- derivation trees ------------------------------------------------------------

def derivation_tree(g: Tslp, limit: int = DEFAULT_EXPANSION_LIMIT) -> Tree:
    """Explicit derivation tree of a CNF TSLP.

    Inner nodes carry nonterminals (type-(1) nodes have the outer callee first),
    each terminal rule node has its terminal as single leaf child.  Its height
    in edges is ``tslp_depth(g) + 1``.
    """
    index = cnf_index(g)
    if 2 * expansion_sizes(g)[g.start] > limit:
        raise ExpansionLimitError("derivation tree too large")
    rules = g.rules
    labels = []
    arities = []
    stack = [g.start]
    while stack:
        item = stack.pop()
        labels.append(item)
        if item not in rules:  # terminal leaf
            arities.append(0)
            continue
        rhs = rules[item]
        if index[item] == 0:
            arities.append(1)
            stack.append(rhs.labels[0])
        else:
            arities.append(2)
            inner = rhs.labels[rhs.children[0][index[item] - 1]]
            stack.append(inner)
            stack.append(rhs.labels[0])
    return Tree.from_preorder(labels, arities, check=False)


class ModifiedDerivationTree:
    """Full binary tree: inner nodes carry an index, leaves a terminal.

    Node 0 is the root and children always have larger ids than their parent.
    ``left`` is the outer part of a split and ``right`` the inner part.
    """

    __slots__ = ("labels", "left", "right", "terminal_ranks")

    def __init__(self, labels, left, right, terminal_ranks):
        self.labels = labels
        self.left = left
        self.right = right
        self.terminal_ranks = terminal_ranks

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    def leaf_sizes(self) -> list:
        sizes = [1] * len(self.labels)
        left, right = self.left, self.right
        for v in range(len(sizes) - 1, -1, -1):
            if left[v] >= 0:
                sizes[v] = sizes[left[v]] + sizes[right[v]]
        return sizes

    def is_balanced(self, beta: float) -> bool:
        """Every edge between inner nodes has a ``beta``-balanced endpoint."""
        sizes = self.leaf_sizes()
        left, right = self.left, self.right

        def balanced(v):
            a, b = sizes[left[v]], sizes[right[v]]
            return a >= beta * b and b >= beta * a

        for v in range(len(sizes)):
            if left[v] < 0:
                continue
            ok = balanced(v)
            for c in (left[v], right[v]):
                if left[c] >= 0 and not ok and not balanced(c):
                    return False
        return True

    def depth(self) -> int:
        depth = [0] * len(self.labels)
        for v in range(len(depth)):
            if self.left[v] >= 0:
                depth[self.left[v]] = depth[self.right[v]] = depth[v] + 1
        return max(depth)

    def to_tree(self) -> Tree:
        labels = []
        arities = []
        stack = [0]
        while stack:
            v = stack.pop()
            if self.left[v] < 0:
                labels.append(self.labels[v])
                arities.append(0)
            else:
                labels.append(str(self.labels[v]))
                arities.append(2)
                stack.append(self.right[v])
                stack.append(self.left[v])
        return Tree.from_preorder(labels, arities, check=False)


def modified_derivation_tree(g: Tslp) -> ModifiedDerivationTree:
    index = cnf_index(g)
    rules = g.rules
    labels, left, right = [], [], []
    ranks = {}
    queue = deque([(g.start, -1, 0)])
    while queue:
        a, parent, side = queue.popleft()
        v = len(labels)
        if parent >= 0:
            (left if side == 0 else right)[parent] = v
        rhs = rules[a]
        left.append(-1)
        right.append(-1)
        if index[a] == 0:
            f = rhs.labels[0]
            labels.append(f)
            ranks[f] = rhs.rank
        else:
            labels.append(index[a])
            queue.append((rhs.labels[0], v, 0))
            queue.append((rhs.labels[rhs.children[0][index[a] - 1]], v, 1))
    return ModifiedDerivationTree(labels, left, right, ranks)


def compress_via_dag(mdt: ModifiedDerivationTree, prefix: str = "N", avoid=()) -> Tslp:
    """CNF TSLP whose nonterminals are the nodes of the minimal dag of ``mdt``."""
    n = mdt.num_nodes
    left, right = mdt.left, mdt.right
    children = [() if left[v] < 0 else (left[v], right[v]) for v in range(n)]
    dag_labels, dag_children = [], []
    ids = hash_cons(mdt.labels, children, {}, dag_labels, dag_children)
    del children

    fresh = name_supply(prefix, set(avoid) | set(mdt.terminal_ranks))
    names = [next(fresh) for _ in dag_labels]
    ranks = [0] * len(dag_labels)
    rules = {}
    # ids are handed out bottom-up, so callees come first
    for i, (lab, kids) in enumerate(zip(dag_labels, dag_children)):
        if not kids:
            r = mdt.terminal_ranks[lab]
            ranks[i] = r
            rules[names[i]] = pattern(lab, r)
            continue
        u, w = kids
        if not 1 <= lab <= ranks[u]:
            raise GrammarError(f"index {lab} does not fit a rank-{ranks[u]} callee")
        ranks[i] = ranks[u] + ranks[w] - 1
        rules[names[i]] = compose(names[u], lab, names[w], ranks[w], ranks[u])
    start = names[ids[0]]
    if ranks[ids[0]] != 0:
        raise GrammarError("root of the derivation tree has nonzero rank")
    return Tslp(rules, start, check=False)


# -- text format ----------------------------------------------------------------

_LHS_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*\Z")


def _nt_prefix(terminals) -> str:
    prefix = "N"
    while True:
        pat = re.compile(re.escape(prefix) + r"[0-9]+\Z")
        if not any(pat.match(t) for t in terminals):
            return prefix
        prefix += "N"


def canonical(g: Tslp) -> Tslp:
    """Reachable rules renamed ``N0, N1, ...`` in topological order, start first."""
    order = g.reachable_order()
    prefix = _nt_prefix(g.terminals())
    mapping = {a: f"{prefix}{i}" for i, a in enumerate(order)}
    g = Tslp({a: g.rules[a] for a in order}, g.start, check=False)
    return g.renamed(mapping)


def format_tslp(g: Tslp) -> str:
    g = canonical(g)
    lines = ["tslp v1", f"start {g.start}"]
    for a, rhs in g.rules.items():
        lhs = a if rhs.rank == 0 else f"{a}({','.join(f'x{i}' for i in range(1, rhs.rank + 1))})"
        lines.append(f"{lhs} -> {print_term(rhs)}")
    return "\n".join(lines) + "\n"


def parse_tslp(text: str) -> Tslp:
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines or lines[0][1] != "tslp v1":
        raise ParseError("missing 'tslp v1' header")
    if len(lines) < 2 or not lines[1][1].startswith("start "):
        raise ParseError("missing 'start <name>' line")
    start = lines[1][1][6:].strip()
    if not SYMBOL_RE.match(start):
        raise ParseError(f"bad start symbol {start!r} on line {lines[1][0]}")
    rules = {}
    for lineno, ln in lines[2:]:
        lhs, sep, rhs_text = ln.partition("->")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'lhs -> rhs'")
        m = _LHS_RE.match(lhs)
        if not m:
            raise ParseError(f"line {lineno}: bad left-hand side {lhs.strip()!r}")
        name, params = m.group(1), m.group(2)
        rank = 0
        if params is not None:
            got = [p.strip() for p in params.split(",")]
            if got != [f"x{i}" for i in range(1, len(got) + 1)]:
                raise GrammarError(f"line {lineno}: lhs parameters must be x1..xn in order")
            rank = len(got)
        if name in rules:
            raise GrammarError(f"line {lineno}: second rule for {name}")
        try:
            rhs = parse_term(rhs_text)
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
        if rhs.rank != rank or not rhs.is_valid_pattern():
            raise GrammarError(
                f"line {lineno}: rhs of {name} must use each of x1..x{rank} once, in order")
        rules[name] = rhs
    return Tslp(rules, start)


def format_rules(g: Tslp) -> list:
    """Human-readable rules, e.g. ``A(x1) -> f(x1,B)``, in reachable order."""
    out = []
    for a in g.reachable_order():
        rhs = g.rules[a]
        lhs = a if rhs.rank == 0 else f"{a}({','.join(label_text(i) for i in range(1, rhs.rank + 1))})"
        out.append(f"{lhs} -> {print_term(rhs)}")
    return out


__all__ = [
    "Tslp", "ModifiedDerivationTree", "val", "tslp_size", "tslp_depth", "grammar_depth",
    "expansion_sizes", "cnf_index", "is_cnf", "derivation_tree", "modified_derivation_tree",
    "compress_via_dag", "parse_tslp", "format_tslp", "format_rules", "canonical", "name_supply",
    "is_param",
]
