"""Bottom-up merging into a pattern tree, and the combined low-depth pipeline."""
from __future__ import annotations

import math
from collections import deque

from .bisection import tree_bisection
from .errors import GrammarError, UnsupportedRankError
from .grammar import Tslp, compose, name_supply, pattern
from .trees import Tree, split_pattern


class PatternTree:
    """Pattern tree stored as a partition of a backing tree into fragments.

    Each pattern-tree node is identified with the backing node at the top of
    its fragment (a *head*).  ``kids[h]`` lists the heads hanging below the
    fragment of ``h`` in depth-first order; they fill its parameters.
    Merging a node into its parent only flips a flag and splices a list, so
    no pattern is ever copied.
    """

    __slots__ = ("tree", "is_head", "kids", "parent", "weight")

    def __init__(self, tree: Tree, is_head: list):
        self.tree = tree
        self.is_head = is_head
        n = tree.num_nodes
        self.kids = [None] * n
        self.parent = [-1] * n
        self.weight = [0] * n
        children = tree.children
        for h in range(n):
            if not is_head[h]:
                continue
            kids = []
            size = 0
            stack = [h]
            while stack:
                v = stack.pop()
                size += 1
                for c in reversed(children[v]):
                    if is_head[c]:
                        kids.append(c)
                    else:
                        stack.append(c)
            kids.sort()
            for c in kids:
                self.parent[c] = h
            self.kids[h] = kids
            self.weight[h] = size + len(kids)

    @classmethod
    def from_tree(cls, t: Tree) -> PatternTree:
        """Every node its own fragment ``f(x1..xd)``."""
        pt = cls.__new__(cls)
        pt.tree = t
        n = t.num_nodes
        pt.is_head = [True] * n
        pt.kids = [list(c) for c in t.children]
        pt.weight = [len(c) + 1 for c in t.children]
        pt.parent = t.parents()
        return pt

    @classmethod
    def from_patterns(cls, spec) -> PatternTree:
        """Build from nested ``(pattern, [child specs])`` with valid patterns."""
        labels, arities, heads = [], [], []
        # work items: (pattern, node, child specs) or a child spec to expand
        stack = [("spec", spec)]
        while stack:
            item = stack.pop()
            if item[0] == "spec":
                p, subs = item[1]
                if p.rank != len(subs) or not p.is_valid_pattern():
                    raise ValueError("pattern rank must match its number of children")
                stack.append(("node", p, 0, subs, True))
                continue
            _, p, v, subs, head = item
            lab = p.labels[v]
            if type(lab) is int:
                stack.append(("spec", subs[lab - 1]))
                continue
            labels.append(lab)
            arities.append(len(p.children[v]))
            heads.append(head)
            for c in reversed(p.children[v]):
                stack.append(("node", p, c, subs, False))
        return cls(Tree.from_preorder(labels, arities), heads)

    # -- views -------------------------------------------------------------

    @property
    def root(self) -> int:
        return 0

    def heads(self) -> list:
        return [h for h, f in enumerate(self.is_head) if f]

    def node_count(self) -> int:
        return sum(self.is_head)

    def pattern(self, h: int) -> Tree:
        """The valid pattern of the fragment headed by ``h``."""
        t = self.tree
        labels, arities = [], []
        param = 0
        stack = [h]
        while stack:
            v = stack.pop()
            if v != h and self.is_head[v]:
                param += 1
                labels.append(param)
                arities.append(0)
                continue
            labels.append(t.labels[v])
            arities.append(len(t.children[v]))
            stack.extend(reversed(t.children[v]))
        return Tree.from_preorder(labels, arities, check=False)

    # -- merging ------------------------------------------------------------

    def merge(self, v: int):
        """Absorb the fragment of ``v`` (at most one child) into its parent's."""
        u = self.parent[v]
        if u < 0:
            raise ValueError("cannot merge the root")
        below = self.kids[v]
        if len(below) > 1:
            raise ValueError("only nodes with at most one child can be merged")
        ks = self.kids[u]
        i = ks.index(v)
        ks[i:i + 1] = below
        for c in below:
            self.parent[c] = u
        self.weight[u] += self.weight[v] - 1
        self.is_head[v] = False
        self.kids[v] = None
        self.parent[v] = -1
        return u

    def shrink(self, k: int, events: list | None = None) -> int:
        """Merge greedily with weight budget ``k`` (FIFO queue); returns merge count."""
        if k < 1:
            raise ValueError("k must be at least 1")
        kids, weight, parent = self.kids, self.weight, self.parent
        queue = deque(h for h in self.heads() if h != 0 and len(kids[h]) <= 1)
        queued = [False] * len(kids)
        for h in queue:
            queued[h] = True
        merges = 0
        while queue:
            v = queue.popleft()
            queued[v] = False
            u = parent[v]
            if weight[v] > k or weight[u] > k:
                if events is not None:
                    events.append(("drop", v, weight[v] > k))
                continue
            self.merge(v)
            merges += 1
            if events is not None:
                events.append(("merge", v, u))
            if u != 0 and len(kids[u]) <= 1 and weight[u] <= k and not queued[u]:
                queued[u] = True
                queue.append(u)
                if events is not None:
                    events.append(("enqueue", u, None))
        return merges


def merge_step(pt: PatternTree, v: int, k: int) -> bool:
    """Merge ``v`` into its parent if the weight budget allows; report whether it did."""
    u = pt.parent[v]
    if u < 0 or len(pt.kids[v]) > 1 or pt.weight[v] > k or pt.weight[u] > k:
        return False
    pt.merge(v)
    return True


def default_k(n: int, sigma: int, r: int) -> int:
    """``max(1, floor(log_d(n) / 2))`` with ``d = (6 (sigma + r))^2``."""
    d = (6 * (sigma + r)) ** 2
    k = 0
    while d ** (2 * (k + 1)) <= n:
        k += 1
    return max(1, k)


def pattern_tree_tslp(pt: PatternTree, prefix: str = "P", avoid=()) -> Tslp:
    """TSLP with start rule = the relabelled pattern tree.

    The patterns are shared through the minimal dag of the pattern forest,
    parameters counting as constants.  Every pattern gets a nonterminal, and
    so does every parameter-free subtree referenced from two or more places;
    all other dag nodes are written inline.
    """
    t = pt.tree
    labels, children = t.labels, t.children
    is_head = pt.is_head
    n = t.num_nodes
    pnum = [0] * n
    for h in range(n):
        if is_head[h]:
            for j, c in enumerate(pt.kids[h]):
                pnum[c] = j + 1

    table = {}
    keys = []        # dag node -> (label, child ids)
    refs = []        # reference counts
    closed = []      # no parameter below
    param_id = {}
    for j in set(pnum):
        if j:
            param_id[j] = len(keys)
            table[(j, ())] = len(keys)
            keys.append((j, ()))
            refs.append(0)
            closed.append(False)

    get = table.get
    ids = [0] * n
    for v in range(n - 1, -1, -1):
        kids = children[v]
        ok = True
        if kids:
            ch = []
            for c in kids:
                if is_head[c]:
                    ch.append(param_id[pnum[c]])
                    ok = False
                else:
                    i = ids[c]
                    ch.append(i)
                    if not closed[i]:
                        ok = False
            key = (labels[v], tuple(ch))
        else:
            key = (labels[v], ())
        i = get(key)
        if i is None:
            i = len(keys)
            table[key] = i
            keys.append(key)
            refs.append(0)
            closed.append(ok)
            for c in key[1]:
                refs[c] += 1
        ids[v] = i

    roots = {ids[h] for h in range(n) if is_head[h]}
    avoid = set(avoid) | set(t.ranks)
    fresh = name_supply(prefix, avoid)
    names = {}
    for i in sorted(roots):
        names[i] = next(fresh)
    for i, key in enumerate(keys):
        if i not in names and closed[i] and refs[i] >= 2 and type(key[0]) is not int:
            names[i] = next(fresh)

    def rhs(i):
        out_labels, out_arities = [], []
        stack = [(i, True)]
        while stack:
            j, top = stack.pop()
            lab, ch = keys[j]
            if type(lab) is int:
                out_labels.append(lab)
                out_arities.append(0)
            elif not top and j in names:
                out_labels.append(names[j])
                params = _param_span(j)
                out_arities.append(len(params))
                out_labels.extend(params)
                out_arities.extend([0] * len(params))
            else:
                out_labels.append(lab)
                out_arities.append(len(ch))
                stack.extend((c, False) for c in reversed(ch))
        return Tree.from_preorder(out_labels, out_arities, check=False)

    span_cache = {}

    def _param_span(j):
        got = span_cache.get(j)
        if got is None:
            got = []
            stack = [j]
            while stack:
                lab, ch = keys[stack.pop()]
                if type(lab) is int:
                    got.append(lab)
                else:
                    stack.extend(reversed(ch))
            span_cache[j] = got
        return got

    rules = {names[i]: rhs(i) for i in names}
    for i, name in names.items():
        if rules[name].params() != list(range(1, rules[name].rank + 1)):
            raise GrammarError(f"shared node {name} does not start at x1")

    start = next(fresh)
    s_labels, s_arities = [], []
    stack = [0]
    while stack:
        h = stack.pop()
        s_labels.append(names[ids[h]])
        s_arities.append(len(pt.kids[h]))
        stack.extend(reversed(pt.kids[h]))
    rules[start] = Tree.from_preorder(s_labels, s_arities, check=False)
    return Tslp(rules, start, check=False)


def shrink_pattern_tree(t: Tree, k: int) -> PatternTree:
    pt = PatternTree.from_tree(t)
    pt.shrink(k)
    return pt


def bu_shrink(t: Tree, k: int | None = None, prefix: str = "P", avoid=()) -> Tslp:
    """Linear-time TSLP: merge into patterns of weight at most ~2k, then share them."""
    if t.rank:
        raise ValueError("input tree must not contain parameters")
    if k is None:
        k = default_k(t.size, len(t.ranks), t.max_rank)
    return pattern_tree_tslp(shrink_pattern_tree(t, k), prefix, avoid)


# -- combined pipeline -----------------------------------------------------------

RANK_CAP = 8


def rebracket(g: Tslp, prefix: str = "N") -> Tslp:
    """Equivalent CNF TSLP: every pattern rule becomes a left-leaning comb.

    A rule ``A(x1..xn) -> B(x1..xn)`` just makes ``A`` an alias of ``B``, and
    identical CNF rules are emitted once.
    """
    rules = g.rules
    avoid = set(rules) | set(g.terminals())
    fresh = name_supply(prefix, avoid)
    out = {}
    rank = {}
    table = {}
    cnf = {}

    def emit(key, rhs, r):
        name = table.get(key)
        if name is None:
            name = table[key] = next(fresh)
            out[name] = rhs
            rank[name] = r
        return name

    def build(p: Tree) -> str:
        labels, kids = p.labels, p.children[0]
        root = labels[0]
        if type(root) is int:
            raise GrammarError("rules deriving a bare parameter are not supported")
        j = next((j for j, c in enumerate(kids) if type(labels[c]) is not int), None)
        if j is None:
            if root in rules:
                return cnf[root]
            return emit(("t", root, len(kids)), pattern(root, len(kids)), len(kids))
        inner, outer, k = split_pattern(p, kids[j])
        b = build(outer)
        c = build(inner)
        rb, rc = rank[b], rank[c]
        return emit(("c", b, k + 1, c), compose(b, k + 1, c, rc, rb), rb + rc - 1)

    for a in reversed(g.reachable_order()):
        cnf[a] = build(rules[a])
    return Tslp(out, cnf[g.start], check=False).trimmed()


def combined(t: Tree, rank_cap: int = RANK_CAP, k: int | None = None) -> Tslp:
    """CNF TSLP of logarithmic depth: shrink twice, then bisect the residual tree."""
    ranks = t.ranks
    for sym, r in ranks.items():
        if r > rank_cap:
            raise UnsupportedRankError(sym, r, rank_cap)
    sigma = len(ranks)
    k1 = default_k(t.size, sigma, t.max_rank) if k is None else k
    taken = set(ranks)
    g1 = bu_shrink(t, k1, prefix="P", avoid=taken)
    taken |= set(g1.rules)
    s1 = g1.rules[g1.start]
    k2 = max(1, math.ceil(math.log2(sigma)))
    g2 = bu_shrink(s1, k2, prefix="Q", avoid=taken)
    taken |= set(g2.rules)
    s2 = g2.rules[g2.start]
    g3 = tree_bisection(s2, prefix="R", avoid=taken)

    merged = {}
    for g in (g1, g2):
        merged.update((a, rhs) for a, rhs in g.rules.items() if a != g.start)
    merged.update(g3.rules)
    return rebracket(Tslp(merged, g3.start, check=False))
