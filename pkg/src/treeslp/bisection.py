"""Top-down bisection of a tree into a balanced CNF TSLP.

Patterns are never materialised during the rounds.  A pending pattern is a
fragment of the input tree given by its root node and the ordered tuple of
"hole" nodes where its parameters sit; its size is then a difference of
input subtree sizes, and every split costs time proportional to the descent
it performs rather than to the size of the pattern.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import ModifiedDerivationTree, Tslp, compress_via_dag
from .trees import Tree, subtree_sizes


# -- reference operations on explicit patterns -------------------------------------

def split_node(s: Tree, r: int | None = None) -> int:
    """First node on the leftmost-largest-child descent with a small enough subtree."""
    sizes = subtree_sizes(s)
    total = sizes[0]
    if total < 2:
        raise ValueError("split_node needs a pattern of size at least 2")
    children = s.children
    v = 0
    while True:
        d = len(children[v])
        if sizes[v] * (d + 2) <= (d + 1) * total:
            return v
        best = -1
        for c in children[v]:
            if best < 0 or sizes[c] > sizes[best]:
                best = c
        v = best


def _lca(a, b, parent, depth):
    while depth[a] > depth[b]:
        a = parent[a]
    while depth[b] > depth[a]:
        b = parent[b]
    while a != b:
        a = parent[a]
        b = parent[b]
    return a


def rank_limiting_split(s: Tree, bound: int) -> int:
    """Root of a smallest subtree holding two or more of the ``bound + 1`` parameters."""
    holes = [v for v, lab in enumerate(s.labels) if type(lab) is int]
    if len(holes) != bound + 1:
        raise ValueError(f"expected {bound + 1} parameters, found {len(holes)}")
    if len(holes) < 2:
        raise ValueError("need at least two parameters")
    parent = s.parents()
    depth = [0] * len(parent)
    for v in range(1, len(parent)):
        depth[v] = depth[parent[v]] + 1
    return _deepest_lca(holes, parent, depth)


def _deepest_lca(holes, parent, depth):
    best = -1
    for a, b in zip(holes, holes[1:]):
        w = _lca(a, b, parent, depth)
        if best < 0 or depth[w] > depth[best]:
            best = w
    return best


# -- the compressor -------------------------------------------------------------

@dataclass
class BisectionTrace:
    """Optional record of a run, for checking the split guarantees."""
    splits: list = field(default_factory=list)       # (kind, |s|, |s[v]|, rank(s))
    round_sizes: list = field(default_factory=list)  # total pattern size per round
    max_rank: int = 0


def bisection_mdt(t: Tree, trace: BisectionTrace | None = None) -> ModifiedDerivationTree:
    """Run the bisection rounds and return the modified derivation tree."""
    if t.rank:
        raise ValueError("input tree must not contain parameters")
    labels = t.labels
    kids = t.children
    sz = t.spans()
    bound = t.max_rank + 1
    parent = depth = None

    m_labels = [None]
    m_left = [-1]
    m_right = [-1]
    term_ranks = {}
    current = [(0, 0, ())]
    while current:
        nxt = []
        if trace is not None:
            trace.round_sizes.append(
                sum(sz[root] - sum(sz[h] for h in holes) for _, root, holes in current))
        for node, root, holes in current:
            size = sz[root]
            for h in holes:
                size -= sz[h]
            if trace is not None and len(holes) > trace.max_rank:
                trace.max_rank = len(holes)
            if size == 1:
                lab = labels[root]
                m_labels[node] = lab
                term_ranks[lab] = len(kids[root])
                continue

            if len(holes) == bound:
                if parent is None:
                    parent = t.parents()
                    depth = [0] * len(parent)
                    for v in range(1, len(parent)):
                        depth[v] = depth[parent[v]] + 1
                v = _deepest_lca(holes, parent, depth)
                if trace is not None:
                    inner = sz[v] - sum(sz[h] for h in holes if v < h < v + sz[v])
                    trace.splits.append(("rank", size, inner, len(holes)))
            else:
                v = root
                while True:
                    best = -1
                    best_size = -1
                    for c in kids[v]:
                        cs = sz[c]
                        if holes:
                            if c in holes:
                                continue
                            end = c + cs
                            for h in holes:
                                if c < h < end:
                                    cs -= sz[h]
                        if cs > best_size:
                            best, best_size = c, cs
                    v = best
                    d = len(kids[v])
                    if best_size * (d + 2) <= (d + 1) * size:
                        break
                if trace is not None:
                    trace.splits.append(("balanced", size, best_size, len(holes)))

            end = v + sz[v]
            b = 0
            k = len(holes)
            while b < k and holes[b] < v:
                b += 1
            e = b
            while e < k and holes[e] < end:
                e += 1
            m_labels[node] = b + 1
            lo = len(m_labels)
            m_left[node] = lo
            m_right[node] = lo + 1
            m_labels += (None, None)
            m_left += (-1, -1)
            m_right += (-1, -1)
            nxt.append((lo, root, holes[:b] + (v,) + holes[e:]))
            nxt.append((lo + 1, v, holes[b:e]))
        current = nxt
    return ModifiedDerivationTree(m_labels, m_left, m_right, term_ranks)


def tree_bisection(t: Tree, trace: BisectionTrace | None = None, prefix: str = "N",
                   avoid=()) -> Tslp:
    """CNF TSLP for ``t`` with nonterminal ranks at most ``max_rank(t) + 1``."""
    return compress_via_dag(bisection_mdt(t, trace), prefix, avoid)


def depth_bound(n: int, r: int) -> int:
    """``2 * ceil(log n / log((r+2)/(r+1)))``, computed exactly."""
    # smallest d with ((r+1)/(r+2))^d * n <= 1, i.e. (r+2)^d >= n (r+1)^d
    d = 0
    while (r + 2) ** d < n * (r + 1) ** d:
        d += 1
    return 2 * d
