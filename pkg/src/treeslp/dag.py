"""Minimal dags by bottom-up hash-consing."""
from __future__ import annotations

from .trees import Tree


def hash_cons(labels, children, table: dict, store_labels: list, store_children: list) -> list:
    """Give every node a shared id; equal subtrees get equal ids.

    Nodes must be numbered so that children have larger numbers than their
    parent (preorder or breadth-first order both qualify).  New signatures
    are appended to the store lists; ``table`` maps signatures to ids.
    """
    ids = [0] * len(labels)
    get = table.get
    for v in range(len(labels) - 1, -1, -1):
        kids = children[v]
        key = (labels[v], tuple([ids[c] for c in kids])) if kids else (labels[v], ())
        i = get(key)
        if i is None:
            i = len(store_labels)
            table[key] = i
            store_labels.append(key[0])
            store_children.append(key[1])
        ids[v] = i
    return ids


class Dag:
    """Shared node store; ``roots[i]`` is the node of the i-th input tree."""

    __slots__ = ("labels", "children", "roots")

    def __init__(self, labels, children, roots):
        self.labels = labels
        self.children = children
        self.roots = roots

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def reachable(self, node: int) -> list:
        seen = {node}
        stack = [node]
        while stack:
            for c in self.children[stack.pop()]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return sorted(seen)

    def __repr__(self):
        return f"Dag(nodes={self.node_count}, roots={self.roots})"


def build_dag(forest) -> Dag:
    """Minimal dag of a forest; parameters count as ordinary constants.

    Nodes are numbered by first occurrence in depth-first, left-to-right
    order across the forest.
    """
    table = {}
    tmp_labels = []
    tmp_children = []
    per_tree = [hash_cons(t.labels, t.children, table, tmp_labels, tmp_children) for t in forest]

    new_id = [-1] * len(tmp_labels)
    order = []
    for ids in per_tree:
        for i in ids:
            if new_id[i] < 0:
                new_id[i] = len(order)
                order.append(i)
    labels = [tmp_labels[i] for i in order]
    children = [tuple(new_id[c] for c in tmp_children[i]) for i in order]
    roots = [new_id[ids[0]] for ids in per_tree]
    return Dag(labels, children, roots)


def unfold(d: Dag, index: int = 0) -> Tree:
    """Expand the dag below ``d.roots[index]`` back into a tree."""
    if not 0 <= index < len(d.roots):
        raise IndexError(f"dag has {len(d.roots)} roots, asked for {index}")
    labels = []
    arities = []
    stack = [d.roots[index]]
    while stack:
        v = stack.pop()
        kids = d.children[v]
        labels.append(d.labels[v])
        arities.append(len(kids))
        stack.extend(reversed(kids))
    return Tree.from_preorder(labels, arities, check=False)


def dag_rules(d: Dag):
    """One rank-0 rule per dag node: ``(rules, names)`` with ``names[node]``."""
    from .grammar import name_supply

    terminals = {lab for lab in d.labels if type(lab) is not int}
    fresh = name_supply("N", terminals)
    names = [next(fresh) for _ in d.labels]
    rules = {}
    for v, (lab, kids) in enumerate(zip(d.labels, d.children)):
        rules[names[v]] = Tree([lab, *(names[c] for c in kids)],
                               [tuple(range(1, len(kids) + 1))] + [()] * len(kids),
                               check=False)
    return rules, names


def dag_as_tslp(d: Dag, root: int | None = None):
    """Read the dag as a TSLP whose nonterminals all have rank 0.

    With several roots, ``root`` selects which input tree becomes the start
    symbol; use :func:`dag_rules` for a forest view.
    """
    from .grammar import Tslp

    if root is None:
        if len(set(d.roots)) != 1:
            raise ValueError("dag has several roots; pass root= or use dag_rules")
        root = 0
    if any(type(lab) is int for lab in d.labels):
        raise ValueError("a dag with parameter leaves is not a TSLP")
    rules, names = dag_rules(d)
    g = Tslp(rules, names[d.roots[root]])
    return g.trimmed()
