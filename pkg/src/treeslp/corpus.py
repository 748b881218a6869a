"""Deterministic input generators: random trees, dag-hard families, de Bruijn strings."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .trees import Tree

FAMILIES = ("random-binary", "caterpillar", "complete", "dag-hard", "dag-hard-loglog",
            "debruijn-string", "random-unranked", "random-formula")

DIGITS = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def _symbols(prefix, sigma):
    return [prefix] if sigma == 1 else [f"{prefix}{i}" for i in range(sigma)]


def _remy(leaves: int, rng: random.Random):
    """Uniform full binary tree with ``leaves`` leaves, as (left, right, root)."""
    total = 2 * leaves - 1
    left = [-1] * total
    right = [-1] * total
    parent = [-1] * total
    root = 0
    randrange = rng.randrange
    count = 1
    while count < total:
        x = randrange(count)
        y, z = count, count + 1
        p = parent[x]
        if p < 0:
            root = y
        elif left[p] == x:
            left[p] = y
        else:
            right[p] = y
        parent[y] = p
        if randrange(2):
            left[y], right[y] = x, z
        else:
            left[y], right[y] = z, x
        parent[x] = parent[z] = y
        count += 2
    return left, right, root


def _binary_preorder(left, right, root):
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        if left[v] >= 0:
            stack.append(right[v])
            stack.append(left[v])
    return order


def random_binary_shape(n: int, rng: random.Random) -> list:
    """Preorder arities of a uniformly random full binary tree with ``n`` nodes."""
    if n % 2 == 0:
        n += 1
    left, right, root = _remy((n + 1) // 2, rng)
    return [0 if left[v] < 0 else 2 for v in _binary_preorder(left, right, root)]


def gen_random_binary(n: int, sigma: int = 1, seed: int = 0) -> Tree:
    """Uniformly random full binary tree; even ``n`` is rounded up.

    Leaves get labels from ``a`` (or ``a0..``), inner nodes from ``b`` (or ``b0..``).
    """
    rng = random.Random(seed)
    arities = random_binary_shape(n, rng)
    leaf_syms = _symbols("a", sigma)
    node_syms = _symbols("b", sigma)
    if sigma == 1:
        labels = ["b" if a else "a" for a in arities]
    else:
        choice = rng.choice
        labels = [choice(node_syms) if a else choice(leaf_syms) for a in arities]
    return Tree.from_preorder(labels, arities, check=False)


def gen_caterpillar(n: int) -> Tree:
    """Left caterpillar ``b(b(...(a,a)...,a),a)``; even ``n`` is rounded up."""
    m = n // 2
    return Tree.from_preorder(["b"] * m + ["a"] * (m + 1), [2] * m + [0] * (m + 1), check=False)


def gen_complete(n: int) -> Tree:
    """Smallest complete binary tree with at least ``n`` nodes."""
    height = 0
    while 2 ** (height + 1) - 1 < n:
        height += 1
    labels, arities = [], []
    stack = [height]
    while stack:
        h = stack.pop()
        labels.append("b" if h else "a")
        arities.append(2 if h else 0)
        if h:
            stack += (h - 1, h - 1)
    return Tree.from_preorder(labels, arities, check=False)


def gen_random_unranked(n: int, sigma: int = 1, seed: int = 0) -> Tree:
    """Random recursive ordered tree: each new node becomes the last child of a random node."""
    rng = random.Random(seed)
    kids = [[] for _ in range(n)]
    for v in range(1, n):
        kids[rng.randrange(v)].append(v)
    syms = _symbols("f", sigma)
    labels, arities = [], []
    stack = [0]
    while stack:
        v = stack.pop()
        labels.append(rng.choice(syms))
        arities.append(len(kids[v]))
        stack.extend(reversed(kids[v]))
    return Tree.from_preorder(labels, arities, check=False)


def gen_random_formula(n: int, m: int = 4, seed: int = 0, const_rate: float = 0.05) -> Tree:
    """Random arithmetic formula over ``add``, ``mul``, ``c0``, ``c1`` and ``y1..ym``."""
    rng = random.Random(seed)
    arities = random_binary_shape(n, rng)
    labels = []
    for a in arities:
        if a:
            labels.append("add" if rng.random() < 0.5 else "mul")
        elif rng.random() < const_rate:
            labels.append("c0" if rng.random() < 0.5 else "c1")
        else:
            labels.append(f"y{rng.randrange(m) + 1}")
    return Tree.from_preorder(labels, arities, check=False)


# -- dag-hard families --------------------------------------------------------

@lru_cache(maxsize=None)
def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


def unrank_binary(m: int, i: int, inner="c", leaf="a") -> list:
    """Preorder labels of the ``i``-th full binary tree with ``m`` inner nodes."""
    if not 0 <= i < catalan(m):
        raise ValueError("rank out of range")
    out = []
    stack = [(m, i)]
    while stack:
        m, i = stack.pop()
        if m == 0:
            out.append(leaf)
            continue
        for j in range(m):
            right = catalan(m - 1 - j)
            block = catalan(j) * right
            if i < block:
                break
            i -= block
        out.append(inner)
        stack.append((m - 1 - j, i % right))
        stack.append((j, i // right))
    return out


def _balanced_slots(k: int) -> list:
    """Preorder of a balanced ``c``-pattern with ``k`` slots; ``None`` marks a slot."""
    out = []
    stack = [k]
    while stack:
        k = stack.pop()
        if k == 1:
            out.append(None)
        else:
            out.append("c")
            stack += (k // 2, (k + 1) // 2)
    return out


def _plug(top, pieces):
    labels, arities = [], []
    it = iter(pieces)
    for lab in top:
        if lab is None:
            piece = next(it)
            labels += piece
            arities += [_ARITY[x] for x in piece]
        else:
            labels.append(lab)
            arities.append(2)
    return Tree.from_preorder(labels, arities, check=False)


_ARITY = {"a": 0, "b": 1, "c": 2}


def gen_dag_hard(n: int) -> Tree:
    """Tree over ``a/0 b/1 c/2`` whose minimal dag has at least ``n`` nodes."""
    if n < 16:
        raise ValueError("gen_dag_hard needs n >= 16")
    log = _ceil_log2(n)
    k = -(-n // log)
    if catalan(log) < k:
        raise ValueError("not enough distinct shapes")
    pieces = [["b"] * log + unrank_binary(log, i) for i in range(k)]
    return _plug(_balanced_slots(k), pieces)


def gen_dag_hard_loglog(n: int) -> Tree:
    """Balanced tree over ``a/0 b/1 c/2`` with a dag of order n log log n / log n."""
    if n < 256:
        raise ValueError("gen_dag_hard_loglog needs n >= 256")
    log = _ceil_log2(n)
    k = -(-n // log)
    leaves = max(1, _ceil_log2(k))
    chain = _ceil_log2(log)
    base = _balanced_slots(leaves)
    pieces = []
    for i in range(k):
        labels = ["b"] * chain
        slot = 0
        for lab in base:
            if lab is not None:
                labels.append(lab)
                continue
            labels += ["b", "a"] if (i >> slot) & 1 else ["a"]
            slot += 1
        pieces.append(labels)
    return _plug(_balanced_slots(k), pieces)


# -- strings and counting --------------------------------------------------------

def gen_debruijn_string(sigma: int, n: int) -> str:
    """Length-``n`` string over ``sigma`` digits with ``n - r + 1`` distinct ``r``-factors."""
    if sigma < 2 or sigma > len(DIGITS):
        raise ValueError(f"sigma must lie in 2..{len(DIGITS)}")
    if n < sigma * sigma:
        raise ValueError("need n >= sigma^2")
    r = 1
    while sigma ** r < n:
        r += 1
    vertices = sigma ** (r - 1)
    ptr = [0] * vertices
    stack = [(0, -1)]
    out = []
    while stack:
        v, sym = stack[-1]
        if ptr[v] < sigma:
            a = ptr[v]
            ptr[v] += 1
            stack.append(((v * sigma + a) % vertices, a))
        else:
            stack.pop()
            if sym >= 0:
                out.append(sym)
    out.reverse()
    text = DIGITS[0] * (r - 1) + "".join(DIGITS[a] for a in out)
    return text[:n]


def _ordered_shapes(k: int):
    """All ordered trees with ``k`` nodes, as nested tuples of children."""
    return _shapes(k)


@lru_cache(maxsize=None)
def _shapes(k):
    return tuple(tuple(f) for f in _forests(k - 1))


@lru_cache(maxsize=None)
def _forests(m):
    if m == 0:
        return ((),)
    out = []
    for j in range(1, m + 1):
        for t in _shapes(j):
            for rest in _forests(m - j):
                out.append((t,) + rest)
    return tuple(out)


def count_bound_check(n: int, sigma: int) -> int:
    """Count labelled ordered trees of size 1..n over ``sigma`` names; check the bound."""
    if not (1 <= n <= 8 and 1 <= sigma <= 3):
        raise ValueError("exhaustive count only for n <= 8 and sigma <= 3")
    total = sum(len(_ordered_shapes(k)) * sigma ** k for k in range(1, n + 1))
    bound = Fraction(4, 3) * (4 * sigma) ** n
    if total > bound:
        raise AssertionError(f"{total} trees exceed the bound {bound}")
    return total


# -- GenSpec entry point ----------------------------------------------------------

@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    sigma: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1 or self.sigma < 1:
            raise ValueError("n and sigma must be positive")


def generate(spec: GenSpec):
    """Tree (or string, for ``debruijn-string``) described by ``spec``."""
    f = spec.family
    if f == "random-binary":
        return gen_random_binary(spec.n, spec.sigma, spec.seed)
    if f == "caterpillar":
        return gen_caterpillar(spec.n)
    if f == "complete":
        return gen_complete(spec.n)
    if f == "dag-hard":
        return gen_dag_hard(spec.n)
    if f == "dag-hard-loglog":
        return gen_dag_hard_loglog(spec.n)
    if f == "random-unranked":
        return gen_random_unranked(spec.n, spec.sigma, spec.seed)
    if f == "random-formula":
        return gen_random_formula(spec.n, max(1, spec.sigma), spec.seed)
    return gen_debruijn_string(max(2, spec.sigma), spec.n)
