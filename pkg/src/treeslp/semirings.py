"""Probe semirings for evaluating circuits and formulas.

Every instance works elementwise on numpy object arrays too, so one pass can
evaluate a batch of assignments at once (leading axes are the batch).
"""
from __future__ import annotations

import numpy as np

MERSENNE_61 = 2 ** 61 - 1


class Semiring:
    """Interface: ``zero``, ``one``, ``add``, ``mul``, ``eq`` and ``sample``."""

    name = "semiring"
    commutative = False
    zero = None
    one = None

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return bool(np.all(a == b))

    def sample(self, rng: np.random.Generator, size: int = 1) -> list:
        """``size`` random elements."""
        raise NotImplementedError

    def batch(self, elements: list):
        """Stack elements along a new leading batch axis."""
        out = np.empty(len(elements), dtype=object)
        out[:] = elements
        return out

    def unbatch(self, value, i: int):
        """Element ``i`` of a batched value (scalars broadcast)."""
        if isinstance(value, np.ndarray) and value.ndim:
            return value[i]
        return value

    def __repr__(self):
        return f"{type(self).__name__}()"


class Integers(Semiring):
    """The integers with Python's unbounded arithmetic."""

    name = "Z"
    commutative = True
    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def sample(self, rng, size=1):
        return [int(v) for v in rng.integers(-1000, 1000, size=size)]


class ModP(Semiring):
    """Integers modulo a prime, by default the Mersenne prime 2^61 - 1."""

    commutative = True
    zero = 0
    one = 1

    def __init__(self, p: int = MERSENNE_61):
        self.p = p
        self.name = f"Z_{p}"

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def sample(self, rng, size=1):
        return [int(v) for v in rng.integers(0, self.p, size=size)]

    def __repr__(self):
        return f"ModP({self.p})"


class MatrixModP(Semiring):
    """2x2 matrices over Z_p: a noncommutative probe that catches operand-order bugs."""

    def __init__(self, p: int = MERSENNE_61):
        self.p = p
        self.name = f"M2(Z_{p})"
        self.zero = np.zeros((2, 2), dtype=object)
        self.zero[:] = 0
        self.one = self.zero.copy()
        self.one[0, 0] = self.one[1, 1] = 1

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return np.matmul(a, b) % self.p

    def eq(self, a, b) -> bool:
        return bool(np.all(np.asarray(a) == np.asarray(b)))

    def sample(self, rng, size=1):
        vals = rng.integers(0, self.p, size=(size, 2, 2))
        return [np.array(m.tolist(), dtype=object) for m in vals]

    def batch(self, elements):
        out = np.empty((len(elements), 2, 2), dtype=object)
        for i, m in enumerate(elements):
            out[i] = m
        return out

    def unbatch(self, value, i):
        value = np.asarray(value, dtype=object)
        return value[i] if value.ndim == 3 else value

    def __repr__(self):
        return f"MatrixModP({self.p})"


def check_laws(s: Semiring, elements: list) -> list:
    """Names of the semiring laws violated on triples drawn from ``elements``."""
    failures = set()
    eq, add, mul = s.eq, s.add, s.mul
    zero, one = s.zero, s.one
    for a in elements:
        if not eq(add(a, zero), a) or not eq(add(zero, a), a):
            failures.add("additive identity")
        if not eq(mul(a, one), a) or not eq(mul(one, a), a):
            failures.add("multiplicative identity")
        if not eq(mul(a, zero), zero) or not eq(mul(zero, a), zero):
            failures.add("annihilation")
        for b in elements:
            if not eq(add(a, b), add(b, a)):
                failures.add("additive commutativity")
            if s.commutative and not eq(mul(a, b), mul(b, a)):
                failures.add("multiplicative commutativity")
            for c in elements:
                if not eq(add(add(a, b), c), add(a, add(b, c))):
                    failures.add("additive associativity")
                if not eq(mul(mul(a, b), c), mul(a, mul(b, c))):
                    failures.add("multiplicative associativity")
                if not eq(mul(a, add(b, c)), add(mul(a, b), mul(a, c))):
                    failures.add("left distributivity")
                if not eq(mul(add(a, b), c), add(mul(a, c), mul(b, c))):
                    failures.add("right distributivity")
    return sorted(failures)
