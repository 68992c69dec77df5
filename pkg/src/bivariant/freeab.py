"""Free abelian groups over totally ordered generator keys.

Elements are stored canonically: keys strictly increasing, no zero
coefficients, so two elements are equal iff their term tuples are equal.
Coefficients are Python ints (arbitrary precision).
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Hashable, Iterable, Iterator


class FreeAbelianElement:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: tuple = ()):
        # trusted constructor; use normalize() for arbitrary input
        self._terms = terms
        self._hash = None

    @property
    def terms(self) -> tuple:
        return self._terms

    def keys(self):
        return [k for k, _ in self._terms]

    def coefficient(self, key) -> int:
        for k, c in self._terms:
            if k == key:
                return c
        return 0

    def __iter__(self) -> Iterator:
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, FreeAbelianElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return scalar_mul(-1, self)

    def __sub__(self, other):
        return add(self, scalar_mul(-1, other))

    def __rmul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return scalar_mul(n, self)

    def render(self, key_format: Callable[[Hashable], str] = str) -> str:
        return render(self, key_format)

    def __repr__(self):
        return f"FreeAbelianElement({self.render(repr)})"


ZERO = FreeAbelianElement(())


def normalize(pairs: Iterable[tuple]) -> FreeAbelianElement:
    """Sum coefficients of equal keys, drop zeros and sort by key."""
    acc = defaultdict(int)
    for key, coeff in pairs:
        acc[key] += coeff
    return FreeAbelianElement(tuple(sorted((k, c) for k, c in acc.items() if c != 0)))


def generator(key) -> FreeAbelianElement:
    return FreeAbelianElement(((key, 1),))


def add(a: FreeAbelianElement, b: FreeAbelianElement) -> FreeAbelianElement:
    if not a:
        return b
    if not b:
        return a
    return normalize(a.terms + b.terms)


def scalar_mul(n: int, a: FreeAbelianElement) -> FreeAbelianElement:
    if n == 0:
        return ZERO
    return FreeAbelianElement(tuple((k, n * c) for k, c in a.terms))


def linear_map(a: FreeAbelianElement, on_key: Callable) -> FreeAbelianElement:
    """Extend `on_key` (key -> FreeAbelianElement) linearly over `a`."""
    pairs = []
    for key, coeff in a.terms:
        for k2, c2 in on_key(key).terms:
            pairs.append((k2, coeff * c2))
    return normalize(pairs)


def bilinear_map(a: FreeAbelianElement, b: FreeAbelianElement, on_keys: Callable) -> FreeAbelianElement:
    pairs = []
    for k1, c1 in a.terms:
        for k2, c2 in b.terms:
            for k3, c3 in on_keys(k1, k2).terms:
                pairs.append((k3, c1 * c2 * c3))
    return normalize(pairs)


def render(a: FreeAbelianElement, key_format: Callable[[Hashable], str] = str) -> str:
    """Canonical text: ``c1*[key1] + c2*[key2]``; ``0`` for the zero element.

    `key_format` must produce the bracketed form of a key.
    """
    if not a:
        return "0"
    return " + ".join(f"{c}*{key_format(k)}" for k, c in a.terms)
