"""The universal oriented bivariant theory on a finite category.

A generator over a context ``f: X -> Y`` is a cobordism cycle
``[V -h-> X; L1, ..., Lr]``: a confined ``h`` with ``f . h`` specialized and
a multiset of labels over ``V``, up to isomorphism of ``V`` over ``X``.
With no labels in play this is the unoriented universal theory.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from . import freeab
from .catcore import Category, FiberedCategory, Square
from .errors import (
    ContextError,
    MembershipViolation,
    NotConfined,
    NotIndependent,
    NotSpecialized,
    UnknownLabel,
)
from .freeab import FreeAbelianElement


class Cycle(NamedTuple):
    h: str
    bundles: tuple = ()

    def render(self) -> str:
        return f"[{self.h} ; {','.join(self.bundles)}]"


@dataclass(frozen=True)
class BivariantElement:
    context: str
    value: FreeAbelianElement

    def __add__(self, other):
        if self.context != other.context:
            raise ContextError(f"cannot add elements over {self.context} and {other.context}")
        return BivariantElement(self.context, self.value + other.value)

    def __neg__(self):
        return BivariantElement(self.context, -self.value)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return BivariantElement(self.context, freeab.scalar_mul(n, self.value))

    def render(self) -> str:
        return f"{freeab.render(self.value, Cycle.render)} over {self.context}"

    def generators(self):
        return [Cycle(*key) for key in self.value.keys()]


@dataclass(frozen=True)
class Bounds:
    """Enumeration limits for generator pools."""

    max_source: int | None = 2
    max_bundles: int = 0
    coeff_range: tuple = (-2, 2)


class UniversalTheory:
    """Operations of the universal theory, exposed through the same interface
    as the target adapters so the axiom suite can run on either."""

    name = "universal"
    has_orientation = True

    def __init__(self, cat: Category, fc: FiberedCategory | None = None):
        self.cat = cat
        self.fc = fc if fc is not None else FiberedCategory.trivial()
        self._canon = {}
        self._gen_cache = {}

    # ------------------------------------------------------------ elements
    def context(self, a: BivariantElement) -> str:
        return a.context

    def check_member(self, ctx: str, cyc: Cycle):
        cat = self.cat
        if cat.dst(cyc.h) != cat.src(ctx):
            raise MembershipViolation(f"{cyc.h} does not land in the source of {ctx}")
        if not cat.is_confined(cyc.h):
            raise MembershipViolation(f"{cyc.h} is not confined")
        if not cat.is_specialized(cat.compose(cyc.h, ctx)):
            raise MembershipViolation(f"{ctx} after {cyc.h} is not specialized")
        v = cat.src(cyc.h)
        for tok in cyc.bundles:
            if not self.fc.has_label(v, tok):
                raise UnknownLabel(f"{tok!r} is not a label over {v}")

    def canonicalize(self, cyc: Cycle) -> Cycle:
        """Serialization-minimal representative of the isomorphism class of ``cyc``."""
        cyc = Cycle(cyc.h, tuple(cyc.bundles))
        hit = self._canon.get(cyc)
        if hit is not None:
            return hit
        cat, fc = self.cat, self.fc
        best = None
        for g in cat.isos_into(cat.src(cyc.h)):
            cand = (cat.compose(g, cyc.h), tuple(sorted(fc.pull(g, t) for t in cyc.bundles)))
            if best is None or cand < best:
                best = cand
        out = Cycle(*best)
        self._canon[cyc] = out
        self._canon[out] = out
        return out

    def element(self, ctx: str, pairs) -> BivariantElement:
        """Element over ``ctx`` from ``(cycle, coefficient)`` pairs, canonicalized and checked."""
        terms = []
        for cyc, coeff in pairs:
            cyc = Cycle(cyc[0], tuple(cyc[1]))
            self.check_member(ctx, cyc)
            terms.append((self.canonicalize(cyc), coeff))
        return BivariantElement(ctx, freeab.normalize(terms))

    def cycle(self, ctx: str, h: str, bundles=()) -> BivariantElement:
        return self.element(ctx, [(Cycle(h, tuple(bundles)), 1)])

    def zero(self, ctx: str) -> BivariantElement:
        return BivariantElement(ctx, freeab.ZERO)

    def add(self, a, b):
        return a + b

    def scale(self, n: int, a):
        return n * a

    def equal(self, a, b) -> bool:
        return a == b

    def render(self, a) -> str:
        return a.render()

    def _lift(self, ctx: str, a: BivariantElement, on_cycle) -> BivariantElement:
        def on_key(key):
            return self.element(ctx, on_cycle(Cycle(*key))).value
        return BivariantElement(ctx, freeab.linear_map(a.value, on_key))

    # ---------------------------------------------------------- operations
    def unit(self, obj: str) -> BivariantElement:
        return self.theta(self.cat.identity(obj))

    def theta(self, f: str) -> BivariantElement:
        cat = self.cat
        if not cat.is_specialized(f):
            raise NotSpecialized(f"{f} is not specialized")
        return self.cycle(f, cat.identity(cat.src(f)))

    def product(self, a: BivariantElement, b: BivariantElement) -> BivariantElement:
        cat = self.cat
        f, g = a.context, b.context
        if cat.dst(f) != cat.src(g):
            raise ContextError(f"contexts {f} and {g} do not compose")
        ctx = cat.compose(f, g)

        def on_keys(k1, k2):
            return self.element(ctx, [(self._product_cycle(f, g, Cycle(*k1), Cycle(*k2)), 1)]).value

        return BivariantElement(ctx, freeab.bilinear_map(a.value, b.value, on_keys))

    def _product_cycle(self, f: str, g: str, c1: Cycle, c2: Cycle) -> Cycle:
        cat, fc = self.cat, self.fc
        h, k = c1.h, c2.h
        xp = cat.fiber_product(f, k)          # X' = X x_Y W
        k1, f1 = xp.proj_left, xp.proj_right  # k': X' -> X, f': X' -> W
        vp = cat.fiber_product(h, k1)         # V' = V x_X X'
        k2, h1 = vp.proj_left, vp.proj_right  # k'': V' -> V, h': V' -> X'
        new_h = cat.compose(k2, h)
        f1h1 = cat.compose(h1, f1)
        # the composite identity behind membership of the product
        lhs = cat.compose(new_h, cat.compose(f, g))
        rhs = cat.compose(f1h1, cat.compose(k, g))
        if lhs != rhs:
            raise MembershipViolation(f"product square for {h} and {k} does not commute")
        bundles = tuple(fc.pull(k2, t) for t in c1.bundles) + tuple(fc.pull(f1h1, t) for t in c2.bundles)
        return Cycle(new_h, bundles)

    def pushforward(self, f: str, g: str, a: BivariantElement) -> BivariantElement:
        """``f_*`` from the context ``g . f`` to the context ``g``."""
        cat = self.cat
        if not cat.is_confined(f):
            raise NotConfined(f"{f} is not confined")
        if cat.compose(f, g) != a.context:
            raise ContextError(f"context {a.context} is not {g} after {f}")
        return self._lift(g, a, lambda c: [(Cycle(cat.compose(c.h, f), c.bundles), 1)])

    def pullback(self, sq: Square, a: BivariantElement) -> BivariantElement:
        cat, fc = self.cat, self.fc
        if a.context != sq.right:
            raise ContextError(f"element over {a.context} cannot be pulled back along a square "
                               f"with right side {sq.right}")
        if not cat.is_independent(sq):
            raise NotIndependent(f"{cat.render_square(sq)} is not independent")

        def on_cycle(c: Cycle):
            pb = cat.fiber_product(c.h, sq.top)   # V' = V x_X X'
            return [(Cycle(pb.proj_right, tuple(fc.pull(pb.proj_left, t) for t in c.bundles)), 1)]

        return self._lift(sq.left, a, on_cycle)

    def orient(self, label: str, a: BivariantElement) -> BivariantElement:
        cat, fc = self.cat, self.fc
        x = cat.src(a.context)
        if not fc.has_label(x, label):
            raise UnknownLabel(f"{label!r} is not a label over {x}")
        return self._lift(a.context, a,
                          lambda c: [(Cycle(c.h, c.bundles + (fc.pull(c.h, label),)), 1)])

    phi = orient

    # ---------------------------------------------------------- enumeration
    def labels(self, obj: str) -> tuple:
        return self.fc.labels_over(obj)

    def generators(self, ctx: str, bounds: Bounds = Bounds()) -> list:
        key = (ctx, bounds.max_source, bounds.max_bundles)
        if key in self._gen_cache:
            return self._gen_cache[key]
        cat = self.cat
        x = cat.src(ctx)
        seen = set()
        for v in cat.objects_within(bounds.max_source):
            maps = [h for h in cat.hom(v, x)
                    if cat.is_confined(h) and cat.is_specialized(cat.compose(h, ctx))]
            if not maps:
                continue
            toks = sorted(self.fc.labels_over(v))
            multisets = [ms for r in range(bounds.max_bundles + 1)
                         for ms in itertools.combinations_with_replacement(toks, r)]
            for h in maps:
                for ms in multisets:
                    seen.add(self.canonicalize(Cycle(h, ms)))
        out = sorted(seen)
        self._gen_cache[key] = out
        return out

    def elements(self, ctx: str, bounds: Bounds = Bounds()) -> list:
        return [self.cycle(ctx, c.h, c.bundles) for c in self.generators(ctx, bounds)]

    def basis(self, ctx: str, bounds: Bounds = Bounds()) -> list:
        return self.generators(ctx, bounds)

    def support(self, a: BivariantElement) -> list:
        return a.generators()

    def literal(self, ctx: str, pairs) -> BivariantElement:
        return self.element(ctx, pairs)


def generators(cat: Category, fc: FiberedCategory | None, ctx: str,
               source_bound: int | None = None, bundle_bound: int = 0) -> list:
    return UniversalTheory(cat, fc).generators(ctx, Bounds(source_bound, bundle_bound))
