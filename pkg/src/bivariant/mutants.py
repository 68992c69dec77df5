"""Deliberately broken theories used to show that each suite row can fail.

Every mutant names the check and the row that must catch it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .targets import FiberwiseTheory, FiberwiseValue
from .universal import Cycle, UniversalTheory


def _fv(ctx, vals):
    return FiberwiseValue(ctx, tuple(vals))


class PushMax(FiberwiseTheory):
    name = "mutant-push-max"

    def pushforward(self, f, g, a):
        super().pushforward(f, g, a)
        out = [0] * self.size(self.cat.dst(f))
        seen = set()
        for x, y in enumerate(self.maps[f]):
            out[y] = a.values[x] if y not in seen else max(out[y], a.values[x])
            seen.add(y)
        return _fv(g, out)


class PhiAdditive(FiberwiseTheory):
    name = "mutant-phi-additive"

    def phi(self, label, a):
        w = self.weight(label, self.cat.src(a.context))
        return _fv(a.context, (wx + ax for wx, ax in zip(w, a.values)))


class ThetaTwo(FiberwiseTheory):
    name = "mutant-theta-two"

    def theta(self, f):
        base = super().theta(f)
        return _fv(f, (2 for _ in base.values))

    def unit(self, obj):
        return super().theta(self.cat.identity(obj))


class ProductPlusOne(FiberwiseTheory):
    name = "mutant-product-plus-one"

    def product(self, a, b):
        p = super().product(a, b)
        return _fv(p.context, (v + 1 for v in p.values))


class PushDoubled(FiberwiseTheory):
    name = "mutant-push-doubled"

    def pushforward(self, f, g, a):
        p = super().pushforward(f, g, a)
        if self.cat.is_identity(f):
            return p
        return _fv(p.context, (2 * v for v in p.values))


class PullDoubled(FiberwiseTheory):
    name = "mutant-pull-doubled"

    def pullback(self, sq, a):
        p = super().pullback(sq, a)
        if self.cat.is_identity(sq.bottom):
            return p
        return _fv(p.context, (2 * v for v in p.values))


class ProductScaled(FiberwiseTheory):
    name = "mutant-product-scaled"

    def product(self, a, b):
        p = super().product(a, b)
        n = self.size(self.cat.src(a.context))
        return _fv(p.context, (n * v for v in p.values))


class PullPlusOne(FiberwiseTheory):
    name = "mutant-pull-plus-one"

    def pullback(self, sq, a):
        p = super().pullback(sq, a)
        if self.cat.is_identity(sq.bottom):
            return p
        return _fv(p.context, (v + 1 for v in p.values))


class PullDoubledOnWideSources(FiberwiseTheory):
    name = "mutant-pull-wide"

    def pullback(self, sq, a):
        p = super().pullback(sq, a)
        if self.size(self.cat.src(sq.right)) >= 2:
            return _fv(p.context, (2 * v for v in p.values))
        return p


class UnitTwo(FiberwiseTheory):
    name = "mutant-unit-two"

    def unit(self, obj):
        return _fv(self.cat.identity(obj), (2,) * self.size(obj))


class ProductShifted(FiberwiseTheory):
    name = "mutant-product-shifted"

    def product(self, a, b):
        f = self.maps[a.context]
        super().product(a, b)
        vals = (a.values[x] * (b.values[f[x]] + 1) for x in range(len(a.values)))
        return _fv(self.cat.compose(a.context, b.context), vals)


class ThetaSize(FiberwiseTheory):
    name = "mutant-theta-size"

    def theta(self, f):
        n = self.size(self.cat.src(f))
        return _fv(f, (n,) * n)

    def unit(self, obj):
        return _fv(self.cat.identity(obj), (1,) * self.size(obj))


class PhiStateful(FiberwiseTheory):
    name = "mutant-phi-stateful"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.calls = 0

    def phi(self, label, a):
        self.calls += 1
        p = super().phi(label, a)
        if self.calls % 2 and p.values:
            return _fv(p.context, (p.values[0] + 1,) + p.values[1:])
        return p


class PhiAffine(FiberwiseTheory):
    name = "mutant-phi-affine"

    def phi(self, label, a):
        w = self.weight(label, self.cat.src(a.context))
        return _fv(a.context, (wx * ax + wx for wx, ax in zip(w, a.values)))


class PhiScaled(FiberwiseTheory):
    name = "mutant-phi-scaled"

    def phi(self, label, a):
        p = super().phi(label, a)
        n = len(p.values)
        return _fv(p.context, (n * v for v in p.values))


class PhiFirstPoint(FiberwiseTheory):
    name = "mutant-phi-first-point"

    def phi(self, label, a):
        w = self.weight(label, self.cat.src(a.context))
        return _fv(a.context, (w[0] * v for v in a.values)) if w else a


class PullForgetsLabels(UniversalTheory):
    name = "mutant-universal-pull-forgets-labels"

    def pullback(self, sq, a):
        p = super().pullback(sq, a)
        return self.element(p.context, [(Cycle(k.h, ()), c) for k, c in p.value.terms])


class ProductDropsSecondLabels(UniversalTheory):
    name = "mutant-universal-product-drops-labels"

    def _product_cycle(self, f, g, c1, c2):
        return super()._product_cycle(f, g, c1, Cycle(c2.h, ()))


@dataclass(frozen=True)
class Mutant:
    name: str
    description: str
    factory: Callable
    check: str
    row: str
    universal: bool = False


MUTANTS = [
    Mutant("push-max", "pushforward takes the maximum over each fiber", PushMax, "bivariant", "B-7"),
    Mutant("phi-additive", "label operator adds the weight", PhiAdditive, "orientation", "O-3a"),
    Mutant("theta-two", "orientation is the constant two", ThetaTwo, "grothendieck", "theta-composition"),
    Mutant("product-plus-one", "product adds one pointwise", ProductPlusOne, "bivariant", "B-1"),
    Mutant("push-doubled", "non-identity pushforward doubles", PushDoubled, "bivariant", "B-2"),
    Mutant("pull-doubled", "pullback along a non-identity doubles", PullDoubled, "bivariant", "B-3"),
    Mutant("product-scaled", "product scales by the size of the source", ProductScaled, "bivariant", "B-4"),
    Mutant("pull-plus-one", "pullback along a non-identity adds one", PullPlusOne, "bivariant", "B-5"),
    Mutant("pull-wide", "pullback doubles when the right side starts at two or more points",
           PullDoubledOnWideSources, "bivariant", "B-6"),
    Mutant("unit-two", "unit is the constant two", UnitTwo, "bivariant", "unit-right"),
    Mutant("product-shifted", "second factor is shifted by one", ProductShifted, "bivariant", "commutativity"),
    Mutant("theta-size", "orientation is the size of the source", ThetaSize, "bivariant", "theta-nice"),
    Mutant("phi-stateful", "label operator perturbs every other call", PhiStateful, "orientation", "O-1"),
    Mutant("phi-affine", "label operator is affine in the value", PhiAffine, "orientation", "O-2"),
    Mutant("phi-scaled", "label operator scales by the size of the source", PhiScaled, "orientation", "O-4"),
    Mutant("phi-first-point", "label operator uses the weight at the first point", PhiFirstPoint,
           "orientation", "O-5"),
    Mutant("universal-pull-forgets-labels", "universal pullback drops labels", PullForgetsLabels,
           "orientation", "O-5", universal=True),
    Mutant("universal-product-drops-labels", "universal product drops the labels of the second factor",
           ProductDropsSecondLabels, "orientation", "O-3b", universal=True),
]


def run_mutant(mutant: Mutant, cat, fc, bounds):
    """Run the mutant's designated check; returns the full report."""
    from . import suite
    theory = mutant.factory(cat, fc)
    if mutant.check == "bivariant":
        return suite.check_bivariant_axioms(cat, theory, bounds, fc)
    if mutant.check == "orientation":
        return suite.check_orientation_axioms(cat, fc, theory, bounds)
    return suite.check_grothendieck(cat, fc, theory, bounds)


__all__ = ["MUTANTS", "Mutant", "run_mutant"]
