"""Target theories for the universal transformation.

``TheoryAdapter`` fixes the interface every theory offers to the suite and
to ``transform``; ``FiberwiseTheory`` is the built-in model of integer
valued functions on finite sets (products multiply along the context,
pushforward sums over fibers, pullback precomposes).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .catcore import Category, FiberedCategory, Square
from .errors import (
    ContextError,
    NotApplicable,
    NotConfined,
    NotIndependent,
    NotSpecialized,
    UnknownLabel,
)
from .universal import Bounds


class TheoryAdapter:
    """Interface of a bivariant theory over a fixed category.

    Values are opaque but must support ``==``. Subclasses implement the
    operation callbacks; ``phi`` is optional (set ``has_orientation``).
    """

    name = "adapter"
    has_orientation = False

    def __init__(self, cat: Category, fc: FiberedCategory | None = None):
        self.cat = cat
        self.fc = fc if fc is not None else FiberedCategory.trivial()

    def context(self, value) -> str:
        raise NotImplementedError

    def product(self, a, b):
        raise NotImplementedError

    def pushforward(self, f: str, g: str, a):
        raise NotImplementedError

    def pullback(self, sq: Square, a):
        raise NotImplementedError

    def unit(self, obj: str):
        return self.theta(self.cat.identity(obj))

    def theta(self, f: str):
        raise NotImplementedError

    def phi(self, label: str, a):
        raise NotApplicable(f"{self.name} carries no orientation data")

    def zero(self, ctx: str):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def scale(self, n: int, a):
        raise NotImplementedError

    def equal(self, a, b) -> bool:
        return a == b

    def render(self, a) -> str:
        return repr(a)

    def labels(self, obj: str) -> tuple:
        return self.fc.labels_over(obj) if self.has_orientation else ()

    def elements(self, ctx: str, bounds: Bounds):
        raise NotImplementedError

    def literal(self, ctx: str, data):
        raise NotImplementedError


@dataclass(frozen=True)
class FiberwiseValue:
    context: str
    values: tuple

    def __add__(self, other):
        if self.context != other.context:
            raise ContextError(f"cannot add values over {self.context} and {other.context}")
        return FiberwiseValue(self.context, tuple(a + b for a, b in zip(self.values, other.values)))

    def __rmul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return FiberwiseValue(self.context, tuple(n * a for a in self.values))


class FiberwiseTheory(TheoryAdapter):
    """Integer functions on the carrier set of the source of each context."""

    name = "fiberwise"
    has_orientation = True

    def __init__(self, cat: Category, fc: FiberedCategory | None = None):
        super().__init__(cat, fc)
        if cat.carriers is None:
            raise NotApplicable("the category declares no carrier sets")
        self.sets = {o: tuple(els) for o, els in cat.carriers["sets"].items()}
        pos = {o: {e: i for i, e in enumerate(els)} for o, els in self.sets.items()}
        self.maps = {m: tuple(pos[cat.dst(m)][v] for v in table)
                     for m, table in cat.carriers["maps"].items()}
        self.weights = {k: tuple(v) for k, v in (cat.carriers.get("label_values") or {}).items()}

    def size(self, obj: str) -> int:
        return len(self.sets[obj])

    def context(self, a: FiberwiseValue) -> str:
        return a.context

    def _check(self, a: FiberwiseValue):
        if len(a.values) != self.size(self.cat.src(a.context)):
            raise ContextError(f"value has {len(a.values)} entries over {a.context}")

    def product(self, a, b):
        cat = self.cat
        if cat.dst(a.context) != cat.src(b.context):
            raise ContextError(f"contexts {a.context} and {b.context} do not compose")
        f = self.maps[a.context]
        vals = tuple(a.values[x] * b.values[f[x]] for x in range(len(a.values)))
        return FiberwiseValue(cat.compose(a.context, b.context), vals)

    def pushforward(self, f, g, a):
        cat = self.cat
        if not cat.is_confined(f):
            raise NotConfined(f"{f} is not confined")
        if cat.compose(f, g) != a.context:
            raise ContextError(f"context {a.context} is not {g} after {f}")
        out = [0] * self.size(cat.dst(f))
        for x, y in enumerate(self.maps[f]):
            out[y] += a.values[x]
        return FiberwiseValue(g, tuple(out))

    def pullback(self, sq: Square, a):
        if a.context != sq.right:
            raise ContextError(f"value over {a.context} does not sit on the right side of the square")
        if not self.cat.is_independent(sq):
            raise NotIndependent(f"{self.cat.render_square(sq)} is not independent")
        return FiberwiseValue(sq.left, tuple(a.values[x] for x in self.maps[sq.top]))

    def theta(self, f):
        if not self.cat.is_specialized(f):
            raise NotSpecialized(f"{f} is not specialized")
        return FiberwiseValue(f, (1,) * self.size(self.cat.src(f)))

    def weight(self, label: str, obj: str) -> tuple:
        if not self.fc.has_label(obj, label) or label not in self.weights:
            raise UnknownLabel(f"{label!r} is not a weight over {obj}")
        return self.weights[label]

    def phi(self, label, a):
        w = self.weight(label, self.cat.src(a.context))
        return FiberwiseValue(a.context, tuple(wx * ax for wx, ax in zip(w, a.values)))

    def zero(self, ctx):
        return FiberwiseValue(ctx, (0,) * self.size(self.cat.src(ctx)))

    def add(self, a, b):
        return a + b

    def scale(self, n, a):
        return n * a

    def render(self, a) -> str:
        names = self.sets[self.cat.src(a.context)]
        return "(" + ", ".join(f"{e}↦{v}" for e, v in zip(names, a.values)) + ")"

    def elements(self, ctx, bounds: Bounds):
        lo, hi = bounds.coeff_range
        n = self.size(self.cat.src(ctx))
        return [FiberwiseValue(ctx, vals) for vals in itertools.product(range(lo, hi + 1), repeat=n)]

    def basis(self, ctx, bounds: Bounds = Bounds()):
        n = self.size(self.cat.src(ctx))
        return [FiberwiseValue(ctx, tuple(int(i == j) for j in range(n))) for i in range(n)]

    def support(self, a):
        return [FiberwiseValue(a.context, tuple(int(i == j) for j in range(len(a.values))))
                for i, v in enumerate(a.values) if v]

    def literal(self, ctx, data):
        value = FiberwiseValue(ctx, tuple(int(v) for v in data))
        self._check(value)
        return value


ADAPTERS = {"fiberwise": FiberwiseTheory}


def make_adapter(name: str, cat: Category, fc: FiberedCategory | None = None) -> TheoryAdapter:
    try:
        return ADAPTERS[name](cat, fc)
    except KeyError:
        raise NotApplicable(f"unknown target {name!r}") from None
