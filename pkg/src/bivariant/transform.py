"""The universal Grothendieck transformation and the derived structures
built from product, pushforward, pullback and the canonical orientation:
Gysin maps, exterior products and fundamental classes.

Covariant groups sit over ``X -> pt`` and contravariant ones over ``id_X``.
"""

from __future__ import annotations

from .catcore import Category, Square
from .errors import MissingOrientationData, NotConfined, NotSpecialized
from .universal import Cycle, UniversalTheory

FORWARD = "forward"
REVERSE = "reverse"


def covariant_context(cat: Category, obj: str) -> str:
    return cat.terminal_map(obj)


def contravariant_context(cat: Category, obj: str) -> str:
    return cat.identity(obj)


def gamma_of_cycle(adapter, ctx: str, cyc: Cycle, order: str = FORWARD):
    """Closed form on a single (not necessarily canonical) cycle over ``ctx``.

    ``FORWARD`` applies the label operators starting from the last label, so
    the result reads phi(L1)(phi(L2)(...)); ``REVERSE`` starts from the first.
    """
    cat = adapter.cat
    if cyc.bundles and not adapter.has_orientation:
        raise MissingOrientationData(f"{adapter.name} has no orientation operator")
    composite = cat.compose(cyc.h, ctx)
    if not cat.is_specialized(composite):
        raise NotSpecialized(f"{composite} is not specialized")
    value = adapter.theta(composite)
    labels = reversed(cyc.bundles) if order == FORWARD else iter(cyc.bundles)
    for tok in labels:
        value = adapter.phi(tok, value)
    return adapter.pushforward(cyc.h, ctx, value)


def gamma(adapter, element, order: str = FORWARD):
    """Image of a universal element under the transformation into ``adapter``."""
    out = adapter.zero(element.context)
    for key, coeff in element.value.terms:
        out = adapter.add(out, adapter.scale(coeff, gamma_of_cycle(adapter, element.context,
                                                                      Cycle(*key), order)))
    return out


def decompose(universal: UniversalTheory, ctx: str, cyc: Cycle):
    """Rebuild a generator as ``h_*`` of label operators applied to ``[V -id-> V]``."""
    cat = universal.cat
    inner = universal.theta(cat.compose(cyc.h, ctx))
    for tok in reversed(cyc.bundles):
        inner = universal.orient(tok, inner)
    return universal.pushforward(cyc.h, ctx, inner)


def gamma_via_decomposition(universal: UniversalTheory, adapter, element, order: str = FORWARD):
    """Evaluate the transformation by pushing each generator's decomposition
    through the target operations, using only normalization on theta."""
    cat = universal.cat
    out = adapter.zero(element.context)
    for key, coeff in element.value.terms:
        cyc = Cycle(*key)
        value = adapter.theta(cat.compose(cyc.h, element.context))
        labels = reversed(cyc.bundles) if order == FORWARD else iter(cyc.bundles)
        for tok in labels:
            value = adapter.phi(tok, value)
        value = adapter.pushforward(cyc.h, element.context, value)
        out = adapter.add(out, adapter.scale(coeff, value))
    return out


def gysin_pullback(theory, f: str, a):
    """``f^!(a) = theta(f) . a``."""
    cat = theory.cat
    if not cat.is_specialized(f):
        raise NotSpecialized(f"{f} is not specialized")
    return theory.product(theory.theta(f), a)


def gysin_pushforward(theory, f: str, a):
    """``f_!(a) = f_*(a . theta(f))`` for ``a`` over ``id_X``."""
    cat = theory.cat
    if not cat.is_confined(f):
        raise NotConfined(f"{f} is not confined")
    if not cat.is_specialized(f):
        raise NotSpecialized(f"{f} is not specialized")
    return theory.pushforward(f, cat.identity(cat.dst(f)), theory.product(a, theory.theta(f)))


def product_square(cat: Category, x: str, y: str) -> Square:
    """Square exhibiting ``X x Y`` as the fiber product of ``X -> pt <- Y``."""
    return cat.pullback_square(cat.terminal_map(x), cat.terminal_map(y))


def exterior_covariant(theory, a, b):
    """``a x b = pi_Y^* a . b`` for ``a`` over ``X -> pt`` and ``b`` over ``Y -> pt``."""
    cat = theory.cat
    y = cat.src(theory.context(b))
    sq = cat.pullback_square(theory.context(a), cat.terminal_map(y))
    return theory.product(theory.pullback(sq, a), b)


def exterior_contravariant(theory, a, b):
    """``a x b = p1^* a . p2^* b`` for ``a`` over ``id_X`` and ``b`` over ``id_Y``."""
    cat = theory.cat
    x, y = cat.src(theory.context(a)), cat.src(theory.context(b))
    sq = product_square(cat, x, y)
    p1, p2 = sq.top, sq.left
    left = theory.pullback(cat.identity_square_horizontal(p1), a)
    right = theory.pullback(cat.identity_square_horizontal(p2), b)
    return theory.product(left, right)


def product_map(cat: Category, f: str, g: str) -> str:
    """``f x g: X x Y -> X' x Y'`` as the mediator into the target product."""
    src_sq = product_square(cat, cat.src(f), cat.src(g))
    dst_sq = product_square(cat, cat.dst(f), cat.dst(g))
    q1 = cat.compose(src_sq.top, f)
    q2 = cat.compose(src_sq.left, g)
    m = cat.mediator(dst_sq.right, dst_sq.bottom, q1, q2)
    if m is None:
        raise NotSpecialized(f"no product map for {f} and {g}")
    return m


def fundamental_class(theory, obj: str):
    cat = theory.cat
    pi = cat.terminal_map(obj)
    if not cat.is_specialized(pi):
        raise NotSpecialized(f"{pi} is not specialized")
    value = theory.theta(pi)
    via_gysin = gysin_pullback(theory, pi, theory.unit(cat.final_object))
    if not theory.equal(value, via_gysin):
        raise AssertionError(f"fundamental class of {obj} disagrees with the Gysin pullback of the unit")
    return value


def pushforward_covariant(theory, f: str, a):
    """``f_*`` on covariant groups: from ``X -> pt`` to ``Y -> pt``."""
    return theory.pushforward(f, theory.cat.terminal_map(theory.cat.dst(f)), a)


def pullback_contravariant(theory, f: str, a):
    """``f^*`` on contravariant groups: from ``id_Y`` to ``id_X``."""
    return theory.pullback(theory.cat.identity_square_horizontal(f), a)
