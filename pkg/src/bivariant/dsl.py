"""Expression language for bivariant elements.

Text is parsed into a tree of frozen nodes, then ``resolve`` fixes every
morphism reference to a canonical id and attaches an explicit context to
every leaf, so that ``render`` of a resolved tree is a canonical form that
parses back to itself.  ``Evaluator`` runs a resolved tree against the
universal theory and, for ``gamma`` and target literals, a target adapter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Any

from . import transform
from .catcore import Category, Square
from .errors import BivariantError, ContextError, ParseError, ResolveError

# ---------------------------------------------------------------- nodes


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Cyc(Node):
    h: str
    labels: tuple = ()
    over: str | None = None


@dataclass(frozen=True)
class Val(Node):
    values: tuple
    over: str | None = None


@dataclass(frozen=True)
class Zero(Node):
    over: str


@dataclass(frozen=True)
class Unit(Node):
    obj: str


@dataclass(frozen=True)
class Theta(Node):
    f: str


@dataclass(frozen=True)
class FClass(Node):
    obj: str


@dataclass(frozen=True)
class Prod(Node):
    a: Node
    b: Node


@dataclass(frozen=True)
class Push(Node):
    f: str
    g: str | None
    e: Node


@dataclass(frozen=True)
class Pull(Node):
    """``ref`` is a bottom morphism name, a square id, or an explicit Square."""

    ref: Any
    e: Node


@dataclass(frozen=True)
class Orient(Node):
    label: str
    e: Node


@dataclass(frozen=True)
class Gamma(Node):
    e: Node


@dataclass(frozen=True)
class GysinPull(Node):
    f: str
    e: Node


@dataclass(frozen=True)
class GysinPush(Node):
    f: str
    e: Node


@dataclass(frozen=True)
class Ext(Node):
    a: Node
    b: Node


@dataclass(frozen=True)
class Sum(Node):
    terms: tuple  # of (coefficient, node)


@dataclass(frozen=True)
class Const(Node):
    """An already computed value; renders as a literal."""

    value: Any


# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"\s*(?:(?P<word>[A-Za-z0-9_!.]+)|(?P<punct>[(),;+\-*]))")

KEYWORDS = {
    "cyc", "val", "zero", "unit", "theta", "fclass", "prod", "push", "pull", "orient",
    "gamma", "gysin_pull", "gysin_push", "ext", "sq",
}
KEYWORD_ALIASES = {"gysin!": "gysin_pull", "gysin_bang": "gysin_push"}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list:
    out, pos = [], 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        if m.group("word"):
            out.append(_Tok("word", m.group("word"), m.start("word")))
        else:
            out.append(_Tok(m.group("punct"), m.group("punct"), m.start("punct")))
        pos = m.end()
    out.append(_Tok("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind, expected=None) -> _Tok:
        tok = self.cur
        if tok.kind != kind:
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos,
                             expected or (kind,))
        self.i += 1
        return tok

    def word(self, what="identifier") -> str:
        return self.take("word", (what,)).text

    def accept(self, kind) -> bool:
        if self.cur.kind == kind:
            self.i += 1
            return True
        return False

    def integer(self) -> int:
        neg = self.accept("-")
        tok = self.take("word", ("integer",))
        if not tok.text.isdigit():
            raise ParseError(f"expected an integer, got {tok.text!r}", tok.pos, ("integer",))
        return -int(tok.text) if neg else int(tok.text)

    # expr := [sign] term (sign term)*
    def expr(self) -> Node:
        terms = []
        sign = 1
        if self.cur.kind in "+-" and self.cur.kind != "eof":
            sign = -1 if self.take(self.cur.kind).kind == "-" else 1
        terms.append(self.term(sign))
        while self.cur.kind in ("+", "-"):
            sign = -1 if self.take(self.cur.kind).kind == "-" else 1
            terms.append(self.term(sign))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(tuple(terms))

    def term(self, sign: int):
        coeff = 1
        tok = self.cur
        if tok.kind == "word" and tok.text.isdigit() and self.peek().kind == "*":
            coeff = int(tok.text)
            self.i += 2
        return sign * coeff, self.atom()

    def atom(self) -> Node:
        tok = self.cur
        name = KEYWORD_ALIASES.get(tok.text, tok.text)
        if tok.kind != "word" or name not in KEYWORDS or self.peek().kind != "(":
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos,
                             ("expression",))
        self.i += 2
        node = getattr(self, "atom_" + name)()
        self.take(")", ("')'",))
        if isinstance(node, (Cyc, Val)) and self.cur.kind == "word" and self.cur.text == "over":
            self.i += 1
            node = replace(node, over=self.word("morphism"))
        return node

    def comma(self):
        self.take(",", ("','",))

    def atom_cyc(self):
        h = self.word("morphism")
        self.take(";", ("';'",))
        labels = []
        if self.cur.kind == "word":
            labels.append(self.word("label"))
            while self.accept(","):
                labels.append(self.word("label"))
        return Cyc(h, tuple(labels))

    def atom_val(self):
        vals = []
        if self.cur.kind != ")":
            vals.append(self.integer())
            while self.accept(","):
                vals.append(self.integer())
        return Val(tuple(vals))

    def atom_zero(self):
        return Zero(self.word("morphism"))

    def atom_unit(self):
        return Unit(self.word("object"))

    def atom_theta(self):
        return Theta(self.word("morphism"))

    def atom_fclass(self):
        return FClass(self.word("object"))

    def atom_prod(self):
        a = self.expr()
        self.comma()
        return Prod(a, self.expr())

    def atom_ext(self):
        a = self.expr()
        self.comma()
        return Ext(a, self.expr())

    def atom_push(self):
        f = self.word("morphism")
        self.comma()
        g = None
        if self.cur.kind == "word" and self.peek().kind == ",":
            g = self.word("morphism")
            self.comma()
        return Push(f, g, self.expr())

    def atom_pull(self):
        if self.cur.kind == "word" and self.cur.text == "sq" and self.peek().kind == "(":
            self.i += 2
            parts = [self.word("morphism")]
            for _ in range(3):
                self.comma()
                parts.append(self.word("morphism"))
            self.take(")", ("')'",))
            ref = Square(*parts)
        else:
            ref = self.word("square or morphism")
        self.comma()
        return Pull(ref, self.expr())

    def atom_orient(self):
        label = self.word("label")
        self.comma()
        return Orient(label, self.expr())

    def atom_gamma(self):
        return Gamma(self.expr())

    def atom_gysin_pull(self):
        f = self.word("morphism")
        self.comma()
        return GysinPull(f, self.expr())

    def atom_gysin_push(self):
        f = self.word("morphism")
        self.comma()
        return GysinPush(f, self.expr())

    def atom_sq(self):
        raise ParseError("a square is only allowed as the first argument of pull", self.cur.pos)


def parse(text: str) -> Node:
    p = _Parser(text)
    node = p.expr()
    if p.cur.kind != "eof":
        raise ParseError(f"trailing input {p.cur.text!r}", p.cur.pos, ("end of input",))
    return node


# ------------------------------------------------------------ resolution


@dataclass(frozen=True)
class Hint:
    ctx: str | None = None
    dst: str | None = None
    identity: bool = False


NO_HINT = Hint()


def context(cat: Category, node: Node) -> str:
    """Context morphism of a resolved node."""
    if isinstance(node, (Cyc, Val)):
        return node.over
    if isinstance(node, Zero):
        return node.over
    if isinstance(node, Unit):
        return cat.identity(node.obj)
    if isinstance(node, Theta):
        return node.f
    if isinstance(node, FClass):
        return cat.terminal_map(node.obj)
    if isinstance(node, Prod):
        return cat.compose(context(cat, node.a), context(cat, node.b))
    if isinstance(node, Push):
        return node.g
    if isinstance(node, Pull):
        return node.ref.left
    if isinstance(node, (Orient, Gamma)):
        return context(cat, node.e)
    if isinstance(node, GysinPull):
        return cat.compose(node.f, context(cat, node.e))
    if isinstance(node, GysinPush):
        return cat.identity(cat.dst(node.f))
    if isinstance(node, Ext):
        x = cat.src(context(cat, node.a))
        y = cat.src(context(cat, node.b))
        apex = transform.product_square(cat, x, y).top
        apex_obj = cat.src(apex)
        if _covariant_pair(cat, context(cat, node.a), context(cat, node.b)):
            return cat.terminal_map(apex_obj)
        return cat.identity(apex_obj)
    if isinstance(node, Sum):
        return context(cat, node.terms[0][1])
    if isinstance(node, Const):
        return node.value.context
    raise TypeError(node)


def _covariant_pair(cat: Category, ca: str, cb: str) -> bool:
    # over the point both readings coincide; prefer the covariant one
    return cat.dst(ca) == cat.final_object and cat.dst(cb) == cat.final_object


def _leaf_context(cat: Category, x: str, hint: Hint) -> str:
    if hint.ctx is not None:
        if cat.src(hint.ctx) != x:
            raise ContextError(f"a cycle into {x} cannot sit over {hint.ctx}")
        return hint.ctx
    if hint.identity:
        return cat.identity(x)
    if hint.dst is not None:
        if hint.dst == x:
            return cat.identity(x)
        maps = cat.hom(x, hint.dst)
        if len(maps) == 1:
            return maps[0]
        raise ContextError(f"context of a cycle into {x} is ambiguous; add an 'over' clause")
    return cat.terminal_map(x)


def resolve(node: Node, cat: Category, hint: Hint = NO_HINT) -> Node:
    """Resolve ids and infer every leaf context bottom-up; returns a new tree."""
    m = cat.resolve
    if isinstance(node, Cyc):
        h = m(node.h)
        ctx = m(node.over) if node.over is not None else _leaf_context(cat, cat.dst(h), hint)
        if cat.dst(h) != cat.src(ctx):
            raise ContextError(f"cycle {h} does not land in the source of {ctx}")
        return Cyc(h, tuple(node.labels), ctx)
    if isinstance(node, Val):
        if node.over is not None:
            ctx = m(node.over)
        elif hint.ctx is not None:
            ctx = hint.ctx
        else:
            raise ContextError("a value literal needs an 'over' clause")
        return Val(tuple(node.values), ctx)
    if isinstance(node, Zero):
        return Zero(m(node.over))
    if isinstance(node, Unit):
        return Unit(cat.resolve_object(node.obj))
    if isinstance(node, Theta):
        return Theta(m(node.f))
    if isinstance(node, FClass):
        return FClass(cat.resolve_object(node.obj))
    if isinstance(node, Prod):
        b = resolve(node.b, cat, hint if hint.ctx is None else Hint(dst=cat.dst(hint.ctx)))
        a = resolve(node.a, cat, Hint(dst=cat.src(context(cat, b))))
        ca, cb = context(cat, a), context(cat, b)
        if cat.dst(ca) != cat.src(cb):
            raise ContextError(f"contexts {ca} and {cb} do not compose")
        return Prod(a, b)
    if isinstance(node, Push):
        f = m(node.f)
        if node.g is not None:
            g = m(node.g)
            e = resolve(node.e, cat, Hint(ctx=cat.compose(f, g)))
        else:
            inner_hint = Hint(dst=cat.dst(hint.ctx)) if hint.ctx else Hint(dst=hint.dst)
            e = resolve(node.e, cat, inner_hint)
            g = _factor(cat, f, context(cat, e))
        if cat.compose(f, g) != context(cat, e):
            raise ContextError(f"context {context(cat, e)} is not {g} after {f}")
        return Push(f, g, e)
    if isinstance(node, Pull):
        if isinstance(node.ref, Square):
            sq = Square(*(m(x) for x in node.ref.as_tuple()))
            e = resolve(node.e, cat, Hint(ctx=sq.right))
        else:
            name = node.ref
            if name in cat.square_ids and name not in cat.morphisms and name not in cat.aliases:
                sq = cat.square_by_id(name)
                e = resolve(node.e, cat, Hint(ctx=sq.right))
            else:
                g = m(name)
                e = resolve(node.e, cat, Hint(dst=cat.dst(g)))
                sq = cat.pullback_square(context(cat, e), g)
        if context(cat, e) != sq.right:
            raise ContextError(f"element over {context(cat, e)} is not over the right side of the square")
        if not cat.commutes(sq):
            raise ContextError(f"{cat.render_square(sq)} does not commute")
        return Pull(sq, e)
    if isinstance(node, Orient):
        return Orient(node.label, resolve(node.e, cat, hint))
    if isinstance(node, Gamma):
        return Gamma(resolve(node.e, cat, hint))
    if isinstance(node, GysinPull):
        f = m(node.f)
        inner = Hint(dst=cat.dst(hint.ctx)) if hint.ctx else Hint(dst=hint.dst)
        e = resolve(node.e, cat, inner)
        if cat.src(context(cat, e)) != cat.dst(f):
            raise ContextError(f"{f} does not map into the source of {context(cat, e)}")
        return GysinPull(f, e)
    if isinstance(node, GysinPush):
        f = m(node.f)
        e = resolve(node.e, cat, Hint(ctx=cat.identity(cat.src(f))))
        return GysinPush(f, e)
    if isinstance(node, Ext):
        contra = hint.identity or (hint.ctx is not None and cat.is_identity(hint.ctx))
        child = Hint(identity=True) if contra else NO_HINT
        a, b = resolve(node.a, cat, child), resolve(node.b, cat, child)
        ca, cb = context(cat, a), context(cat, b)
        both_cov = cat.dst(ca) == cat.final_object and cat.dst(cb) == cat.final_object
        both_contra = cat.is_identity(ca) and cat.is_identity(cb)
        if not (both_cov or both_contra):
            raise ContextError("exterior product needs two covariant or two contravariant factors")
        return Ext(a, b)
    if isinstance(node, Sum):
        terms = [(c, resolve(t, cat, hint)) for c, t in node.terms]
        ctxs = {context(cat, t) for _, t in terms}
        if len(ctxs) > 1:
            first = context(cat, terms[0][1])
            terms = [(c, resolve(t, cat, Hint(ctx=first))) for c, t in node.terms]
            ctxs = {context(cat, t) for _, t in terms}
            if len(ctxs) > 1:
                raise ContextError(f"summands sit over different contexts {sorted(ctxs)}")
        return Sum(tuple(terms))
    if isinstance(node, Const):
        return node
    raise TypeError(node)


def _factor(cat: Category, f: str, ctx: str) -> str:
    """The unique ``g`` with ``g . f = ctx``."""
    if cat.src(f) != cat.src(ctx):
        raise ContextError(f"{f} does not start at the source of {ctx}")
    cands = [g for g in cat.hom(cat.dst(f), cat.dst(ctx)) if cat.compose(f, g) == ctx]
    if len(cands) != 1:
        raise ContextError(f"cannot factor {ctx} through {f} uniquely; use push(f, g, e)")
    return cands[0]


def parse_expression(text: str, cat: Category | None = None) -> Node:
    node = parse(text)
    return resolve(node, cat) if cat is not None else node


# -------------------------------------------------------------- domains

OM, TARGET, ANY = "OM", "TARGET", "ANY"


def _join(*ds):
    ds = {d for d in ds if d != ANY}
    if len(ds) > 1:
        raise ContextError("expression mixes universal elements and target values")
    return ds.pop() if ds else ANY


def domain(node: Node) -> str:
    if isinstance(node, Cyc):
        return OM
    if isinstance(node, Val):
        return TARGET
    if isinstance(node, Const):
        from .universal import BivariantElement
        return OM if isinstance(node.value, BivariantElement) else TARGET
    if isinstance(node, (Zero, Unit, Theta, FClass)):
        return ANY
    if isinstance(node, Gamma):
        if domain(node.e) == TARGET:
            raise ContextError("gamma expects a universal element")
        return TARGET
    if isinstance(node, (Prod, Ext)):
        return _join(domain(node.a), domain(node.b))
    if isinstance(node, Sum):
        return _join(*(domain(t) for _, t in node.terms))
    return domain(node.e)


# ------------------------------------------------------------- rendering


def render_value(value) -> list:
    """Literal terms ``(coeff, atom_text)`` for a computed value."""
    from .universal import BivariantElement
    if isinstance(value, BivariantElement):
        if not value.value:
            return [(1, f"zero({value.context})")]
        return [(c, f"cyc({k[0]}; {','.join(k[1])}) over {value.context}") for k, c in value.value.terms]
    vals = ", ".join(str(v) for v in value.values)
    return [(1, f"val({vals}) over {value.context}")]


def _terms(node: Node, coeff: int = 1) -> list:
    if isinstance(node, Sum):
        out = []
        for c, t in node.terms:
            out.extend(_terms(t, coeff * c))
        return out
    if isinstance(node, Const):
        return [(coeff * c, text) for c, text in render_value(node.value)]
    return [(coeff, _atom(node))]


def render(node: Node) -> str:
    parts = []
    for i, (c, text) in enumerate(_terms(node)):
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        if i == 0:
            parts.append(("-" if c < 0 else "") + mag + text)
        else:
            parts.append(("- " if c < 0 else "+ ") + mag + text)
    return " ".join(parts)


def _atom(node: Node) -> str:
    if isinstance(node, Cyc):
        over = f" over {node.over}" if node.over else ""
        return f"cyc({node.h}; {','.join(node.labels)}){over}"
    if isinstance(node, Val):
        over = f" over {node.over}" if node.over else ""
        return f"val({', '.join(str(v) for v in node.values)}){over}"
    if isinstance(node, Zero):
        return f"zero({node.over})"
    if isinstance(node, Unit):
        return f"unit({node.obj})"
    if isinstance(node, Theta):
        return f"theta({node.f})"
    if isinstance(node, FClass):
        return f"fclass({node.obj})"
    if isinstance(node, Prod):
        return f"prod({render(node.a)}, {render(node.b)})"
    if isinstance(node, Ext):
        return f"ext({render(node.a)}, {render(node.b)})"
    if isinstance(node, Push):
        g = f"{node.g}, " if node.g else ""
        return f"push({node.f}, {g}{render(node.e)})"
    if isinstance(node, Pull):
        ref = node.ref
        if isinstance(ref, Square):
            ref = f"sq({ref.top}, {ref.left}, {ref.right}, {ref.bottom})"
        return f"pull({ref}, {render(node.e)})"
    if isinstance(node, Orient):
        return f"orient({node.label}, {render(node.e)})"
    if isinstance(node, Gamma):
        return f"gamma({render(node.e)})"
    if isinstance(node, GysinPull):
        return f"gysin_pull({node.f}, {render(node.e)})"
    if isinstance(node, GysinPush):
        return f"gysin_push({node.f}, {render(node.e)})"
    if isinstance(node, (Sum, Const)):
        return render(node)
    raise TypeError(node)


# ------------------------------------------------------------ evaluation


class Evaluator:
    """Evaluates resolved trees.  ``om`` is the universal theory (or a stand-in
    with the same interface); ``target`` is an optional adapter."""

    def __init__(self, om, target=None, cache: bool = True):
        self.om = om
        self.target = target
        self.cat = om.cat
        self._cache = {} if cache else None

    def evaluate(self, node: Node, where: str | None = None):
        d = domain(node) if where is None else where
        if d == ANY:
            d = TARGET if self.target is not None else OM
        return self._eval(node, d)

    def theory(self, d: str):
        if d == TARGET:
            if self.target is None:
                raise ContextError("expression needs a target theory (--target)")
            return self.target
        return self.om

    def _eval(self, node: Node, d: str):
        key = (node, d)
        if self._cache is not None:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        try:
            out = self._compute(node, d)
        except BivariantError as exc:
            if getattr(exc, "subexpression", None) is None:
                exc.subexpression = render(node)
            raise
        if self._cache is not None:
            self._cache[key] = out
        return out

    def _compute(self, node: Node, d: str):
        cat = self.cat
        th = self.theory(d)
        if isinstance(node, Cyc):
            return self.om.element(node.over, [((node.h, node.labels), 1)])
        if isinstance(node, Val):
            return self.theory(TARGET).literal(node.over, node.values)
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Zero):
            return th.zero(node.over)
        if isinstance(node, Unit):
            return th.unit(node.obj)
        if isinstance(node, Theta):
            return th.theta(node.f)
        if isinstance(node, FClass):
            return transform.fundamental_class(th, node.obj)
        if isinstance(node, Prod):
            return th.product(self._eval(node.a, d), self._eval(node.b, d))
        if isinstance(node, Push):
            return th.pushforward(node.f, node.g, self._eval(node.e, d))
        if isinstance(node, Pull):
            return th.pullback(node.ref, self._eval(node.e, d))
        if isinstance(node, Orient):
            return th.phi(node.label, self._eval(node.e, d))
        if isinstance(node, Gamma):
            return transform.gamma(self.theory(TARGET), self._eval(node.e, OM))
        if isinstance(node, GysinPull):
            return transform.gysin_pullback(th, node.f, self._eval(node.e, d))
        if isinstance(node, GysinPush):
            return transform.gysin_pushforward(th, node.f, self._eval(node.e, d))
        if isinstance(node, Ext):
            a, b = self._eval(node.a, d), self._eval(node.b, d)
            if _covariant_pair(cat, th.context(a), th.context(b)):
                return transform.exterior_covariant(th, a, b)
            return transform.exterior_contravariant(th, a, b)
        if isinstance(node, Sum):
            out = None
            for c, t in node.terms:
                v = th.scale(c, self._eval(t, d))
                out = v if out is None else th.add(out, v)
            return out
        raise TypeError(node)

    def render(self, value) -> str:
        from .universal import BivariantElement
        if isinstance(value, BivariantElement):
            return self.om.render(value)
        return self.theory(TARGET).render(value)
