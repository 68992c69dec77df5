"""Bounded, exhaustive (or seeded-sampled) certification of the bivariant
axioms, the orientation axioms, the universal transformation and additivity.

Every check is a list of rows.  A row enumerates *families*: a piece of
structural data (morphisms, squares, ...) together with operand pools; the
instances of a family are the cartesian product of its pools.  Each
instance builds a ``Law`` (two expression trees that must evaluate to equal
values) or runs a custom comparison.  Failures carry the two expressions in
the DSL so they can be replayed with ``bivariant eval``.
"""

from __future__ import annotations

import bisect
import json
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

from . import transform
from .catcore import Category, FiberedCategory, Square
from .dsl import (
    Const,
    Evaluator,
    Ext,
    FClass,
    Gamma,
    GysinPull,
    GysinPush,
    Orient,
    Prod,
    Pull,
    Push,
    Sum,
    Theta,
    Unit,
    render,
)
from .errors import BivariantError, NotApplicable, PullbackUnavailable
from .universal import Bounds, Cycle, UniversalTheory

PASS, FAIL, INCONCLUSIVE, NOT_APPLICABLE, BLOCKED = (
    "pass", "fail", "inconclusive", "not-applicable", "blocked")


@dataclass(frozen=True)
class SuiteBounds(Bounds):
    cap: int | None = None
    seed: int = 0

    def to_dict(self):
        return {"max_source": self.max_source, "max_bundles": self.max_bundles,
                "coeff_range": list(self.coeff_range), "cap": self.cap, "seed": self.seed}


@dataclass(frozen=True)
class Law:
    lhs: object
    rhs: object
    fresh: bool = False


@dataclass
class RowReport:
    name: str
    anchor: str
    status: str
    instances: int = 0
    passes: int = 0
    skips: int = 0
    total: int = 0
    sampled: bool = False
    first_counterexample: dict | None = None
    note: str | None = None

    @property
    def failures(self) -> int:
        return self.instances - self.passes - self.skips

    def to_dict(self):
        return {
            "name": self.name, "anchor": self.anchor, "status": self.status,
            "instances": self.instances, "passes": self.passes, "skips": self.skips,
            "failures": self.failures, "population": self.total, "sampled": self.sampled,
            "first_counterexample": self.first_counterexample, "note": self.note,
        }


@dataclass
class CheckReport:
    check: str
    category: str
    theory: str
    bounds: dict
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status != FAIL for r in self.rows)

    def row(self, name: str) -> RowReport:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def failed(self) -> list:
        return [r.name for r in self.rows if r.status == FAIL]

    def to_dict(self):
        return {"check": self.check, "category": self.category, "theory": self.theory,
                "bounds": self.bounds, "ok": self.ok, "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.check}: {self.theory} on {self.category}"]
        width = max([len(r.name) for r in self.rows] + [4])
        lines.append(f"  {'row':<{width}}  {'status':<14} {'inst':>7} {'pass':>7} {'skip':>6} {'fail':>5}")
        for r in self.rows:
            lines.append(f"  {r.name:<{width}}  {r.status:<14} {r.instances:>7} {r.passes:>7} "
                         f"{r.skips:>6} {r.failures:>5}")
            if r.first_counterexample:
                for key, val in r.first_counterexample.items():
                    lines.append(f"      {key}: {val}")
            if r.note:
                lines.append(f"      note: {r.note}")
        lines.append("  result: " + ("all rows pass" if self.ok else "FAILURES: " + ", ".join(self.failed())))
        return "\n".join(lines) + "\n"


@dataclass
class Row:
    name: str
    anchor: str
    families: Callable
    build: Callable


# ------------------------------------------------------------- structure


class Structures:
    """Structural data of a category restricted to objects within the bound."""

    def __init__(self, cat: Category, bound):
        self.cat = cat
        self.bound = bound

    def ok(self, *objs) -> bool:
        return all(self.cat.within(o, self.bound) for o in objs)

    @cached_property
    def objects(self):
        return self.cat.objects_within(self.bound)

    @cached_property
    def morphisms(self):
        cat = self.cat
        return [m for m in cat.morphisms if self.ok(cat.src(m), cat.dst(m))]

    @cached_property
    def by_src(self):
        out = {o: [] for o in self.cat.objects}
        for m in self.morphisms:
            out[self.cat.src(m)].append(m)
        return out

    @cached_property
    def pairs(self):
        return [(f, g) for f in self.morphisms for g in self.by_src[self.cat.dst(f)]]

    @cached_property
    def triples(self):
        return [(f, g, h) for f, g in self.pairs for h in self.by_src[self.cat.dst(g)]]

    def _square_ok(self, sq: Square) -> bool:
        cat = self.cat
        return self.ok(cat.src(sq.top), cat.dst(sq.top), cat.src(sq.bottom), cat.dst(sq.bottom))

    @cached_property
    def squares(self):
        """Independent squares within the bound, in a deterministic order."""
        cat = self.cat
        found = []
        for (left, right), pb in cat.pullbacks.items():
            sq = Square(pb.proj_left, pb.proj_right, left, right)
            found.extend([sq, sq.transpose()])
        found.extend(cat.declared_squares)
        for m in self.morphisms:
            found.append(cat.identity_square_vertical(m))
            found.append(cat.identity_square_horizontal(m))
        seen, out = set(), []
        for sq in found:
            key = sq.as_tuple()
            if key in seen or not self._square_ok(sq):
                continue
            seen.add(key)
            if cat.is_independent(sq):
                out.append(sq)
        out.sort(key=lambda s: tuple(cat.rank(m) for m in s.as_tuple()))
        return out

    @cached_property
    def stacked(self):
        """Pairs (upper, lower) with ``upper.bottom == lower.top``."""
        by_top = {}
        for sq in self.squares:
            by_top.setdefault(sq.top, []).append(sq)
        return [(u, lo) for u in self.squares for lo in by_top.get(u.bottom, ())]

    @cached_property
    def side_by_side(self):
        """Pairs (right_sq, left_sq) with ``left_sq.right == right_sq.left``."""
        by_right = {}
        for sq in self.squares:
            by_right.setdefault(sq.right, []).append(sq)
        return [(s1, s2) for s1 in self.squares for s2 in by_right.get(s1.left, ())]

    def product_ok(self, x, y) -> bool:
        cat = self.cat
        try:
            sq = transform.product_square(cat, x, y)
        except (PullbackUnavailable, BivariantError):
            return False
        return self.ok(cat.src(sq.top))

    @cached_property
    def product_pairs(self):
        """Pairs (f, g) whose source and target products exist within the bound."""
        cat = self.cat
        out = []
        for f in self.morphisms:
            for g in self.morphisms:
                if self.product_ok(cat.src(f), cat.src(g)) and self.product_ok(cat.dst(f), cat.dst(g)):
                    out.append((f, g))
        return out


# ----------------------------------------------------------------- runner


class Session:
    """Shared state of a check run: theory, evaluator, operand pools."""

    def __init__(self, cat: Category, fc: FiberedCategory | None, theory, bounds: SuiteBounds,
                 universal=None):
        self.cat = cat
        self.fc = fc if fc is not None else FiberedCategory.trivial()
        self.theory = theory
        self.bounds = bounds
        self.st = Structures(cat, bounds.max_source)
        self.is_universal = isinstance(theory, UniversalTheory)
        if self.is_universal:
            self.om = theory
            self.target = None
            self.where = "OM"
        else:
            self.om = universal if universal is not None else UniversalTheory(cat, self.fc)
            self.target = theory
            self.where = "TARGET"
        self._pools = {}
        self._gpools = {}

    def evaluator(self, cache=True) -> Evaluator:
        return Evaluator(self.om, self.target, cache=cache)

    def pool(self, ctx: str) -> list:
        if ctx not in self._pools:
            self._pools[ctx] = [Const(v) for v in self.theory.elements(ctx, self.bounds)]
        return self._pools[ctx]

    def gens(self, ctx: str) -> list:
        """Universal generators as constants (used by the transformation rows)."""
        if ctx not in self._gpools:
            self._gpools[ctx] = [Const(v) for v in self.om.elements(ctx, self.bounds)]
        return self._gpools[ctx]

    def labels(self, obj: str) -> list:
        if not self.theory.has_orientation:
            return []
        return list(self.fc.labels_over(obj))

    @cached_property
    def coeffs(self) -> list:
        lo, hi = self.bounds.coeff_range
        return [c for c in range(lo, hi + 1)]

    def pull_label(self, f: str, tok: str) -> str:
        return self.fc.pull(f, tok)


def _witness(law: Law, lhs=None, rhs=None, ev=None, error=None) -> dict:
    out = {"lhs": render(law.lhs), "rhs": render(law.rhs)}
    if ev is not None and lhs is not None:
        out["lhs_value"] = ev.render(lhs)
        out["rhs_value"] = ev.render(rhs)
    if error is not None:
        out["error"] = f"{type(error).__name__}: {error}"
        sub = getattr(error, "subexpression", None)
        if sub:
            out["in"] = sub
    return out


def run_row(session: Session, row: Row) -> RowReport:
    families = list(row.families(session))
    sizes = [math.prod(len(p) for p in pools) for _, pools in families]
    total = sum(sizes)
    report = RowReport(row.name, row.anchor, NOT_APPLICABLE, total=total)
    if total == 0:
        report.note = "no instances within bounds"
        return report
    cap = session.bounds.cap
    if cap is not None and total > cap:
        rng = random.Random(f"{session.bounds.seed}:{row.name}")
        indices = sorted(rng.sample(range(total), cap))
        report.sampled = True
    else:
        indices = range(total)
    offsets = [0]
    for s in sizes:
        offsets.append(offsets[-1] + s)
    ev = session.evaluator()
    for idx in indices:
        fam = bisect.bisect_right(offsets, idx) - 1
        struct, pools = families[fam]
        rem = idx - offsets[fam]
        ops = [None] * len(pools)
        for k in range(len(pools) - 1, -1, -1):
            rem, j = divmod(rem, len(pools[k]))
            ops[k] = pools[k][j]
        report.instances += 1
        outcome, witness = _run_instance(session, ev, row, struct, ops)
        if outcome == PASS:
            report.passes += 1
        elif outcome == "skip":
            report.skips += 1
        elif report.first_counterexample is None:
            report.first_counterexample = witness
    if report.failures:
        report.status = FAIL
    elif report.skips * 2 > report.instances:
        report.status = INCONCLUSIVE
    else:
        report.status = PASS
    return report


def _run_instance(session: Session, ev: Evaluator, row: Row, struct, ops):
    try:
        law = row.build(session, struct, *ops)
    except PullbackUnavailable:
        return "skip", None
    except BivariantError as exc:
        return FAIL, {"structure": repr(struct), "error": f"{type(exc).__name__}: {exc}"}
    if law is None:
        return "skip", None
    if isinstance(law, tuple):
        ok, witness = law
        return (PASS, None) if ok else (FAIL, witness)
    try:
        if law.fresh:
            lhs = session.evaluator(cache=False).evaluate(law.lhs, session.where)
            rhs = session.evaluator(cache=False).evaluate(law.rhs, session.where)
        else:
            lhs = ev.evaluate(law.lhs, session.where)
            rhs = ev.evaluate(law.rhs, session.where)
    except PullbackUnavailable:
        return "skip", None
    except BivariantError as exc:
        return FAIL, _witness(law, error=exc)
    if session.theory.equal(lhs, rhs) if session.target is None else session.target.equal(lhs, rhs):
        return PASS, None
    return FAIL, _witness(law, lhs, rhs, ev)


def run_rows(session: Session, rows, check: str) -> CheckReport:
    report = CheckReport(check, session.cat.name or "category", session.theory.name,
                         session.bounds.to_dict())
    for row in rows:
        report.rows.append(run_row(session, row))
    return report


# ------------------------------------------------------------------ rows
# helpers for families


def _single(struct):
    return [(struct, [])]


def _conf(cat, *ms):
    return all(cat.is_confined(m) for m in ms)


def _spec(cat, *ms):
    return all(cat.is_specialized(m) for m in ms)


def _cov(session, obj):
    """Covariant context of ``obj`` when it lies within the bound."""
    cat = session.cat
    pi = cat.terminal_map(obj)
    return pi if session.st.ok(cat.final_object) else None


def _hsq(cat, f):
    return cat.identity_square_horizontal(f)


# -- bivariant axioms


def fam_b1(s):
    return [((f, g, h), [s.pool(f), s.pool(g), s.pool(h)]) for f, g, h in s.st.triples]


def build_b1(s, st, a, b, c):
    return Law(Prod(Prod(a, b), c), Prod(a, Prod(b, c)))


def fam_b2(s):
    cat = s.cat
    return [((f, g, k), [s.pool(cat.compose_chain(f, g, k))])
            for f, g, k in s.st.triples if _conf(cat, f, g)]


def build_b2(s, st, a):
    cat = s.cat
    f, g, k = st
    return Law(Push(g, k, Push(f, cat.compose(g, k), a)), Push(cat.compose(f, g), k, a))


def fam_b3(s):
    return [((s1, s2), [s.pool(s1.right)]) for s1, s2 in s.st.side_by_side]


def build_b3(s, st, a):
    s1, s2 = st
    outer = s.cat.paste_horizontal(s1, s2)
    return Law(Pull(s2, Pull(s1, a)), Pull(outer, a))


def fam_b4(s):
    cat = s.cat
    return [((f, g, h), [s.pool(cat.compose(f, g)), s.pool(h)])
            for f, g, h in s.st.triples if _conf(cat, f)]


def build_b4(s, st, a, b):
    cat = s.cat
    f, g, h = st
    return Law(Push(f, cat.compose(g, h), Prod(a, b)), Prod(Push(f, g, a), b))


def fam_b5(s):
    return [((u, lo), [s.pool(u.right), s.pool(lo.right)]) for u, lo in s.st.stacked]


def build_b5(s, st, a, b):
    u, lo = st
    outer = s.cat.paste_vertical(u, lo)
    return Law(Pull(outer, Prod(a, b)), Prod(Pull(u, a), Pull(lo, b)))


def fam_b6(s):
    cat = s.cat
    return [((u, lo), [s.pool(cat.compose(u.right, lo.right))])
            for u, lo in s.st.stacked if _conf(cat, u.right)]


def build_b6(s, st, a):
    u, lo = st
    outer = s.cat.paste_vertical(u, lo)
    return Law(Pull(lo, Push(u.right, lo.right, a)), Push(u.left, lo.left, Pull(outer, a)))


def fam_b7(s):
    cat = s.cat
    out = []
    for sq in s.st.squares:
        if not _conf(cat, sq.bottom):
            continue
        for h in s.st.by_src[cat.dst(sq.right)]:
            out.append(((sq, h), [s.pool(sq.right), s.pool(cat.compose(sq.bottom, h))]))
    return out


def build_b7(s, st, a, b):
    cat = s.cat
    sq, h = st
    return Law(Push(sq.top, cat.compose(sq.right, h), Prod(Pull(sq, a), b)),
               Prod(a, Push(sq.bottom, h, b)))


def fam_morph_pool(s):
    return [(f, [s.pool(f)]) for f in s.st.morphisms]


def build_unit_right(s, f, a):
    return Law(Prod(a, Unit(s.cat.dst(f))), a)


def build_unit_left(s, f, a):
    return Law(Prod(Unit(s.cat.src(f)), a), a)


def fam_morphisms(s):
    return [(f, []) for f in s.st.morphisms]


def build_unit_pull(s, g):
    cat = s.cat
    return Law(Pull(_hsq(cat, g), Unit(cat.dst(g))), Unit(cat.src(g)))


def fam_commutativity(s):
    cat = s.cat
    return [(sq, [s.pool(sq.right), s.pool(sq.bottom)]) for sq in s.st.squares
            if cat.is_independent(sq.transpose())]


def build_commutativity(s, sq, a, b):
    return Law(Prod(Pull(sq, a), b), Prod(Pull(sq.transpose(), b), a))


def fam_theta_comp(s):
    cat = s.cat
    return [((f, g), []) for f, g in s.st.pairs if _spec(cat, f, g)]


def build_theta_comp(s, st):
    f, g = st
    return Law(Theta(s.cat.compose(f, g)), Prod(Theta(f), Theta(g)))


def fam_objects(s):
    return [(x, []) for x in s.st.objects]


def build_theta_id(s, x):
    return Law(Theta(s.cat.identity(x)), Unit(x))


def fam_theta_nice(s):
    return [(sq, []) for sq in s.st.squares if _spec(s.cat, sq.right)]


def build_theta_nice(s, sq):
    return Law(Theta(sq.left), Pull(sq, Theta(sq.right)))


def fam_lin_prod(s):
    return [((f, g), [s.coeffs, s.pool(f), s.pool(f), s.pool(g)]) for f, g in s.st.pairs]


def build_lin_prod(s, st, c, a1, a2, b):
    return Law(Prod(Sum(((c, a1), (1, a2))), b), Sum(((c, Prod(a1, b)), (1, Prod(a2, b)))))


def fam_lin_push(s):
    cat = s.cat
    return [((f, g), [s.coeffs, s.pool(cat.compose(f, g)), s.pool(cat.compose(f, g))])
            for f, g in s.st.pairs if _conf(cat, f)]


def build_lin_push(s, st, c, a1, a2):
    f, g = st
    return Law(Push(f, g, Sum(((c, a1), (1, a2)))),
               Sum(((c, Push(f, g, a1)), (1, Push(f, g, a2)))))


def fam_lin_pull(s):
    return [(sq, [s.coeffs, s.pool(sq.right), s.pool(sq.right)]) for sq in s.st.squares]


def build_lin_pull(s, sq, c, a1, a2):
    return Law(Pull(sq, Sum(((c, a1), (1, a2)))), Sum(((c, Pull(sq, a1)), (1, Pull(sq, a2)))))


# -- derived structures on the covariant and contravariant restrictions


def fam_gysin_pull_functorial(s):
    cat = s.cat
    out = []
    for f, g in s.st.pairs:
        pi = _cov(s, cat.dst(g))
        if pi and _spec(cat, f, g):
            out.append(((f, g), [s.pool(pi)]))
    return out


def build_gysin_pull_functorial(s, st, a):
    f, g = st
    return Law(GysinPull(s.cat.compose(f, g), a), GysinPull(f, GysinPull(g, a)))


def fam_gysin_push_functorial(s):
    cat = s.cat
    return [((f, g), [s.pool(cat.identity(cat.src(f)))]) for f, g in s.st.pairs
            if _conf(cat, f, g) and _spec(cat, f, g)]


def build_gysin_push_functorial(s, st, a):
    f, g = st
    return Law(GysinPush(s.cat.compose(f, g), a), GysinPush(g, GysinPush(f, a)))


def fam_base_change_cov(s):
    cat = s.cat
    out = []
    for sq in s.st.squares:
        pi = _cov(s, cat.src(sq.bottom))
        if pi and _spec(cat, sq.right) and _conf(cat, sq.bottom):
            out.append((sq, [s.pool(pi)]))
    return out


def build_base_change_cov(s, sq, a):
    cat = s.cat
    pi_y = cat.terminal_map(cat.dst(sq.right))
    pi_x = cat.terminal_map(cat.src(sq.right))
    return Law(GysinPull(sq.right, Push(sq.bottom, pi_y, a)),
               Push(sq.top, pi_x, GysinPull(sq.left, a)))


def fam_base_change_contra(s):
    cat = s.cat
    return [(sq, [s.pool(cat.identity(cat.src(sq.right)))]) for sq in s.st.squares
            if _spec(cat, sq.right) and _conf(cat, sq.right)]


def build_base_change_contra(s, sq, a):
    cat = s.cat
    return Law(Pull(_hsq(cat, sq.bottom), GysinPush(sq.right, a)),
               GysinPush(sq.left, Pull(_hsq(cat, sq.top), a)))


def _ext_families(s, kind):
    cat = s.cat
    out = []
    if not s.st.ok(cat.final_object):
        return out
    for f, g in s.st.product_pairs:
        if kind in ("gysin_pull",) and not _spec(cat, f, g):
            continue
        if kind in ("push",) and not _conf(cat, f, g):
            continue
        if kind == "gysin_push" and not (_spec(cat, f, g) and _conf(cat, f, g)):
            continue
        if kind == "gysin_pull":
            pools = [s.pool(cat.terminal_map(cat.dst(f))), s.pool(cat.terminal_map(cat.dst(g)))]
        elif kind == "push":
            pools = [s.pool(cat.terminal_map(cat.src(f))), s.pool(cat.terminal_map(cat.src(g)))]
        elif kind == "pull":
            pools = [s.pool(cat.identity(cat.dst(f))), s.pool(cat.identity(cat.dst(g)))]
        else:
            pools = [s.pool(cat.identity(cat.src(f))), s.pool(cat.identity(cat.src(g)))]
        out.append(((f, g), pools))
    return out


def build_ext_gysin_pull(s, st, a, b):
    f, g = st
    fg = transform.product_map(s.cat, f, g)
    return Law(GysinPull(fg, Ext(a, b)), Ext(GysinPull(f, a), GysinPull(g, b)))


def build_ext_push(s, st, a, b):
    cat = s.cat
    f, g = st
    fg = transform.product_map(cat, f, g)
    target = cat.terminal_map(cat.dst(fg))
    return Law(Push(fg, target, Ext(a, b)),
               Ext(Push(f, cat.terminal_map(cat.dst(f)), a), Push(g, cat.terminal_map(cat.dst(g)), b)))


def build_ext_pull(s, st, a, b):
    cat = s.cat
    f, g = st
    fg = transform.product_map(cat, f, g)
    return Law(Pull(_hsq(cat, fg), Ext(a, b)), Ext(Pull(_hsq(cat, f), a), Pull(_hsq(cat, g), b)))


def build_ext_gysin_push(s, st, a, b):
    f, g = st
    fg = transform.product_map(s.cat, f, g)
    return Law(GysinPush(fg, Ext(a, b)), Ext(GysinPush(f, a), GysinPush(g, b)))


# -- universal-only rows without labels


def fam_restriction(s):
    cat = s.cat
    b0 = Bounds(s.bounds.max_source, 0)
    gens = lambda ctx: s.om.generators(ctx, b0)
    out = []
    for f, g in s.st.pairs:
        out.append((("product", f, g), [gens(f), gens(g)]))
        if _conf(cat, f):
            out.append((("pushforward", f, g), [gens(cat.compose(f, g))]))
    for sq in s.st.squares:
        out.append((("pullback", sq), [gens(sq.right)]))
    return out


def build_restriction(s, st, *cycles):
    """Compare against label-free formulas computed by a different route."""
    cat, om = s.cat, s.om
    kind = st[0]
    if kind == "product":
        _, f, g = st
        c1, c2 = cycles
        got = om.product(om.cycle(f, c1.h), om.cycle(g, c2.h))
        # V x_X (X x_Y W) is V x_Y W along f . h
        pb = cat.fiber_product(cat.compose(c1.h, f), c2.h)
        expect_h = cat.compose(pb.proj_left, c1.h)
        ctx = cat.compose(f, g)
    elif kind == "pushforward":
        _, f, g = st
        (c,) = cycles
        got = om.pushforward(f, g, om.cycle(cat.compose(f, g), c.h))
        expect_h = cat.compose(c.h, f)
        ctx = g
    else:
        _, sq = st
        (c,) = cycles
        got = om.pullback(sq, om.cycle(sq.right, c.h))
        # V x_X X' is V x_Y Y' along f . h, mapped to X' by the mediator
        pb = cat.fiber_product(cat.compose(c.h, sq.right), sq.bottom)
        m = cat.mediator(sq.right, sq.bottom, cat.compose(pb.proj_left, c.h), pb.proj_right) \
            if cat.has_fiber_product(sq.right, sq.bottom) \
            and cat.pullback_square(sq.right, sq.bottom) == sq else None
        if m is None:
            return None
        expect_h = m
        ctx = sq.left
    gens = got.generators()
    ok = (got.context == ctx and len(gens) == 1 and got.value.terms[0][1] == 1
          and not gens[0].bundles and cat.isomorphic_over(gens[0].h, expect_h) is not None)
    return ok, {"operation": kind, "structure": repr(st[1:]),
                "operands": [repr(c) for c in cycles], "got": got.render(),
                "expected": f"[{expect_h} ; ] over {ctx}"}


def fam_ring(s):
    cat = s.cat
    b0 = Bounds(s.bounds.max_source, 0)
    return [(x, [s.om.generators(cat.identity(x), b0)] * 2) for x in s.st.objects]


def build_ring(s, x, c1, c2):
    cat, om = s.cat, s.om
    idx = cat.identity(x)
    got = om.product(om.cycle(idx, c1.h), om.cycle(idx, c2.h))
    pb = cat.fiber_product(c1.h, c2.h)
    cup = cat.compose(pb.proj_left, c1.h)
    gens = got.generators()
    ok = len(gens) == 1 and got.value.terms[0][1] == 1 and cat.isomorphic_over(gens[0].h, cup) is not None
    return ok, {"object": x, "operands": [c1.h, c2.h], "got": got.render(),
                "fiber_product": f"[{cup} ; ] over {idx}"}


# -- orientation rows


def fam_o1(s):
    return [(f, [s.pool(f), s.labels(s.cat.src(f))]) for f in s.st.morphisms]


def build_o1(s, f, a, tok):
    same = s.pull_label(s.cat.identity(s.cat.src(f)), tok)
    return Law(Orient(tok, a), Orient(same, a), fresh=True)


def fam_o2(s):
    out = []
    for f in s.st.morphisms:
        labels = s.labels(s.cat.src(f))
        out.append((f, [s.pool(f), labels, labels]))
    return out


def build_o2(s, f, a, t1, t2):
    return Law(Orient(t1, Orient(t2, a)), Orient(t2, Orient(t1, a)))


def fam_o3a(s):
    return [((f, g), [s.pool(f), s.pool(g), s.labels(s.cat.src(f))]) for f, g in s.st.pairs]


def build_o3a(s, st, a, b, tok):
    return Law(Orient(tok, Prod(a, b)), Prod(Orient(tok, a), b))


def fam_o3b(s):
    return [((f, g), [s.pool(f), s.pool(g), s.labels(s.cat.dst(f))]) for f, g in s.st.pairs]


def build_o3b(s, st, a, b, tok):
    f, _ = st
    return Law(Orient(s.pull_label(f, tok), Prod(a, b)), Prod(a, Orient(tok, b)))


def fam_o4(s):
    cat = s.cat
    return [((f, g), [s.pool(cat.compose(f, g)), s.labels(cat.dst(f))])
            for f, g in s.st.pairs if _conf(cat, f)]


def build_o4(s, st, a, tok):
    f, g = st
    return Law(Push(f, g, Orient(s.pull_label(f, tok), a)), Orient(tok, Push(f, g, a)))


def fam_o5(s):
    return [(sq, [s.pool(sq.right), s.labels(s.cat.dst(sq.top))]) for sq in s.st.squares]


def build_o5(s, sq, a, tok):
    return Law(Pull(sq, Orient(tok, a)), Orient(s.pull_label(sq.top, tok), Pull(sq, a)))


def fam_lin_orient(s):
    return [(f, [s.coeffs, s.pool(f), s.pool(f), s.labels(s.cat.src(f))]) for f in s.st.morphisms]


def build_lin_orient(s, f, c, a1, a2, tok):
    return Law(Orient(tok, Sum(((c, a1), (1, a2)))),
               Sum(((c, Orient(tok, a1)), (1, Orient(tok, a2)))))


def fam_phi_exterior(s):
    cat = s.cat
    out = []
    if not s.st.ok(cat.final_object):
        return out
    for x in s.st.objects:
        for y in s.st.objects:
            if s.st.product_ok(x, y):
                out.append(((x, y), [s.pool(cat.terminal_map(x)), s.pool(cat.terminal_map(y)),
                                     s.labels(x)]))
    return out


def build_phi_exterior(s, st, a, b, tok):
    x, y = st
    p1 = transform.product_square(s.cat, x, y).top
    return Law(Orient(s.pull_label(p1, tok), Ext(a, b)), Ext(Orient(tok, a), b))


def fam_phi_cov_push(s):
    cat = s.cat
    if not s.st.ok(cat.final_object):
        return []
    return [(f, [s.pool(cat.terminal_map(cat.src(f))), s.labels(cat.dst(f))])
            for f in s.st.morphisms if _conf(cat, f)]


def build_phi_cov_push(s, f, a, tok):
    pi = s.cat.terminal_map(s.cat.dst(f))
    return Law(Push(f, pi, Orient(s.pull_label(f, tok), a)), Orient(tok, Push(f, pi, a)))


def fam_phi_gysin_pull(s):
    cat = s.cat
    if not s.st.ok(cat.final_object):
        return []
    return [(f, [s.pool(cat.terminal_map(cat.dst(f))), s.labels(cat.dst(f))])
            for f in s.st.morphisms if _spec(cat, f)]


def build_phi_gysin_pull(s, f, a, tok):
    return Law(GysinPull(f, Orient(tok, a)), Orient(s.pull_label(f, tok), GysinPull(f, a)))


def fam_phi_contra_pull(s):
    cat = s.cat
    return [(f, [s.pool(cat.identity(cat.dst(f))), s.labels(cat.dst(f))]) for f in s.st.morphisms]


def build_phi_contra_pull(s, f, a, tok):
    sq = _hsq(s.cat, f)
    return Law(Pull(sq, Orient(tok, a)), Orient(s.pull_label(f, tok), Pull(sq, a)))


def fam_phi_gysin_push(s):
    cat = s.cat
    return [(f, [s.pool(cat.identity(cat.src(f))), s.labels(cat.dst(f))])
            for f in s.st.morphisms if _spec(cat, f) and _conf(cat, f)]


def build_phi_gysin_push(s, f, a, tok):
    return Law(GysinPush(f, Orient(s.pull_label(f, tok), a)), Orient(tok, GysinPush(f, a)))


def fam_obs_star(s):
    return [(f, [s.pool(f), s.labels(s.cat.src(f))]) for f in s.st.morphisms]


def build_obs_star(s, f, a, tok):
    return Law(Orient(tok, a), Prod(Orient(tok, Unit(s.cat.src(f))), a))


def fam_obs_decomp(s):
    return [(f, [s.pool(f)]) for f in s.st.morphisms]


def _decomposition_tree(cat, ctx, cyc: Cycle):
    node = Theta(cat.compose(cyc.h, ctx))
    for tok in reversed(cyc.bundles):
        node = Orient(tok, node)
    return Push(cyc.h, ctx, node)


def build_obs_decomp(s, f, a):
    (cyc,) = a.value.generators()
    return Law(a, _decomposition_tree(s.cat, f, cyc))


# -- transformation rows


def fam_spec_morphisms(s):
    return [(f, []) for f in s.st.morphisms if _spec(s.cat, f)]


def build_gamma_norm(s, f):
    return Law(Gamma(Theta(f)), Theta(f))


def fam_gamma_norm_labels(s):
    return [(f, [s.labels(s.cat.src(f))]) for f in s.st.morphisms if _spec(s.cat, f)]


def build_gamma_norm_labels(s, f, tok):
    return Law(Gamma(Orient(tok, Theta(f))), Orient(tok, Theta(f)))


def fam_cov_objects(s):
    cat = s.cat
    if not s.st.ok(cat.final_object):
        return []
    return [(x, []) for x in s.st.objects if _spec(cat, cat.terminal_map(x))]


def build_gamma_fclass(s, x):
    return Law(Gamma(FClass(x)), FClass(x))


def build_gamma_unit(s, x):
    return Law(Gamma(Unit(x)), Unit(x))


def fam_gamma_prod(s):
    return [((f, g), [s.gens(f), s.gens(g)]) for f, g in s.st.pairs]


def build_gamma_prod(s, st, a, b):
    return Law(Gamma(Prod(a, b)), Prod(Gamma(a), Gamma(b)))


def fam_gamma_push(s):
    cat = s.cat
    return [((f, g), [s.gens(cat.compose(f, g))]) for f, g in s.st.pairs if _conf(cat, f)]


def build_gamma_push(s, st, a):
    f, g = st
    return Law(Gamma(Push(f, g, a)), Push(f, g, Gamma(a)))


def fam_gamma_pull(s):
    return [(sq, [s.gens(sq.right)]) for sq in s.st.squares]


def build_gamma_pull(s, sq, a):
    return Law(Gamma(Pull(sq, a)), Pull(sq, Gamma(a)))


def fam_gamma_orient(s):
    return [(f, [s.gens(f), s.labels(s.cat.src(f))]) for f in s.st.morphisms]


def build_gamma_orient(s, f, a, tok):
    return Law(Gamma(Orient(tok, a)), Orient(tok, Gamma(a)))


def fam_gamma_linear(s):
    return [(f, [s.coeffs, s.gens(f), s.gens(f)]) for f in s.st.morphisms]


def build_gamma_linear(s, f, c, a1, a2):
    return Law(Gamma(Sum(((c, a1), (1, a2)))), Sum(((c, Gamma(a1)), (1, Gamma(a2)))))


def fam_gamma_gens(s):
    return [(f, [s.gens(f)]) for f in s.st.morphisms]


def build_gamma_representative(s, f, a):
    """The closed form gives the same value on every representative of a class."""
    cat, target = s.cat, s.target
    (cyc,) = a.value.generators()
    base = transform.gamma_of_cycle(target, f, cyc)
    v = cat.src(cyc.h)
    for obj in cat.objects:
        for g in cat.isos(obj, v):
            raw = Cycle(cat.compose(g, cyc.h), tuple(s.fc.pull(g, t) for t in cyc.bundles))
            other = transform.gamma_of_cycle(target, f, raw)
            if not target.equal(base, other):
                return False, {"context": f, "canonical": cyc.render(), "representative": raw.render(),
                               "canonical_value": target.render(base),
                               "representative_value": target.render(other)}
    return True, None


def build_gamma_closed_form(s, f, a):
    """Closed form in both fold orders against the generator decomposition."""
    om, target = s.om, s.target
    element = a.value
    (cyc,) = element.generators()
    rebuilt = transform.decompose(om, f, cyc)
    values = {
        "closed_form_forward": transform.gamma(target, element, transform.FORWARD),
        "closed_form_reverse": transform.gamma(target, element, transform.REVERSE),
        "decomposition_forward": transform.gamma_via_decomposition(om, target, element, transform.FORWARD),
        "decomposition_reverse": transform.gamma_via_decomposition(om, target, element, transform.REVERSE),
    }
    first = values["closed_form_forward"]
    ok = rebuilt == element and all(target.equal(first, v) for v in values.values())
    witness = {"generator": render(a), "decomposition": rebuilt.render()}
    witness.update({k: target.render(v) for k, v in values.items()})
    return ok, witness


# ------------------------------------------------------------ row tables

A = "product is associative"
BIVARIANT_ROWS = [
    Row("B-1", A, fam_b1, build_b1),
    Row("B-2", "pushforward is functorial", fam_b2, build_b2),
    Row("B-3", "pullback is functorial", fam_b3, build_b3),
    Row("B-4", "product and pushforward commute", fam_b4, build_b4),
    Row("B-5", "product and pullback commute", fam_b5, build_b5),
    Row("B-6", "pushforward and pullback commute", fam_b6, build_b6),
    Row("B-7", "projection formula", fam_b7, build_b7),
    Row("unit-right", "right unit for product", fam_morph_pool, build_unit_right),
    Row("unit-left", "left unit for product", fam_morph_pool, build_unit_left),
    Row("unit-pullback", "pullback of a unit is a unit", fam_morphisms, build_unit_pull),
    Row("commutativity", "pullback-product commutativity on independent squares",
        fam_commutativity, build_commutativity),
    Row("theta-composition", "orientation of a composite is the product of orientations",
        fam_theta_comp, build_theta_comp),
    Row("theta-identity", "orientation of an identity is the unit", fam_objects, build_theta_id),
    Row("theta-nice", "orientation is stable under independent pullback", fam_theta_nice, build_theta_nice),
    Row("linearity-product", "product is bilinear", fam_lin_prod, build_lin_prod),
    Row("linearity-pushforward", "pushforward is additive", fam_lin_push, build_lin_push),
    Row("linearity-pullback", "pullback is additive", fam_lin_pull, build_lin_pull),
    Row("gysin-pullback-functorial", "Gysin pullback is contravariant on specialized maps",
        fam_gysin_pull_functorial, build_gysin_pull_functorial),
    Row("gysin-pushforward-functorial", "Gysin pushforward is covariant on confined specialized maps",
        fam_gysin_push_functorial, build_gysin_push_functorial),
    Row("gysin-base-change-covariant", "Gysin pullback commutes with pushforward on fiber squares",
        fam_base_change_cov, build_base_change_cov),
    Row("gysin-base-change-contravariant", "Gysin pushforward commutes with pullback on fiber squares",
        fam_base_change_contra, build_base_change_contra),
    Row("exterior-gysin-pullback", "Gysin pullback respects covariant exterior products",
        lambda s: _ext_families(s, "gysin_pull"), build_ext_gysin_pull),
    Row("exterior-pushforward", "pushforward respects covariant exterior products",
        lambda s: _ext_families(s, "push"), build_ext_push),
    Row("exterior-pullback", "pullback respects contravariant exterior products",
        lambda s: _ext_families(s, "pull"), build_ext_pull),
    Row("exterior-gysin-pushforward", "Gysin pushforward respects contravariant exterior products",
        lambda s: _ext_families(s, "gysin_push"), build_ext_gysin_push),
]

UNIVERSAL_ROWS = [
    Row("unoriented-restriction", "label-free operations agree with direct fiber-product formulas",
        fam_restriction, build_restriction),
    Row("ring-cup", "product over an identity is the fiber-product cup", fam_ring, build_ring),
]

ORIENTATION_ROWS = [
    Row("O-1", "identity: equal labels give equal operators", fam_o1, build_o1),
    Row("O-2", "label operators commute", fam_o2, build_o2),
    Row("O-3a", "label operator on the first factor of a product", fam_o3a, build_o3a),
    Row("O-3b", "pulled-back label operator moves to the second factor", fam_o3b, build_o3b),
    Row("O-4", "compatibility with pushforward", fam_o4, build_o4),
    Row("O-5", "compatibility with pullback", fam_o5, build_o5),
    Row("linearity-orient", "label operators are additive", fam_lin_orient, build_lin_orient),
    Row("phi-exterior", "label operator against covariant exterior products",
        fam_phi_exterior, build_phi_exterior),
    Row("phi-covariant-pushforward", "label operator against covariant pushforward",
        fam_phi_cov_push, build_phi_cov_push),
    Row("phi-gysin-pullback", "label operator against Gysin pullback", fam_phi_gysin_pull,
        build_phi_gysin_pull),
    Row("phi-contravariant-pullback", "label operator against contravariant pullback",
        fam_phi_contra_pull, build_phi_contra_pull),
    Row("phi-gysin-pushforward", "label operator against Gysin pushforward", fam_phi_gysin_push,
        build_phi_gysin_push),
]

OBSERVATION_ROWS = [
    Row("observation-product", "label operator is product with a labelled identity cycle",
        fam_obs_star, build_obs_star),
    Row("observation-decomposition", "generator is a pushforward of label operators on an identity",
        fam_obs_decomp, build_obs_decomp),
]

THETA_ROWS = ["theta-composition", "theta-identity", "theta-nice"]

GAMMA_ROWS = [
    Row("gamma-normalization", "identity cycles map to orientations", fam_spec_morphisms, build_gamma_norm),
    Row("gamma-normalization-labels", "labelled identity cycles map to label operators on orientations",
        fam_gamma_norm_labels, build_gamma_norm_labels),
    Row("gamma-fundamental-class", "fundamental classes correspond", fam_cov_objects, build_gamma_fclass),
    Row("gamma-unit", "units correspond", fam_objects, build_gamma_unit),
    Row("gamma-product", "preserves product", fam_gamma_prod, build_gamma_prod),
    Row("gamma-pushforward", "preserves pushforward", fam_gamma_push, build_gamma_push),
    Row("gamma-pullback", "preserves pullback", fam_gamma_pull, build_gamma_pull),
    Row("gamma-orientation", "intertwines label operators", fam_gamma_orient, build_gamma_orient),
    Row("gamma-linearity", "is additive", fam_gamma_linear, build_gamma_linear),
    Row("gamma-representative", "independent of the chosen representative", fam_gamma_gens,
        build_gamma_representative),
    Row("gamma-closed-form", "closed form agrees with the generator decomposition in both fold orders",
        fam_gamma_gens, build_gamma_closed_form),
]


# --------------------------------------------------------- entry points


def _session(cat, fc, theory, bounds, universal=None) -> Session:
    return Session(cat, fc, theory, bounds or SuiteBounds(), universal)


def check_bivariant_axioms(cat: Category, theory, bounds: SuiteBounds | None = None,
                           fc: FiberedCategory | None = None) -> CheckReport:
    s = _session(cat, fc if fc is not None else theory.fc, theory, bounds)
    rows = list(BIVARIANT_ROWS)
    if s.is_universal:
        rows += UNIVERSAL_ROWS
    return run_rows(s, rows, "bivariant-axioms")


def check_orientation_axioms(cat: Category, fc: FiberedCategory | None, theory,
                             bounds: SuiteBounds | None = None) -> CheckReport:
    s = _session(cat, fc if fc is not None else theory.fc, theory, bounds)
    rows = list(ORIENTATION_ROWS)
    if s.is_universal:
        rows += OBSERVATION_ROWS
    report = run_rows(s, rows, "orientation-axioms")
    if not theory.has_orientation:
        for r in report.rows:
            r.status, r.note = NOT_APPLICABLE, "theory carries no orientation data"
    return report


def check_grothendieck(cat: Category, fc: FiberedCategory | None, adapter,
                       bounds: SuiteBounds | None = None) -> CheckReport:
    fc = fc if fc is not None else adapter.fc
    s = _session(cat, fc, adapter, bounds)
    if s.is_universal:
        # the universal theory as its own target
        s.om = UniversalTheory(cat, fc)
        s.target = adapter
        s.where = "TARGET"
        s.is_universal = False
        s._pools.clear()
    by_name = {r.name: r for r in BIVARIANT_ROWS}
    report = run_rows(s, [by_name[n] for n in THETA_ROWS], "grothendieck")
    blocked = not report.ok
    for row in GAMMA_ROWS:
        if blocked:
            report.rows.append(RowReport(row.name, row.anchor, BLOCKED,
                                         note="orientation laws of the target fail"))
        else:
            report.rows.append(run_row(s, row))
    if blocked:
        # a blocked transformation check is a failed one
        report.rows.append(RowReport("gamma-preflight", "target orientation is canonical", FAIL,
                                     note="transformation rows were not run"))
    return report


# -- additivity


def check_additivity(cat: Category, theory, bounds: SuiteBounds | None = None) -> CheckReport:
    """Paired pushforward along the injections of each declared coproduct."""
    if not cat.coproducts:
        raise NotApplicable("the category declares no coproducts")
    bounds = bounds or SuiteBounds()
    s = _session(cat, theory.fc, theory, bounds)
    st = s.st
    families = []
    for cp in cat.coproducts:
        if not st.ok(cp.left, cp.right, cp.object):
            continue
        for f in st.by_src[cp.object]:
            families.append(((cp, f), []))
    row = Row("additivity", "paired pushforward along coproduct injections is bijective",
              lambda _s: families, _build_additivity)
    report = run_rows(s, [row], "additivity")
    notes = getattr(s, "additivity_notes", [])
    if notes:
        report.rows[0].note = "; ".join(notes[:5]) + (f" (+{len(notes) - 5} more)" if len(notes) > 5 else "")
    return report


def _build_additivity(s: Session, st, *_):
    cp, f = st
    cat, theory, bounds = s.cat, s.theory, s.bounds
    fx = cat.compose(cp.inj_left, f)
    fy = cat.compose(cp.inj_right, f)
    if s.is_universal:
        def nondegenerate(ctx):
            return [c for c in theory.generators(ctx, bounds) if not cat.is_initial(cat.src(c.h))]
        left, right, whole = nondegenerate(fx), nondegenerate(fy), nondegenerate(f)
        images = []
        for inj, ctx, gens in ((cp.inj_left, fx, left), (cp.inj_right, fy, right)):
            for c in gens:
                images.extend(theory.pushforward(inj, f, theory.cycle(ctx, c.h, c.bundles)).generators())
        injective = len(set(images)) == len(images)
        factoring = {c for c in whole
                     if any(cat.compose(m, inj) == c.h
                            for inj in (cp.inj_left, cp.inj_right)
                            for m in cat.hom(cat.src(c.h), cat.src(inj)))}
        ok = injective and set(images) == factoring
        other = len(whole) - len(factoring)
        if other:
            s.__dict__.setdefault("additivity_notes", []).append(
                f"{cp.left}+{cp.right} over {f}: {other} generator(s) meet both summands")
        return ok, {"coproduct": f"{cp.left}+{cp.right}={cp.object}", "context": f,
                    "images": len(images), "distinct": len(set(images)),
                    "single_summand_generators": len(factoring)}
    left, right, whole = theory.basis(fx), theory.basis(fy), theory.basis(f)
    images = [theory.pushforward(cp.inj_left, f, b) for b in left] + \
             [theory.pushforward(cp.inj_right, f, b) for b in right]
    ok = len(set(images)) == len(images) and set(images) == set(whole)
    return ok, {"coproduct": f"{cp.left}+{cp.right}={cp.object}", "context": f,
                "images": [theory.render(v) for v in images]}
