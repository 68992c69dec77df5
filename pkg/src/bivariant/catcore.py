"""Finite categories with confined/specialized classes, fiber products,
independent squares and a strict fibered category of labels.

Categories are loaded from JSON documents (see ``load_category``) and are
treated as immutable afterwards; the only mutable state is memoization.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    NotComposable,
    PullbackUnavailable,
    ResolveError,
    SchemaError,
    UnknownLabel,
)

ALL_FIBER = "all-fiber"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class Morphism:
    id: str
    src: str
    dst: str


@dataclass(frozen=True)
class Cospan:
    left: str
    right: str


@dataclass(frozen=True)
class PullbackData:
    apex: str
    proj_left: str
    proj_right: str


@dataclass(frozen=True)
class Square:
    """A commutative square ``right . top = bottom . left``.

        X' --top--> X
        |           |
       left       right
        v           v
        Y' -bottom-> Y
    """

    top: str
    left: str
    right: str
    bottom: str

    def transpose(self) -> "Square":
        return Square(top=self.left, left=self.top, right=self.bottom, bottom=self.right)

    def as_tuple(self):
        return (self.top, self.left, self.right, self.bottom)


@dataclass(frozen=True)
class Coproduct:
    left: str
    right: str
    object: str
    inj_left: str
    inj_right: str


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    witness: dict = field(default_factory=dict)
    severity: str = "error"

    def to_dict(self):
        return {
            "code": self.code,
            "severity": self.severity,
            "message": self.message,
            "witness": self.witness,
        }


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def errors(self):
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self):
        return [v for v in self.violations if v.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        # truthy when there is something to report
        return bool(self.violations)

    def codes(self):
        return sorted({v.code for v in self.violations})

    def to_dict(self):
        return {
            "ok": self.ok,
            "errors": len(self.errors),
            "warnings": len(self.warnings),
            "violations": [v.to_dict() for v in self.violations],
        }


class FiberedCategory:
    """Per-object label sets with strictly functorial pullback maps.

    Labels stand for isomorphism classes of fiber-objects; ``pull(f, L)``
    for ``f: X -> Y`` sends a label over ``Y`` to a label over ``X``.
    """

    def __init__(self, labels: Mapping[str, Iterable[str]], pull: Mapping[tuple, str],
                 identities: Mapping[str, str] | None = None):
        self.labels = {obj: tuple(toks) for obj, toks in labels.items()}
        self._label_sets = {obj: frozenset(toks) for obj, toks in self.labels.items()}
        self._pull = dict(pull)
        self._identity_morphisms = frozenset((identities or {}).values())

    @classmethod
    def trivial(cls) -> "FiberedCategory":
        return cls({}, {})

    def labels_over(self, obj: str) -> tuple:
        return self.labels.get(obj, ())

    def has_label(self, obj: str, token: str) -> bool:
        return token in self._label_sets.get(obj, ())

    def pull(self, f: str, token: str) -> str:
        if f in self._identity_morphisms:
            return token
        try:
            return self._pull[(f, token)]
        except KeyError:
            raise UnknownLabel(f"no pullback of label {token!r} along {f}") from None

    @property
    def is_trivial(self) -> bool:
        return not any(self.labels.values())


def pullback_label(fc: FiberedCategory, cat: "Category", f: str, token: str) -> str:
    """Label over ``src(f)`` obtained by pulling ``token`` (over ``dst(f)``) back along ``f``."""
    f = cat.resolve(f)
    target = cat.dst(f)
    if not fc.has_label(target, token):
        raise UnknownLabel(f"{token!r} is not a label over {target}")
    return fc.pull(f, token)


class Category:
    def __init__(self, *, objects, morphisms, composition, identities, final_object,
                 confined, specialized, square_mode=ALL_FIBER, squares=(), pullbacks=None,
                 coproducts=(), sizes=None, aliases=None, carriers=None, fibered=None,
                 name=None, square_ids=None):
        self.name = name
        self.objects = tuple(objects)
        self.morphisms = dict((m.id, m) for m in morphisms)
        self._order = {mid: i for i, mid in enumerate(self.morphisms)}
        self._comp = dict(composition)
        self.identities = dict(identities)
        self.final_object = final_object
        self.confined = frozenset(confined)
        self.specialized = frozenset(specialized)
        self.square_mode = square_mode
        self.declared_squares = tuple(squares)
        self._square_set = frozenset(sq.as_tuple() for sq in self.declared_squares)
        self.square_ids = dict(square_ids or {})
        self.pullbacks = dict(pullbacks or {})
        self.coproducts = tuple(coproducts)
        self.sizes = dict(sizes or {})
        self.aliases = dict(aliases or {})
        self.carriers = carriers
        self.fibered = fibered if fibered is not None else FiberedCategory.trivial()
        self._identity_set = frozenset(self.identities.values())

        self._hom = defaultdict(list)
        self._into = defaultdict(list)
        self._out = defaultdict(list)
        for m in self.morphisms.values():
            self._hom[(m.src, m.dst)].append(m.id)
            self._into[m.dst].append(m.id)
            self._out[m.src].append(m.id)
        self._iso_cache = {}
        self._inverse_cache = {}
        self._indep_cache = {}

    # ----------------------------------------------------------------- lookup
    def resolve(self, name: str) -> str:
        if name in self.morphisms:
            return name
        if name in self.aliases:
            return self.aliases[name]
        raise ResolveError(f"unknown morphism {name!r}")

    def resolve_object(self, name: str) -> str:
        if name in self.sizes or name in self.identities:
            return name
        raise ResolveError(f"unknown object {name!r}")

    def src(self, f: str) -> str:
        return self.morphisms[f].src

    def dst(self, f: str) -> str:
        return self.morphisms[f].dst

    def rank(self, f: str) -> int:
        return self._order[f]

    def identity(self, obj: str) -> str:
        return self.identities[obj]

    def is_identity(self, f: str) -> bool:
        return f in self._identity_set

    def size(self, obj: str):
        return self.sizes.get(obj)

    def within(self, obj: str, bound) -> bool:
        if bound is None:
            return True
        s = self.sizes.get(obj)
        return s is None or s <= bound

    def objects_within(self, bound):
        return [o for o in self.objects if self.within(o, bound)]

    def hom(self, x: str, y: str) -> tuple:
        return tuple(self._hom.get((x, y), ()))

    def morphisms_into(self, x: str) -> tuple:
        return tuple(self._into.get(x, ()))

    def morphisms_from(self, x: str) -> tuple:
        return tuple(self._out.get(x, ()))

    def terminal_map(self, x: str) -> str:
        maps = self.hom(x, self.final_object)
        if len(maps) != 1:
            raise NotComposable(f"{x} does not have a unique morphism to the final object")
        return maps[0]

    def is_confined(self, f: str) -> bool:
        return f in self.confined

    def is_specialized(self, f: str) -> bool:
        return f in self.specialized

    def is_initial(self, x: str) -> bool:
        return all(len(self.hom(x, y)) == 1 for y in self.objects)

    # ----------------------------------------------------------- composition
    def compose(self, f: str, g: str) -> str:
        """Return ``g . f`` (first ``f``, then ``g``)."""
        try:
            return self._comp[(f, g)]
        except KeyError:
            pass
        mf, mg = self.morphisms[f], self.morphisms[g]
        if mf.dst != mg.src:
            raise NotComposable(f"cannot compose {f}: {mf.src}->{mf.dst} with {g}: {mg.src}->{mg.dst}")
        raise NotComposable(f"composition table has no entry for ({f}, {g})")

    def compose_chain(self, *fs: str) -> str:
        out = fs[0]
        for g in fs[1:]:
            out = self.compose(out, g)
        return out

    def commutes(self, sq: Square) -> bool:
        try:
            return self.compose(sq.top, sq.right) == self.compose(sq.left, sq.bottom)
        except NotComposable:
            return False

    # --------------------------------------------------------- fiber products
    def has_fiber_product(self, left: str, right: str) -> bool:
        return (left, right) in self.pullbacks or (right, left) in self.pullbacks

    def fiber_product(self, left: str, right: str) -> PullbackData:
        pb = self.pullbacks.get((left, right))
        if pb is not None:
            return pb
        pb = self.pullbacks.get((right, left))
        if pb is not None:
            return PullbackData(pb.apex, pb.proj_right, pb.proj_left)
        raise PullbackUnavailable(left, right)

    def pullback_square(self, right: str, bottom: str) -> Square:
        """The declared fiber square with the given right vertical and bottom."""
        pb = self.fiber_product(right, bottom)
        return Square(top=pb.proj_left, left=pb.proj_right, right=right, bottom=bottom)

    def mediator(self, left: str, right: str, q1: str, q2: str):
        """Unique ``m`` with ``proj_left . m = q1`` and ``proj_right . m = q2``, or None."""
        pb = self.fiber_product(left, right)
        q = self.src(q1)
        for m in self.hom(q, pb.apex):
            if self.compose(m, pb.proj_left) == q1 and self.compose(m, pb.proj_right) == q2:
                return m
        return None

    # ------------------------------------------------------------ isomorphisms
    def inverse(self, g: str):
        if g in self._inverse_cache:
            return self._inverse_cache[g]
        a, b = self.src(g), self.dst(g)
        ida, idb = self.identities[a], self.identities[b]
        inv = None
        for cand in self.hom(b, a):
            if self.compose(g, cand) == ida and self.compose(cand, g) == idb:
                inv = cand
                break
        self._inverse_cache[g] = inv
        return inv

    def isos(self, a: str, b: str) -> tuple:
        key = (a, b)
        if key not in self._iso_cache:
            self._iso_cache[key] = tuple(g for g in self.hom(a, b) if self.inverse(g) is not None)
        return self._iso_cache[key]

    def isos_into(self, b: str) -> tuple:
        out = []
        for a in self.objects:
            out.extend(self.isos(a, b))
        return tuple(out)

    def isomorphic_over(self, h1: str, h2: str):
        """Witness ``g: src(h1) -> src(h2)`` invertible with ``h2 . g = h1``, or None."""
        if self.dst(h1) != self.dst(h2):
            raise NotComposable(f"{h1} and {h2} do not share a target")
        for g in self.isos(self.src(h1), self.src(h2)):
            if self.compose(g, h2) == h1:
                return g
        return None

    # ---------------------------------------------------- independent squares
    def _forced_independent(self, sq: Square) -> bool:
        if self.is_identity(sq.top) and self.is_identity(sq.bottom) and sq.left == sq.right:
            return True
        if self.is_identity(sq.left) and self.is_identity(sq.right) and sq.top == sq.bottom:
            return True
        return False

    def is_pullback_square(self, sq: Square) -> bool:
        """Universal property of ``sq`` by exhaustive search over generalized elements."""
        if not self.commutes(sq):
            return False
        if self.has_fiber_product(sq.right, sq.bottom):
            pb = self.fiber_product(sq.right, sq.bottom)
            u = self.mediator(sq.right, sq.bottom, sq.top, sq.left)
            return u is not None and self.inverse(u) is not None and self.src(u) == self.src(sq.top) \
                and self.dst(u) == pb.apex
        apex, x, y2 = self.src(sq.top), self.dst(sq.top), self.src(sq.bottom)
        for q in self.objects:
            by_composite = Counter(self.compose(q2, sq.bottom) for q2 in self.hom(q, y2))
            cones = sum(by_composite[self.compose(q1, sq.right)] for q1 in self.hom(q, x))
            meds = self.hom(q, apex)
            keys = {(self.compose(m, sq.top), self.compose(m, sq.left)) for m in meds}
            if len(keys) != len(meds) or len(meds) != cones:
                return False
        return True

    def is_independent(self, sq: Square) -> bool:
        key = sq.as_tuple()
        if key in self._indep_cache:
            return self._indep_cache[key]
        if not self.commutes(sq):
            result = False
        elif self._forced_independent(sq):
            result = True
        elif self.square_mode == ALL_FIBER:
            result = self.is_pullback_square(sq)
        else:
            result = key in self._square_set
        self._indep_cache[key] = result
        return result

    def paste_horizontal(self, sq1: Square, sq2: Square) -> Square:
        """Outer square of ``sq2`` pasted to the left of ``sq1`` (``sq2.right == sq1.left``)."""
        if sq2.right != sq1.left:
            raise NotComposable("squares do not share a vertical edge")
        return Square(top=self.compose(sq2.top, sq1.top), left=sq2.left, right=sq1.right,
                      bottom=self.compose(sq2.bottom, sq1.bottom))

    def paste_vertical(self, upper: Square, lower: Square) -> Square:
        """Outer square of ``upper`` stacked on ``lower`` (``upper.bottom == lower.top``)."""
        if upper.bottom != lower.top:
            raise NotComposable("squares do not share a horizontal edge")
        return Square(top=upper.top, left=self.compose(upper.left, lower.left),
                      right=self.compose(upper.right, lower.right), bottom=lower.bottom)

    def identity_square_vertical(self, f: str) -> Square:
        """``f`` on both verticals, identities horizontally."""
        x, y = self.src(f), self.dst(f)
        return Square(top=self.identities[x], left=f, right=f, bottom=self.identities[y])

    def identity_square_horizontal(self, f: str) -> Square:
        """``f`` on both horizontals, identities vertically (pullback along ``f`` on B^*)."""
        x, y = self.src(f), self.dst(f)
        return Square(top=f, left=self.identities[x], right=self.identities[y], bottom=f)

    def square_by_id(self, sid: str) -> Square:
        try:
            return self.square_ids[sid]
        except KeyError:
            raise ResolveError(f"unknown square {sid!r}") from None

    def render_square(self, sq: Square) -> str:
        return f"sq({sq.top},{sq.left},{sq.right},{sq.bottom})"


# =============================================================== loading


def _require(doc, key):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}")
    return doc[key]


def _row(entry, names, what):
    if isinstance(entry, Mapping):
        try:
            return tuple(entry[n] for n in names)
        except KeyError as exc:
            raise SchemaError(f"{what} entry missing field {exc.args[0]!r}") from None
    if isinstance(entry, (list, tuple)) and len(entry) == len(names):
        return tuple(entry)
    raise SchemaError(f"malformed {what} entry: {entry!r}")


def load_category(document) -> Category:
    """Build a Category from a JSON document (text, mapping, or path).

    Only structural checks happen here (ids, references, duplicates); the
    categorical axioms are checked by ``validate_category``.
    """
    if isinstance(document, Path):
        document = document.read_text(encoding="utf-8")
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(document, Mapping):
        raise SchemaError("category document must be a JSON object")
    doc = document

    objects, sizes = [], {}
    for entry in _require(doc, "objects"):
        oid = entry["id"] if isinstance(entry, Mapping) and "id" in entry else None
        if not isinstance(oid, str):
            raise SchemaError(f"malformed object entry: {entry!r}")
        if oid in sizes or oid in objects:
            raise SchemaError(f"duplicate object id {oid!r}")
        objects.append(oid)
        sizes[oid] = entry.get("size")
    object_set = set(objects)
    sizes = {k: v for k, v in sizes.items() if v is not None}

    morphisms = []
    seen = set()
    for entry in _require(doc, "morphisms"):
        mid, s, d = _row(entry, ("id", "src", "dst"), "morphism")
        if mid in seen:
            raise SchemaError(f"duplicate morphism id {mid!r}")
        for o in (s, d):
            if o not in object_set:
                raise SchemaError(f"morphism {mid!r} references undeclared object {o!r}")
        seen.add(mid)
        morphisms.append(Morphism(mid, s, d))

    def known(mid, where):
        if mid not in seen:
            raise SchemaError(f"{where} references undeclared morphism {mid!r}")
        return mid

    composition = {}
    for entry in _require(doc, "compose"):
        f, g, h = _row(entry, ("first", "then", "equals"), "compose")
        for m in (f, g, h):
            known(m, "composition entry")
        if (f, g) in composition:
            raise SchemaError(f"duplicate composition entry for ({f}, {g})")
        composition[(f, g)] = h

    identities = {}
    raw_ids = _require(doc, "identities")
    if not isinstance(raw_ids, Mapping):
        raise SchemaError("identities must map objects to morphisms")
    for obj, mid in raw_ids.items():
        if obj not in object_set:
            raise SchemaError(f"identity declared for undeclared object {obj!r}")
        identities[obj] = known(mid, "identities")
    for obj in objects:
        if obj not in identities:
            raise SchemaError(f"object {obj!r} has no identity morphism")
    # identity composites are implied when absent from the table
    for m in morphisms:
        composition.setdefault((identities[m.src], m.id), m.id)
        composition.setdefault((m.id, identities[m.dst]), m.id)

    final = _require(doc, "final_object")
    if final not in object_set:
        raise SchemaError(f"final object {final!r} is not declared")

    def morphism_class(key):
        raw = _require(doc, key)
        if raw == "all":
            return set(seen)
        if not isinstance(raw, list):
            raise SchemaError(f"{key} must be 'all' or a list of morphism ids")
        return {known(m, key) for m in raw}

    confined = morphism_class("confined")
    specialized = morphism_class("specialized")

    raw_sq = doc.get("squares", ALL_FIBER)
    squares, square_ids = [], {}
    if raw_sq == ALL_FIBER:
        mode = ALL_FIBER
    elif isinstance(raw_sq, list):
        mode = EXPLICIT
        for i, entry in enumerate(raw_sq):
            top, left, right, bottom = _row(entry, ("top", "left", "right", "bottom"), "square")
            for m in (top, left, right, bottom):
                known(m, "square")
            sq = Square(top, left, right, bottom)
            squares.append(sq)
            sid = entry.get("id") if isinstance(entry, Mapping) else None
            if sid is not None:
                if sid in square_ids:
                    raise SchemaError(f"duplicate square id {sid!r}")
                square_ids[sid] = sq
    else:
        raise SchemaError("squares must be 'all-fiber' or a list of squares")

    pullbacks = {}
    for entry in doc.get("pullbacks", []):
        left, right, apex, pl, pr = _row(
            entry, ("left", "right", "apex", "proj_left", "proj_right"), "pullback")
        for m in (left, right, pl, pr):
            known(m, "pullback")
        if apex not in object_set:
            raise SchemaError(f"pullback apex {apex!r} is not declared")
        if (left, right) in pullbacks:
            raise SchemaError(f"duplicate pullback entry for ({left}, {right})")
        pullbacks[(left, right)] = PullbackData(apex, pl, pr)
        sid = entry.get("id") if isinstance(entry, Mapping) else None
        if sid is not None:
            square_ids[sid] = Square(pl, pr, left, right)

    coproducts = []
    for entry in doc.get("coproducts", []) or []:
        left, right, obj, il, ir = _row(
            entry, ("left", "right", "object", "inj_left", "inj_right"), "coproduct")
        for o in (left, right, obj):
            if o not in object_set:
                raise SchemaError(f"coproduct references undeclared object {o!r}")
        known(il, "coproduct")
        known(ir, "coproduct")
        coproducts.append(Coproduct(left, right, obj, il, ir))

    aliases = {}
    for alias, mid in (doc.get("aliases") or {}).items():
        if alias in seen:
            raise SchemaError(f"alias {alias!r} shadows a morphism id")
        aliases[alias] = known(mid, "aliases")

    fibered = None
    if doc.get("fibered"):
        fibered = _load_fibered(doc["fibered"], object_set, seen, identities)

    carriers = doc.get("carriers")
    if carriers is not None:
        for key in ("sets", "maps"):
            if key not in carriers:
                raise SchemaError(f"carriers section lacks {key!r}")

    return Category(objects=objects, morphisms=morphisms, composition=composition,
                    identities=identities, final_object=final, confined=confined,
                    specialized=specialized, square_mode=mode, squares=squares,
                    pullbacks=pullbacks, coproducts=coproducts, sizes=sizes, aliases=aliases,
                    carriers=carriers, fibered=fibered, name=doc.get("name"),
                    square_ids=square_ids)


def _load_fibered(raw, object_set, morphism_ids, identities) -> FiberedCategory:
    labels = {}
    for obj, toks in (raw.get("labels") or {}).items():
        if obj not in object_set:
            raise SchemaError(f"fibered labels declared over undeclared object {obj!r}")
        if len(set(toks)) != len(toks):
            raise SchemaError(f"duplicate label tokens over {obj!r}")
        labels[obj] = tuple(toks)
    pull = {}
    for mid, table in (raw.get("pull") or {}).items():
        if mid not in morphism_ids:
            raise SchemaError(f"fibered pull references undeclared morphism {mid!r}")
        for tok_dst, tok_src in table.items():
            pull[(mid, tok_dst)] = tok_src
    return FiberedCategory(labels, pull, identities)


def load_category_file(path) -> Category:
    return load_category(Path(path).read_text(encoding="utf-8"))


# ============================================================ validation


class _Tables:
    """Integer-indexed composition table for vectorized checks."""

    def __init__(self, cat: Category):
        self.cat = cat
        self.ids = list(cat.morphisms)
        self.index = {m: i for i, m in enumerate(self.ids)}
        n = self.n = len(self.ids)
        obj_index = {o: i for i, o in enumerate(cat.objects)}
        self.src = np.array([obj_index[cat.src(m)] for m in self.ids], dtype=np.int64)
        self.dst = np.array([obj_index[cat.dst(m)] for m in self.ids], dtype=np.int64)
        comp = np.full((n + 1, n + 1), n, dtype=np.int64)
        for (f, g), h in cat._comp.items():
            comp[self.index[f], self.index[g]] = self.index[h]
        self.comp = comp
        self.hom = {}
        for (x, y), ms in cat._hom.items():
            self.hom[(x, y)] = np.array([self.index[m] for m in ms], dtype=np.int64)
        self.empty = np.zeros(0, dtype=np.int64)

    def hom_arr(self, x, y):
        return self.hom.get((x, y), self.empty)

    def mask(self, ids):
        out = np.zeros(self.n + 1, dtype=bool)
        for m in ids:
            out[self.index[m]] = True
        return out


def validate_category(cat: Category, fc: FiberedCategory | None = None) -> ValidationReport:
    """Check every standing assumption on ``cat`` and report violations with witnesses."""
    report = ValidationReport()
    add = report.violations.append
    fc = fc if fc is not None else cat.fibered
    t = _Tables(cat)
    n = t.n
    names = t.ids
    comp = t.comp
    body = comp[:n, :n]

    # typing of the table
    composable = t.dst[:, None] == t.src[None, :]
    defined = body != n
    bad = np.argwhere(defined & ~composable)
    for i, j in bad[:1]:
        add(Violation("composition-typing", "composition entry for non-composable pair",
                      {"first": names[i], "then": names[j]}))
    missing = np.argwhere(composable & ~defined)
    for i, j in missing[:1]:
        add(Violation("composition-total", "composition table is not total",
                      {"first": names[i], "then": names[j], "missing": int(len(missing))}))
    ok_pairs = defined & composable
    ii, jj = np.nonzero(ok_pairs)
    hh = body[ii, jj]
    wrong = (t.src[hh] != t.src[ii]) | (t.dst[hh] != t.dst[jj])
    for k in np.nonzero(wrong)[0][:1]:
        add(Violation("composition-typing", "composite has wrong endpoints",
                      {"first": names[ii[k]], "then": names[jj[k]], "equals": names[hh[k]]}))

    # identities
    for obj in cat.objects:
        idm = cat.identities[obj]
        if cat.src(idm) != obj or cat.dst(idm) != obj:
            add(Violation("identity-typing", f"identity of {obj} is not an endomorphism of {obj}",
                          {"object": obj, "morphism": idm}))
    id_of_src = np.array([t.index[cat.identities[cat.src(m)]] for m in names], dtype=np.int64)
    id_of_dst = np.array([t.index[cat.identities[cat.dst(m)]] for m in names], dtype=np.int64)
    ar = np.arange(n)
    left_neutral = comp[id_of_src, ar] == ar
    right_neutral = comp[ar, id_of_dst] == ar
    for k in np.nonzero(~(left_neutral & right_neutral))[0][:1]:
        add(Violation("identity-law", "identity is not neutral for composition",
                      {"morphism": names[k]}))

    # associativity on all composable triples
    for f in range(n):
        row = comp[f, :n]
        valid_g = row != n
        if not valid_g.any():
            continue
        g_idx = np.nonzero(valid_g)[0]
        left = comp[row[g_idx]][:, :n]            # h . (g . f)
        gh = body[g_idx]                            # h . g
        right = comp[f][gh]                         # (h . g) . f
        mask = (gh != n) & (left != n) & (right != n)
        diff = mask & (left != right)
        if diff.any():
            a, b = np.argwhere(diff)[0]
            add(Violation("associativity", "composition is not associative",
                          {"f": names[f], "g": names[g_idx[a]], "h": names[b]}))
            break

    # final object
    for obj in cat.objects:
        k = len(cat.hom(obj, cat.final_object))
        if k != 1:
            add(Violation("final-object", f"{obj} has {k} morphisms to the final object",
                          {"object": obj, "count": k}))

    # confined / specialized classes
    for cls_name, members in (("confined", cat.confined), ("specialized", cat.specialized)):
        for obj in cat.objects:
            if cat.identities[obj] not in members:
                add(Violation(f"{cls_name}-identity", f"{cls_name} class missing identity",
                              {"object": obj, "morphism": cat.identities[obj]}))
                break
        mk = t.mask(members)
        both = ok_pairs & mk[:n][:, None] & mk[:n][None, :]
        ci, cj = np.nonzero(both)
        not_closed = ~mk[body[ci, cj]]
        for k in np.nonzero(not_closed)[0][:1]:
            add(Violation(f"{cls_name}-composition", f"{cls_name} class not closed under composition",
                          {"first": names[ci[k]], "then": names[cj[k]]}))

    _validate_pullbacks(cat, t, add)
    _validate_squares(cat, add)
    if fc is not None and not fc.is_trivial:
        _validate_fibered(cat, fc, add)
    if cat.coproducts:
        _validate_coproducts(cat, add)
    if cat.carriers is not None:
        _validate_carriers(cat, add)
    return report


def _validate_pullbacks(cat: Category, t: _Tables, add):
    n = t.n
    comp = t.comp
    conf = t.mask(cat.confined)
    spec = t.mask(cat.specialized)
    groups = defaultdict(list)
    for (left, right), pb in cat.pullbacks.items():
        ml, mr = cat.morphisms[left], cat.morphisms[right]
        cospan = {"left": left, "right": right}
        if ml.dst != mr.dst:
            add(Violation("pullback-cospan", "pullback entry is not a cospan", cospan))
            continue
        pl, pr = cat.morphisms[pb.proj_left], cat.morphisms[pb.proj_right]
        if (pl.src, pl.dst, pr.src, pr.dst) != (pb.apex, ml.src, pb.apex, mr.src):
            add(Violation("pullback-typing", "pullback projections have wrong endpoints",
                          {**cospan, "apex": pb.apex}))
            continue
        groups[(ml.src, mr.src, pb.apex)].append((left, right, pb))

    for (x, y, p), entries in groups.items():
        L = np.array([t.index[e[0]] for e in entries], dtype=np.int64)
        R = np.array([t.index[e[1]] for e in entries], dtype=np.int64)
        PL = np.array([t.index[e[2].proj_left] for e in entries], dtype=np.int64)
        PR = np.array([t.index[e[2].proj_right] for e in entries], dtype=np.int64)
        k = len(entries)
        commutes = comp[PL, L] == comp[PR, R]
        failed = ~commutes
        for j in np.nonzero(failed)[0][:1]:
            e = entries[j]
            add(Violation("pullback-commutes", "declared pullback square does not commute",
                          {"left": e[0], "right": e[1], "apex": e[2].apex}))
        up_fail = np.zeros(k, dtype=bool)
        bad_q = [None] * k
        offs = (np.arange(k) * (n + 1))[None, :]
        for q in cat.objects:
            hx, hy, hp = t.hom_arr(q, x), t.hom_arr(q, y), t.hom_arr(q, p)
            cx = comp[hx[:, None], L[None, :]]
            cy = comp[hy[:, None], R[None, :]]
            bx = np.bincount((cx + offs).ravel(), minlength=k * (n + 1)).reshape(k, n + 1)
            by = np.bincount((cy + offs).ravel(), minlength=k * (n + 1)).reshape(k, n + 1)
            cones = (bx[:, :n] * by[:, :n]).sum(axis=1)
            if len(hp):
                keys = comp[hp[:, None], PL[None, :]] * (n + 1) + comp[hp[:, None], PR[None, :]]
                keys = np.sort(keys, axis=0)
                dup = (np.diff(keys, axis=0) == 0).any(axis=0) if len(hp) > 1 else np.zeros(k, bool)
            else:
                dup = np.zeros(k, dtype=bool)
            fail_q = (cones != len(hp)) | dup
            for j in np.nonzero(fail_q & ~up_fail)[0]:
                bad_q[j] = q
            up_fail |= fail_q
        for j in np.nonzero(up_fail & commutes)[0][:1]:
            e = entries[j]
            add(Violation("pullback-universal-property",
                          "declared pullback fails the universal property",
                          {"cospan": {"left": e[0], "right": e[1]}, "apex": e[2].apex,
                           "test_object": bad_q[j], "failures_in_group": int(up_fail.sum())}))
        for cls_name, mk in (("confined", conf), ("specialized", spec)):
            bad = (mk[L] & ~mk[PR]) | (mk[R] & ~mk[PL])
            for j in np.nonzero(bad)[0][:1]:
                e = entries[j]
                add(Violation(f"{cls_name}-base-change",
                              f"{cls_name} class not closed under base change",
                              {"left": e[0], "right": e[1], "apex": e[2].apex}))

    if cat.square_mode == EXPLICIT:
        # C-independence: declared fiber squares with confined right vertical
        for (left, right), pb in cat.pullbacks.items():
            for sq in (Square(pb.proj_left, pb.proj_right, left, right),
                       Square(pb.proj_right, pb.proj_left, right, left)):
                if cat.is_confined(sq.right) and not cat.is_independent(sq):
                    add(Violation("C-independence",
                                  "fiber square with confined right vertical is not independent",
                                  {"square": cat.render_square(sq)}, severity="warning"))
                    break


def _validate_squares(cat: Category, add):
    if cat.square_mode != EXPLICIT:
        return
    squares = list(cat.declared_squares)
    for sq in squares:
        if not cat.commutes(sq):
            add(Violation("square-commutes", "declared independent square does not commute",
                          {"square": cat.render_square(sq)}))
    # closure under horizontal and vertical pasting
    for s1 in squares:
        for s2 in squares:
            if s2.right == s1.left:
                try:
                    outer = cat.paste_horizontal(s1, s2)
                except NotComposable:
                    continue
                if not cat.is_independent(outer):
                    add(Violation("square-pasting", "horizontal pasting of independent squares "
                                  "is not independent",
                                  {"inner": [cat.render_square(s1), cat.render_square(s2)],
                                   "outer": cat.render_square(outer)}))
            if s1.bottom == s2.top:
                try:
                    outer = cat.paste_vertical(s1, s2)
                except NotComposable:
                    continue
                if not cat.is_independent(outer):
                    add(Violation("square-pasting", "vertical pasting of independent squares "
                                  "is not independent",
                                  {"inner": [cat.render_square(s1), cat.render_square(s2)],
                                   "outer": cat.render_square(outer)}))


def _validate_fibered(cat: Category, fc: FiberedCategory, add):
    for obj in cat.objects:
        if obj not in fc.labels:
            add(Violation("fibered-labels", f"no label set declared over {obj}", {"object": obj}))
    for mid, m in cat.morphisms.items():
        if cat.is_identity(mid):
            for tok in fc.labels_over(m.dst):
                raw = fc._pull.get((mid, tok), tok)
                if raw != tok:
                    add(Violation("fibered-identity", "pull along an identity is not the identity",
                                  {"morphism": mid, "label": tok}))
            continue
        for tok in fc.labels_over(m.dst):
            out = fc._pull.get((mid, tok))
            if out is None:
                add(Violation("fibered-total", "pull table is missing an entry",
                              {"morphism": mid, "label": tok}))
                return
            if not fc.has_label(m.src, out):
                add(Violation("fibered-typing", "pulled label is not a label over the source",
                              {"morphism": mid, "label": tok, "result": out}))
                return
    for (f, g), h in cat._comp.items():
        for tok in fc.labels_over(cat.dst(g)):
            try:
                lhs = fc.pull(f, fc.pull(g, tok))
                rhs = fc.pull(h, tok)
            except UnknownLabel:
                continue
            if lhs != rhs:
                add(Violation("fibered-functoriality", "pull is not strictly functorial",
                              {"first": f, "then": g, "label": tok, "stepwise": lhs, "direct": rhs}))
                return


def _validate_coproducts(cat: Category, add):
    for cp in cat.coproducts:
        il, ir = cat.morphisms[cp.inj_left], cat.morphisms[cp.inj_right]
        if (il.src, il.dst, ir.src, ir.dst) != (cp.left, cp.object, cp.right, cp.object):
            add(Violation("coproduct-typing", "coproduct injections have wrong endpoints",
                          {"object": cp.object}))
            continue
        for z in cat.objects:
            pairs = [(cat.compose(cp.inj_left, h), cat.compose(cp.inj_right, h))
                     for h in cat.hom(cp.object, z)]
            expected = len(cat.hom(cp.left, z)) * len(cat.hom(cp.right, z))
            if len(set(pairs)) != len(pairs) or len(pairs) != expected:
                add(Violation("coproduct-universal-property",
                              "declared coproduct fails the universal property",
                              {"left": cp.left, "right": cp.right, "object": cp.object,
                               "test_object": z}))
                break


def _validate_carriers(cat: Category, add):
    sets = cat.carriers["sets"]
    maps = cat.carriers["maps"]
    for obj in cat.objects:
        if obj not in sets:
            add(Violation("carriers", f"no carrier set for {obj}", {"object": obj}))
            return
    for mid, m in cat.morphisms.items():
        table = maps.get(mid)
        if table is None or len(table) != len(sets[m.src]) or not set(table) <= set(sets[m.dst]):
            add(Violation("carriers", "morphism value table does not match its endpoints",
                          {"morphism": mid}))
            return
    pos = {obj: {e: i for i, e in enumerate(els)} for obj, els in sets.items()}
    for (f, g), h in cat._comp.items():
        tf, tg, th = maps[f], maps[g], maps[h]
        pg = pos[cat.src(g)]
        if any(tg[pg[v]] != w for v, w in zip(tf, th)):
            add(Violation("carriers-composition",
                          "composition table disagrees with pointwise composition",
                          {"first": f, "then": g, "equals": h}))
            return
