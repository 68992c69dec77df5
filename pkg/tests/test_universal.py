import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bivariant import fixtures
from bivariant.catcore import load_category
from bivariant.errors import (
    MembershipViolation,
    NotConfined,
    NotSpecialized,
    PullbackUnavailable,
    UnknownLabel,
)
from bivariant.universal import Bounds, Cycle, UniversalTheory, generators

LETTERS = "abcd"


@pytest.fixture(scope="module")
def om4(fs4):
    return UniversalTheory(fs4, fs4.fibered)


@pytest.fixture(scope="module")
def omd(diamond):
    return UniversalTheory(diamond, diamond.fibered)


# ----------------------------------------------------------- brute force
# Classes of (h: V -> X, multiset of weight functions on V) up to bijections
# of V, written directly on value tables with no use of the engine.

def oracle_class(table, weights):
    m = len(table)
    best = None
    for p in itertools.permutations(range(m)):
        cand = (tuple(table[i] for i in p), tuple(sorted(tuple(w[i] for i in p) for w in weights)))
        best = cand if best is None or cand < best else best
    return m, best


def oracle_classes(n, max_source, max_bundles, values=(3, 5)):
    out = set()
    for m in range(max_source + 1):
        labels = list(itertools.product(values, repeat=m))
        for table in itertools.product(range(n), repeat=m):
            for r in range(max_bundles + 1):
                for ws in itertools.combinations_with_replacement(labels, r):
                    out.add(oracle_class(table, ws))
    return out


def engine_class(cyc):
    m = int(cyc.h[1])
    table = tuple(LETTERS.index(c) for c in cyc.h.split("_")[1])
    weights = [tuple(int(d) for d in tok[1:]) for tok in cyc.bundles]
    return oracle_class(table, weights)


def test_oracle_counts_six_classes_over_two():
    assert len(oracle_classes(2, 2, 0)) == 6


@pytest.mark.parametrize("n,k,r", [(2, 2, 0), (2, 2, 1), (1, 3, 1), (3, 2, 1), (2, 3, 0), (2, 2, 2)])
def test_generators_match_oracle(fs4, om4, n, k, r):
    gens = om4.generators(fs4.resolve(f"bang_{n}"), Bounds(k, r))
    classes = [engine_class(c) for c in gens]
    assert len(set(classes)) == len(classes)
    assert set(classes) == oracle_classes(n, k, r)


def test_generators_over_two_listed(fs4):
    gens = generators(fs4, None, fs4.resolve("bang_2"), 2, 0)
    assert [c.h for c in gens] == ["f02_", "f12_a", "f12_b", "f22_aa", "f22_ab", "f22_bb"]


def test_diamond_generators(omd):
    assert [c.h for c in omd.generators("x_top", Bounds(None, 0))] == ["bot_x", "id_x"]


def test_generators_need_specialized_composite(diamond):
    doc = fixtures.diamond_document()
    doc["specialized"] = [diamond.identity(o) for o in diamond.objects]
    cat = load_category(doc)
    om = UniversalTheory(cat)
    assert om.generators("x_top", Bounds(None, 0)) == []
    with pytest.raises(NotSpecialized):
        om.theta("x_top")
    with pytest.raises(MembershipViolation):
        om.cycle("x_top", "id_x")


def test_canonical_representatives(fs4, om4):
    r = fs4.resolve
    assert om4.canonicalize(Cycle(r("swap"), ())) == Cycle(r("id_2"), ())
    assert om4.canonicalize(Cycle(r("const_a"), ())) == Cycle(r("const_a"), ())
    a = om4.canonicalize(Cycle(r("id_2"), ("w35",)))
    b = om4.canonicalize(Cycle(r("swap"), ("w53",)))
    assert a == b


def test_theta_and_unit(fs4, om4, omd):
    assert omd.theta("bot_top") == omd.cycle("bot_top", "id_bot")
    assert om4.unit("2") == om4.cycle(fs4.resolve("id_2"), fs4.resolve("id_2"))
    assert om4.unit("2").render() == "1*[f22_ab ; ] over f22_ab"


def test_products(fs4, om4, omd):
    r = fs4.resolve
    a = om4.cycle(r("id_2"), r("one_to_a"))
    b = om4.cycle(r("bang_2"), r("id_2"))
    assert om4.product(a, b) == om4.cycle(r("bang_2"), r("one_to_a"))
    a = om4.cycle(r("swap"), r("id_2"))
    b = om4.cycle(r("bang_2"), r("const_a"))
    assert om4.product(a, b) == om4.cycle(r("bang_2"), r("const_b"))
    a = omd.cycle("x_top", "bot_x")
    b = omd.cycle("id_top", "y_top")
    assert omd.product(a, b) == omd.cycle("x_top", "bot_x")


def test_pushforwards(fs4, om4, omd):
    r = fs4.resolve
    a = om4.cycle(r("bang_2"), r("id_2"))
    assert om4.pushforward(r("id_2"), r("bang_2"), a) == a
    assert om4.pushforward(r("const_a"), r("bang_2"), a) == om4.cycle(r("bang_2"), r("const_a"))
    a = omd.cycle("x_top", "bot_x")
    assert omd.pushforward("x_top", "id_top", a) == omd.cycle("id_top", "bot_top")


def test_pushforward_needs_confined(diamond):
    doc = fixtures.diamond_document()
    doc["confined"] = [diamond.identity(o) for o in diamond.objects]
    om = UniversalTheory(load_category(doc))
    a = om.cycle("x_top", "id_x")
    with pytest.raises(NotConfined):
        om.pushforward("x_top", "id_top", a)


def test_pullbacks(fs4, om4, omd, diamond):
    r = fs4.resolve
    a = om4.cycle(r("const_a"), r("id_2"))
    sq = fs4.pullback_square(r("const_a"), r("one_to_a"))
    assert om4.pullback(sq, a) == om4.cycle(r("bang_2"), r("id_2"))
    assert om4.pullback(fs4.identity_square_vertical(r("const_a")), a) == a
    a = omd.cycle("x_top", "bot_x")
    sq = diamond.pullback_square("x_top", "y_top")
    assert omd.pullback(sq, a) == omd.cycle("bot_y", "id_bot")


def test_orient(fs4, om4):
    r = fs4.resolve
    x = om4.cycle(r("id_2"), r("id_2"))
    assert om4.orient("w35", x) == om4.cycle(r("id_2"), r("id_2"), ("w35",))
    y = om4.cycle(r("bang_2"), r("one_to_a"))
    assert om4.orient("w35", y) == om4.cycle(r("bang_2"), r("one_to_a"), ("w3",))
    assert om4.orient("w35", om4.zero(r("bang_2"))) == om4.zero(r("bang_2"))
    with pytest.raises(UnknownLabel):
        om4.orient("w3", y)


def test_rendering(fs4, om4):
    r = fs4.resolve
    x = om4.cycle(r("bang_2"), r("const_a")) - 2 * om4.cycle(r("bang_2"), r("id_2"), ("w35",))
    assert om4.render(x) == "1*[f22_aa ; ] + -2*[f22_ab ; w35] over f21_aa"
    assert om4.render(om4.zero(r("bang_2"))) == "0 over f21_aa"


# ------------------------------------------------------------ properties

@settings(max_examples=80, deadline=None)
@given(st.data())
def test_canonical_form_is_iso_invariant(fs3, data):
    om = UniversalTheory(fs3, fs3.fibered)
    x = data.draw(st.sampled_from(fs3.objects))
    v = data.draw(st.sampled_from(fs3.objects))
    homs = fs3.hom(v, x)
    if not homs:
        return
    h = data.draw(st.sampled_from(homs))
    labels = sorted(fs3.fibered.labels_over(v))
    bundles = tuple(sorted(data.draw(st.lists(st.sampled_from(labels), max_size=2)))) if labels else ()
    g = data.draw(st.sampled_from(fs3.isos(v, v)))
    moved = Cycle(fs3.compose(g, h), tuple(sorted(fs3.fibered.pull(g, t) for t in bundles)))
    canon = om.canonicalize(Cycle(h, bundles))
    assert om.canonicalize(moved) == canon
    assert om.canonicalize(canon) == canon


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_product_is_bilinear(fs3, data):
    om = UniversalTheory(fs3, fs3.fibered)
    bounds = Bounds(2, 1)
    f = data.draw(st.sampled_from(sorted(fs3.morphisms)))
    g = data.draw(st.sampled_from(sorted(fs3.morphisms_from(fs3.dst(f)))))
    gf, gg = om.elements(f, bounds), om.elements(g, bounds)
    if not gf or not gg:
        return
    coeffs = st.integers(-2, 2)
    a1, a2 = (data.draw(coeffs) * data.draw(st.sampled_from(gf)) for _ in range(2))
    b = data.draw(st.sampled_from(gg))
    try:
        lhs = om.product(a1 + a2, b)
        rhs = om.product(a1, b) + om.product(a2, b)
    except PullbackUnavailable:  # fs3 lacks products of size four
        return
    assert lhs == rhs
