import copy
import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from bivariant import fixtures
from bivariant.catcore import (
    Square,
    load_category,
    pullback_label,
    validate_category,
)
from bivariant.errors import PullbackUnavailable, ResolveError, SchemaError

from conftest import FIXTURES


def count_all_maps(max_size):
    return sum(n ** m for m in range(max_size + 1) for n in range(max_size + 1))


def test_diamond_shape(diamond):
    assert len(diamond.objects) == 4
    assert len(diamond.morphisms) == 9
    assert diamond.final_object == "top"


def test_fs4_shape(fs4):
    assert len(fs4.objects) == 5
    assert len(fs4.morphisms) == count_all_maps(4) == 499
    assert fs4.final_object == "1"


@pytest.mark.parametrize("name", ["diamond", "fs2", "fs3", "fs4"])
def test_stored_fixtures_match_generator(name):
    assert (FIXTURES / f"{name}.json").read_text(encoding="utf-8") == fixtures.generate(name)


@pytest.mark.parametrize("name", ["diamond", "fs2", "fs3"])
def test_fixtures_validate(name, request):
    cat = request.getfixturevalue(name)
    report = validate_category(cat)
    assert report.ok and not report.violations


def test_fs4_validates(fs4):
    assert validate_category(fs4).violations == []


def test_compose(diamond, fs4):
    assert diamond.compose("bot_x", "x_top") == "bot_top"
    r = fs4.resolve
    assert fs4.compose(r("const_a"), r("swap")) == r("const_b")
    assert fs4.compose(r("id_2"), r("id_2")) == r("id_2")


def test_aliases_resolve(fs4):
    assert fs4.resolve("swap") == "f22_ba"
    with pytest.raises(ResolveError):
        fs4.resolve("no_such_map")


def test_fiber_products(diamond, fs4):
    pb = diamond.fiber_product("x_top", "y_top")
    assert (pb.apex, pb.proj_left, pb.proj_right) == ("bot", "bot_x", "bot_y")
    id2 = fs4.resolve("id_2")
    pb = fs4.fiber_product(id2, id2)
    assert (pb.apex, pb.proj_left, pb.proj_right) == ("2", id2, id2)
    with pytest.raises(PullbackUnavailable):
        fs4.fiber_product(fs4.resolve("bang_4"), fs4.resolve("bang_4"))


def test_independence(diamond, fs4):
    for f in ("const_a", "bang_3", "one_to_b"):
        assert fs4.is_independent(fs4.identity_square_vertical(fs4.resolve(f)))
        assert fs4.is_independent(fs4.identity_square_horizontal(fs4.resolve(f)))
    assert diamond.is_independent(Square("bot_x", "bot_y", "x_top", "y_top"))
    # commutes but the apex is too small
    sq = Square("f12_a", "f11_a", "f21_aa", "f11_a")
    assert fs4.commutes(sq)
    assert not fs4.is_independent(sq)


def test_isomorphic_over(fs4):
    id2, swap = fs4.resolve("id_2"), fs4.resolve("swap")
    assert fs4.isomorphic_over(id2, swap) == swap
    assert fs4.isomorphic_over(fs4.resolve("const_a"), fs4.resolve("const_b")) is None
    for h in ("const_a", "one_to_a", "bang_3"):
        h = fs4.resolve(h)
        assert fs4.isomorphic_over(h, h) == fs4.identity(fs4.src(h))


def test_isomorphic_over_is_an_equivalence(fs3):
    maps = list(fs3.hom("2", "3")) + list(fs3.hom("1", "3"))
    rel = {(a, b) for a in maps for b in maps if fs3.isomorphic_over(a, b) is not None}
    for a, b in rel:
        assert (b, a) in rel
    for a, b, c in itertools.product(maps, repeat=3):
        if (a, b) in rel and (b, c) in rel:
            assert (a, c) in rel


def test_weight_labels_pull_by_precomposition(fs4):
    fc = fs4.fibered
    assert pullback_label(fc, fs4, fs4.resolve("id_2"), "w35") == "w35"
    assert pullback_label(fc, fs4, fs4.resolve("const_a"), "w35") == "w33"
    assert pullback_label(fc, fs4, fs4.resolve("swap"), "w35") == "w53"


def test_diamond_labels_pull_by_meet(diamond):
    fc = diamond.fibered
    assert fc.pull("x_top", "w_y") == "w_bot"
    assert fc.pull("x_top", "w_x") == "w_x"


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_fibered_functoriality(fs3, data):
    fc = fs3.fibered
    g = data.draw(st.sampled_from(sorted(fs3.morphisms)))
    f = data.draw(st.sampled_from(sorted(fs3.morphisms_into(fs3.src(g)))))
    labels = fc.labels_over(fs3.dst(g))
    if not labels:
        return
    tok = data.draw(st.sampled_from(sorted(labels)))
    assert fc.pull(f, fc.pull(g, tok)) == fc.pull(fs3.compose(f, g), tok)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_declared_pullbacks_are_pullbacks(fs3, data):
    right = data.draw(st.sampled_from(sorted(fs3.morphisms)))
    bottom = data.draw(st.sampled_from(sorted(fs3.morphisms_into(fs3.dst(right)))))
    try:
        sq = fs3.pullback_square(right, bottom)
    except PullbackUnavailable:
        return
    assert fs3.commutes(sq)
    assert fs3.is_pullback_square(sq)
    assert fs3.is_pullback_square(sq.transpose())


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_pasted_pullbacks_are_pullbacks(fs3, data):
    right = data.draw(st.sampled_from(sorted(fs3.morphisms)))
    b1 = data.draw(st.sampled_from(sorted(fs3.morphisms_into(fs3.dst(right)))))
    b2 = data.draw(st.sampled_from(sorted(fs3.morphisms_into(fs3.src(b1)))))
    try:
        lower = fs3.pullback_square(right, b1)
        upper = fs3.pullback_square(lower.left, b2)
    except PullbackUnavailable:
        return
    outer = fs3.paste_horizontal(lower, upper)
    assert outer.right == right and outer.bottom == fs3.compose(b2, b1)
    assert fs3.is_pullback_square(outer)


def test_dangling_composition_reference():
    doc = fixtures.diamond_document()
    doc["compose"] = list(doc["compose"]) + [["bot_x", "nope", "bot_top"]]
    with pytest.raises(SchemaError):
        load_category(doc)


def test_duplicate_and_missing_fields():
    doc = fixtures.diamond_document()
    doc["objects"] = list(doc["objects"]) + [{"id": "x"}]
    with pytest.raises(SchemaError):
        load_category(doc)
    doc = fixtures.diamond_document()
    del doc["identities"]
    with pytest.raises(SchemaError):
        load_category(doc)
    with pytest.raises(SchemaError):
        load_category("{not json")


def test_corrupted_pullback_is_reported():
    doc = fixtures.finite_sets_document(4)
    rows = doc["pullbacks"]
    i = next(i for i, r in enumerate(rows) if r[0] == "f21_aa" and r[1] == "f21_aa")
    rows[i] = ["f21_aa", "f21_aa", "3", "f32_aab", "f32_aba"]
    report = validate_category(load_category(doc))
    assert not report.ok
    bad = [v for v in report.errors if v.code == "pullback-universal-property"]
    assert bad
    assert bad[0].witness["cospan"] == {"left": "f21_aa", "right": "f21_aa"}
    json.dumps(report.to_dict())


def test_specialized_class_missing_identity(diamond):
    doc = fixtures.diamond_document()
    doc["specialized"] = sorted(m for m in diamond.morphisms if m != "id_x")
    report = validate_category(load_category(doc))
    assert "specialized-identity" in report.codes()
    assert any(v.message == "specialized class missing identity" for v in report.errors)


def test_broken_associativity_is_reported():
    doc = fixtures.finite_sets_document(2)
    doc = copy.deepcopy(doc)
    rows = doc["compose"]
    # swap after swap must be the identity; point it at a constant instead
    i = next(i for i, r in enumerate(rows) if r[0] == "f22_ba" and r[1] == "f22_ba")
    rows[i] = ["f22_ba", "f22_ba", "f22_aa"]
    report = validate_category(load_category(doc))
    assert not report.ok
    assert "associativity" in report.codes() or "identity-law" in report.codes()
