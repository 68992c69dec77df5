import pytest

from bivariant import transform
from bivariant.errors import MissingOrientationData, NotApplicable, NotSpecialized
from bivariant.targets import FiberwiseTheory, FiberwiseValue, TheoryAdapter, make_adapter
from bivariant.universal import Cycle, UniversalTheory


@pytest.fixture(scope="module")
def fw(fs4):
    return FiberwiseTheory(fs4, fs4.fibered)


@pytest.fixture(scope="module")
def om(fs4):
    return UniversalTheory(fs4, fs4.fibered)


@pytest.fixture(scope="module")
def r(fs4):
    return fs4.resolve


def v(ctx, *vals):
    return FiberwiseValue(ctx, tuple(vals))


def test_product(fw, r):
    assert fw.product(v(r("id_2"), 1, 1), v(r("bang_2"), 1, 1)) == v(r("bang_2"), 1, 1)
    assert fw.product(v(r("id_2"), 2, 3), v(r("bang_2"), 5, 7)) == v(r("bang_2"), 10, 21)
    assert fw.product(v(r("const_a"), 1, 1), v(r("bang_2"), 5, 7)) == v(r("bang_2"), 5, 5)


def test_pushforward(fw, r):
    a = v(r("bang_2"), 1, 1)
    assert fw.pushforward(r("id_2"), r("bang_2"), a) == a
    assert fw.pushforward(r("const_a"), r("bang_2"), a) == v(r("bang_2"), 2, 0)
    assert fw.pushforward(r("bang_2"), r("id_1"), v(r("bang_2"), 3, 4)) == v(r("id_1"), 7)


def test_pullback(fs4, fw, r):
    a = v(r("bang_2"), 3, 7)
    assert fw.pullback(fs4.identity_square_vertical(r("bang_2")), a) == a
    sq = fs4.identity_square_horizontal(r("swap"))
    assert fw.pullback(sq, v(r("id_2"), 3, 7)) == v(r("id_2"), 7, 3)
    sq = fs4.pullback_square(r("bang_2"), r("empty_1"))
    assert fw.pullback(sq, a).values == ()


def test_theta_unit_phi(fw, r):
    assert fw.theta(r("const_a")) == v(r("const_a"), 1, 1)
    assert fw.unit("2") == v(r("id_2"), 1, 1)
    a = v(r("bang_2"), 1, 1)
    assert fw.phi("w35", a) == v(r("bang_2"), 3, 5)
    assert fw.phi("w35", fw.phi("w53", a)) == fw.phi("w53", fw.phi("w35", a))
    assert fw.render(v(r("bang_2"), 2, 0)) == "(a↦2, b↦0)"


def test_adapter_selection(fs4, diamond):
    assert isinstance(make_adapter("fiberwise", fs4, fs4.fibered), FiberwiseTheory)
    with pytest.raises(NotApplicable):
        make_adapter("fiberwise", diamond)
    with pytest.raises(NotApplicable):
        make_adapter("nope", fs4)


def test_gamma_values(fs4, fw, om, r):
    assert transform.gamma(fw, om.cycle(r("bang_2"), r("const_a"))) == v(r("bang_2"), 2, 0)
    labelled = om.cycle(r("bang_2"), r("id_2"), ("w35",))
    for order in (transform.FORWARD, transform.REVERSE):
        assert transform.gamma(fw, labelled, order) == v(r("bang_2"), 3, 5)
    for f in ("const_a", "bang_3", "one_to_b"):
        f = r(f)
        assert transform.gamma(fw, om.cycle(f, fs4.identity(fs4.src(f)))) == fw.theta(f)


def test_gamma_decomposition_agrees(fs4, fw, om, r):
    ctx = r("bang_2")
    for cyc in om.generators(ctx, om_bounds()):
        a = om.cycle(ctx, cyc.h, cyc.bundles)
        assert transform.gamma(fw, a) == transform.gamma_via_decomposition(om, fw, a)
        assert transform.decompose(om, ctx, cyc) == a


def om_bounds():
    from bivariant.universal import Bounds
    return Bounds(2, 2)


def test_gamma_needs_orientation_data(fs4, om, r):
    class Bare(TheoryAdapter):
        name = "bare"

    with pytest.raises(MissingOrientationData):
        transform.gamma_of_cycle(Bare(fs4), r("bang_2"), Cycle(r("id_2"), ("w35",)))


def test_gysin_pullback(fw, r):
    a = v(r("bang_2"), 3, 7)
    assert transform.gysin_pullback(fw, r("id_2"), a) == a
    assert transform.gysin_pullback(fw, r("const_a"), a) == v(r("bang_2"), 3, 3)
    assert transform.gysin_pullback(fw, r("bang_2"), v(r("bang_1"), 5)) == v(r("bang_2"), 5, 5)


def test_gysin_pushforward(fw, r):
    a = v(r("id_2"), 1, 1)
    assert transform.gysin_pushforward(fw, r("id_2"), a) == a
    assert transform.gysin_pushforward(fw, r("const_a"), a) == v(r("id_2"), 2, 0)
    assert transform.gysin_pushforward(fw, r("swap"), v(r("id_2"), 1, 2)) == v(r("id_2"), 2, 1)


def test_exterior_products(fs4, fw, r):
    a, b = v(r("id_2"), 1, 2), v(r("id_2"), 3, 4)
    ab = transform.exterior_contravariant(fw, a, b)
    assert ab.values == (3, 4, 6, 8)
    ba = transform.exterior_contravariant(fw, b, a)
    # swapping the factors relabels the pairs (x, y) -> (y, x)
    assert tuple(ab.values[2 * y + x] for x in range(2) for y in range(2)) == ba.values
    ca, cb = v(r("bang_2"), 1, 2), v(r("bang_2"), 3, 4)
    assert transform.exterior_covariant(fw, ca, cb).values == (3, 4, 6, 8)
    one = fw.unit("1")
    assert transform.exterior_contravariant(fw, one, a).values == a.values


def test_fundamental_class(fs4, fw, om, r):
    assert transform.fundamental_class(fw, "2") == v(r("bang_2"), 1, 1)
    assert transform.fundamental_class(fw, "1") == fw.unit("1")
    assert transform.fundamental_class(om, "2") == om.cycle(r("bang_2"), r("id_2"))


def test_fundamental_class_needs_specialized(diamond):
    from bivariant import fixtures
    from bivariant.catcore import load_category
    doc = fixtures.diamond_document()
    doc["specialized"] = [diamond.identity(o) for o in diamond.objects]
    with pytest.raises(NotSpecialized):
        transform.fundamental_class(UniversalTheory(load_category(doc)), "x")


def test_product_map(fs4, r):
    f = transform.product_map(fs4, r("const_a"), r("id_1"))
    assert fs4.src(f) == "2" and fs4.dst(f) == "2"
    assert f == r("const_a")
