import json

import pytest

from bivariant import dsl, mutants, suite
from bivariant.errors import NotApplicable, PullbackUnavailable
from bivariant.suite import Law, Row, Session, SuiteBounds, run_row
from bivariant.targets import FiberwiseTheory
from bivariant.universal import UniversalTheory


def session(cat, theory, **kw):
    return Session(cat, cat.fibered, theory, SuiteBounds(**kw))


def test_row_without_instances_is_not_applicable(fs2):
    row = Row("empty", "nothing to check", lambda s: [], lambda s, st: None)
    rep = run_row(session(fs2, UniversalTheory(fs2, fs2.fibered)), row)
    assert rep.status == suite.NOT_APPLICABLE and rep.instances == 0


def test_mostly_skipped_row_is_inconclusive(fs2):
    def build(s, struct, n):
        if n.value % 3:
            raise PullbackUnavailable("l", "r")
        return Law(dsl.Unit("1"), dsl.Unit("1"))

    row = Row("skippy", "", lambda s: [(None, [[dsl.Const(type("N", (), {"value": i})()) for i in range(9)]])],
              lambda s, st, n: build(s, st, n.value))
    rep = run_row(session(fs2, FiberwiseTheory(fs2, fs2.fibered)), row)
    assert (rep.instances, rep.passes, rep.skips) == (9, 3, 6)
    assert rep.status == suite.INCONCLUSIVE


def test_sampling_is_seeded(fs3):
    th = FiberwiseTheory(fs3, fs3.fibered)
    a = suite.check_bivariant_axioms(fs3, th, SuiteBounds(2, 1, cap=40, seed=7))
    b = suite.check_bivariant_axioms(fs3, th, SuiteBounds(2, 1, cap=40, seed=7))
    assert a.to_json() == b.to_json()
    b1 = a.row("B-1")
    assert b1.sampled and b1.instances == 40 and b1.total > 40
    json.loads(a.to_json())


def test_small_universal_certification(fs2):
    om = UniversalTheory(fs2, fs2.fibered)
    bounds = SuiteBounds(None, 1, cap=400)
    for rep in (suite.check_bivariant_axioms(fs2, om, bounds),
                suite.check_orientation_axioms(fs2, fs2.fibered, om, bounds),
                suite.check_grothendieck(fs2, fs2.fibered, FiberwiseTheory(fs2, fs2.fibered), bounds)):
        assert rep.ok, rep.to_text()
        # fs2 caps apexes at size 2, so some universal products are skipped
        assert all(r.status != suite.INCONCLUSIVE for r in rep.rows)


def test_additivity(fs4, diamond):
    bounds = SuiteBounds(3, 1)
    for th in (UniversalTheory(fs4, fs4.fibered), FiberwiseTheory(fs4, fs4.fibered)):
        rep = suite.check_additivity(fs4, th, bounds)
        assert rep.ok and rep.rows[0].instances > 0
    with pytest.raises(NotApplicable):
        suite.check_additivity(diamond, UniversalTheory(diamond, diamond.fibered), bounds)


def test_non_canonical_orientation_blocks_gamma(fs3):
    rep = suite.check_grothendieck(fs3, fs3.fibered, mutants.ThetaTwo(fs3, fs3.fibered),
                                   SuiteBounds(2, 1, cap=100))
    assert rep.row("theta-composition").status == suite.FAIL
    assert rep.row("gamma-preflight").status == suite.FAIL
    assert all(r.status == suite.BLOCKED for r in rep.rows if r.name.startswith("gamma-")
               and r.name != "gamma-preflight")


def test_counterexamples_replay_in_the_dsl(fs4):
    rep = suite.check_bivariant_axioms(fs4, mutants.PushMax(fs4, fs4.fibered),
                                       SuiteBounds(2, 1, cap=500))
    cex = rep.row("B-7").first_counterexample
    assert cex["lhs_value"] != cex["rhs_value"]
    honest = dsl.Evaluator(UniversalTheory(fs4, fs4.fibered), FiberwiseTheory(fs4, fs4.fibered))
    lhs = honest.evaluate(dsl.parse_expression(cex["lhs"], fs4))
    rhs = honest.evaluate(dsl.parse_expression(cex["rhs"], fs4))
    assert lhs == rhs
    text = rep.to_text()
    assert "B-7" in text and "FAILURES" in text
