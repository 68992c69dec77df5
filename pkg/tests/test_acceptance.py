"""Acceptance criteria 1-8.  Each test records one pass/fail line that is
printed in the terminal summary."""

import io
import json
import time
from contextlib import contextmanager

import pytest

from bivariant import transform
from bivariant.cli import run
from bivariant.errors import NotApplicable
from bivariant.mutants import MUTANTS, run_mutant
from bivariant.suite import (
    FAIL,
    SuiteBounds,
    check_additivity,
    check_bivariant_axioms,
    check_grothendieck,
    check_orientation_axioms,
)
from bivariant.targets import FiberwiseTheory, FiberwiseValue
from bivariant.universal import UniversalTheory

from conftest import ACCEPTANCE, FIXTURES
from test_universal import engine_class, oracle_classes

TIME_LIMIT = 120.0

REQUIRED_ROWS = (
    ["B-1", "B-2", "B-3", "B-4", "B-5", "B-6", "B-7", "unit-right", "unit-left", "commutativity",
     "theta-composition", "theta-identity", "theta-nice",
     "O-1", "O-2", "O-3a", "O-3b", "O-4", "O-5"])
OBSERVATIONS = ["observation-product", "observation-decomposition"]

CRITERION_1 = {
    "diamond": ["check", "--category", str(FIXTURES / "diamond.json"), "--fibered",
                "--target", "universal", "--max-source", "none", "--max-bundles", "2",
                "--coeff-range=-2,2", "--format", "json"],
    "fs4": ["check", "--category", str(FIXTURES / "fs4.json"), "--fibered",
            "--target", "universal", "--max-source", "2", "--max-bundles", "1",
            "--cap", "10000", "--format", "json"],
}


@contextmanager
def criterion(number, title):
    info = {"detail": ""}
    try:
        yield info
    except BaseException:
        ACCEPTANCE.append((number, title, False, info["detail"]))
        print(f"[FAIL] criterion {number}: {title}")
        raise
    ACCEPTANCE.append((number, title, True, info["detail"]))
    print(f"[PASS] criterion {number}: {title} ({info['detail']})")


def cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def all_rows(payload):
    return {r["name"]: r for rep in payload["reports"] for r in rep["rows"]}


@pytest.fixture(scope="module")
def criterion_1_runs():
    runs = {}
    for name, argv in CRITERION_1.items():
        start = time.perf_counter()
        code, out, err = cli(argv)
        runs[name] = (code, out, err, time.perf_counter() - start)
    return runs


def test_criterion_1_universal_certification(criterion_1_runs):
    with criterion(1, "universal theory passes every axiom row on diamond and fs4") as c:
        notes = []
        for name, (code, out, err, seconds) in criterion_1_runs.items():
            assert code == 0, err or out
            payload = json.loads(out)
            rows = all_rows(payload)
            for required in REQUIRED_ROWS + OBSERVATIONS:
                assert required in rows, required
                assert rows[required]["status"] == "pass", rows[required]
            assert sum(r["failures"] for r in rows.values()) == 0
            if name == "diamond":
                assert not any(r["sampled"] for r in rows.values())
            assert seconds < TIME_LIMIT, f"{name} took {seconds:.1f}s"
            notes.append(f"{name}: {sum(r['instances'] for r in rows.values())} instances "
                         f"in {seconds:.1f}s")
        c["detail"] = "; ".join(notes)


def test_criterion_2_generator_count(fs4):
    with criterion(2, "six generators over 2 -> pt agree with the brute-force oracle") as c:
        code, out, _ = cli(["generators", "--category", str(FIXTURES / "fs4.json"),
                            "--context", "bang_2", "--max-source", "2", "--max-bundles", "0",
                            "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["count"] == 6
        om = UniversalTheory(fs4)
        gens = om.generators(fs4.resolve("bang_2"))
        assert [g.render() for g in gens] == payload["generators"]
        assert {engine_class(g) for g in gens} == oracle_classes(2, 2, 0)
        c["detail"] = ", ".join(payload["generators"])


def test_criterion_3_fiberwise_certification(fs4):
    with criterion(3, "fiberwise target passes bivariant and orientation checks on fs4") as c:
        fw = FiberwiseTheory(fs4, fs4.fibered)
        bounds = SuiteBounds(2, 1, cap=10000)
        reps = [check_bivariant_axioms(fs4, fw, bounds, fs4.fibered),
                check_orientation_axioms(fs4, fs4.fibered, fw, bounds)]
        for rep in reps:
            assert rep.ok, rep.to_text()
            for r in rep.rows:
                assert r.failures == 0 and r.skips == 0, r.to_dict()
        c["detail"] = f"{sum(r.instances for rep in reps for r in rep.rows)} instances, 0 skips"


def test_criterion_4_grothendieck(fs4):
    with criterion(4, "universal transformation into fiberwise on fs4, exhaustive") as c:
        fw = FiberwiseTheory(fs4, fs4.fibered)
        rep = check_grothendieck(fs4, fs4.fibered, fw, SuiteBounds(2, 1))
        assert rep.ok, rep.to_text()
        assert not any(r.sampled for r in rep.rows)
        for name in ("gamma-normalization", "gamma-product", "gamma-pushforward", "gamma-pullback",
                     "gamma-orientation", "gamma-representative", "gamma-closed-form"):
            assert rep.row(name).status == "pass" and rep.row(name).instances > 0
        c["detail"] = f"{sum(r.instances for r in rep.rows)} instances"


def test_criterion_5_worked_values(fs4):
    with criterion(5, "worked values reproduce exactly") as c:
        r = fs4.resolve
        om = UniversalTheory(fs4, fs4.fibered)
        fw = FiberwiseTheory(fs4, fs4.fibered)
        assert transform.gamma(fw, om.cycle(r("bang_2"), r("const_a"))).values == (2, 0)
        prod = om.product(om.cycle(r("swap"), r("id_2")), om.cycle(r("bang_2"), r("const_a")))
        assert prod == om.cycle(r("bang_2"), r("const_b"))
        ext = transform.exterior_contravariant(fw, FiberwiseValue(r("id_2"), (1, 2)),
                                               FiberwiseValue(r("id_2"), (3, 4)))
        assert ext.values == (3, 4, 6, 8)
        gp = transform.gysin_pullback(fw, r("const_a"), FiberwiseValue(r("bang_2"), (3, 7)))
        assert gp.values == (3, 3)
        c["detail"] = "gamma (2,0); product [const_b]; exterior (3,4,6,8); Gysin (3,3)"


def test_criterion_6_mutants(fs4):
    with criterion(6, "every fault-injected mutant is caught by its row") as c:
        assert len(MUTANTS) >= 10
        survivors = []
        for m in MUTANTS:
            rep = run_mutant(m, fs4, fs4.fibered, SuiteBounds(2, 1, cap=2000))
            row = rep.row(m.row)
            if row.status != FAIL or not row.first_counterexample:
                survivors.append(m.name)
        assert survivors == []
        c["detail"] = f"{len(MUTANTS)} mutants, 0 survivors"


def test_criterion_7_additivity(fs4, diamond):
    with criterion(7, "additivity on fs4 up to size 3; not applicable on diamond") as c:
        bounds = SuiteBounds(3, 1)
        counts = []
        for th in (UniversalTheory(fs4, fs4.fibered), FiberwiseTheory(fs4, fs4.fibered)):
            rep = check_additivity(fs4, th, bounds)
            assert rep.ok, rep.to_text()
            counts.append(f"{th.name} {rep.rows[0].instances}")
        with pytest.raises(NotApplicable):
            check_additivity(diamond, UniversalTheory(diamond, diamond.fibered), bounds)
        c["detail"] = ", ".join(counts)


def test_criterion_8_cli_determinism(criterion_1_runs):
    with criterion(8, "criterion-1 reports are byte-identical; bundled examples evaluate") as c:
        for name, argv in CRITERION_1.items():
            code, out, _ = cli(argv)
            assert code == 0
            assert out == criterion_1_runs[name][1], name
        evaluated = 0
        for name, extra in (("fs4", ["--target", "fiberwise"]), ("diamond", [])):
            code, out, err = cli(["eval", "--category", str(FIXTURES / f"{name}.json"), "--fibered",
                                  "--expr", str(FIXTURES / f"{name}_examples.expr"),
                                  "--format", "json", *extra])
            assert code == 0, err
            results = json.loads(out)["results"]
            assert all(r["round_trip"] for r in results)
            evaluated += len(results)
        c["detail"] = f"{evaluated} example expressions"
