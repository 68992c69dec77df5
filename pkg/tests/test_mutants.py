import pytest

from bivariant.mutants import MUTANTS, run_mutant
from bivariant.suite import FAIL, SuiteBounds


def test_enough_mutants():
    assert len(MUTANTS) >= 10
    assert len({m.name for m in MUTANTS}) == len(MUTANTS)
    rows = {m.row for m in MUTANTS}
    for family in ("B-1", "B-2", "B-3", "B-4", "B-5", "B-6", "B-7", "O-1", "O-2", "O-4", "O-5"):
        assert family in rows


@pytest.mark.parametrize("mutant", MUTANTS, ids=lambda m: m.name)
def test_mutant_is_caught_by_its_row(fs3, mutant):
    rep = run_mutant(mutant, fs3, fs3.fibered, SuiteBounds(2, 1, cap=300))
    row = rep.row(mutant.row)
    assert row.status == FAIL, rep.to_text()
    assert row.first_counterexample
    assert not rep.ok
