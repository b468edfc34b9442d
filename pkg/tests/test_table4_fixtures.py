"""The quartic-family decision tables and the shipped fixture registry."""
import time

import pytest

from cqlab.fixtures import fixtures, get_fixture, run_fixtures
from cqlab.multipliers import lambda0
from cqlab.table4 import (EXTRA, TABLE_A, TABLE_B, TableSpec, cell_instance, cell_name, format_table,
                          label_matches, run_table)


@pytest.fixture(scope="module")
def table():
    t0 = time.perf_counter()
    results = run_table()
    return results, time.perf_counter() - t0


def test_every_cell_matches(table):
    results, seconds = table
    assert len(results) == len(TABLE_A) + len(TABLE_B) + len(EXTRA) == 14
    bad = [(r.cell, r.expected, r.produced) for r in results if not r.match]
    assert not bad
    assert seconds < 60


def test_probe_only_cells_never_claim_holds(table):
    results, _ = table
    for r in results:
        if r.expected == "Def." or r.expected.startswith("probe"):
            assert r.produced.startswith("probe"), r.cell


def test_labels_agree_with_the_quartic_form():
    """Polynomial labels need <(0,0,1), F> = a x1^2 + b x1^4 + c x2^2 + d x2^4 <= 0,
    i.e. every coefficient nonpositive; a > 0 forces the probe-only outcome."""
    for cell, label in TableSpec().cells.items():
        a, b, c, d = cell
        if label.startswith("Polyn."):
            assert max(cell) <= 0, cell
        if a > 0:
            assert label.startswith("probe")


def test_multipliers_of_every_cell():
    for cell in TableSpec().cells:
        ms = lambda0(cell_instance(cell))
        assert ms.describe() == "R+(0, 0, 1)"


def test_label_matching():
    assert label_matches("Def.", "probe: BOUNDED")
    assert label_matches("Def.", "probe: INCONCLUSIVE")
    assert not label_matches("Def.", "Pseudo-normality")
    assert label_matches("4th-OSC", "4th-OSC") and not label_matches("4th-OSC", "Dir. 4th-OSC")


def test_format_table_summary(table):
    results, _ = table
    text = format_table(results)
    assert text.rstrip().endswith("14 cells, 0 mismatches")
    assert all(cell_name(r.cell) for r in results)


# --- fixture registry --------------------------------------------------------------------------

def test_registry_contents():
    reg = fixtures()
    for name in ("ex31", "ex32", "ex33", "ex34", "ex36", "mpcc_demo", "mpvc_demo", "mpsc_demo"):
        assert name in reg and reg[name].description
    assert sum(n.startswith("ex41_") for n in reg) == 14


def test_fixtures_load_and_pass():
    for fx in fixtures().values():
        inst = fx.load()
        assert inst.name == fx.name
    outcomes = run_fixtures()
    assert all(o.passed for o in outcomes), [o.line() for o in outcomes if not o.passed]


def test_unknown_fixture():
    with pytest.raises(KeyError):
        get_fixture("nope")
