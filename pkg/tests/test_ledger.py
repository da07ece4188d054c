"""Discrepancy bookkeeping across a tower of blow-ups."""

from fractions import Fraction

import pytest

from artifact.ledger import Ledger, LedgerError, assemble_verdict
from artifact.quotient import RamificationReport


def fierce(i):
    return RamificationReport("t", "fierce", i, 4 * i, 1)


def wild(i):
    return RamificationReport("t", "wild", i, 4 * i, 5)


def unram():
    return RamificationReport("t", "unramified", 0, 0, 1)


def test_single_blowup_point():
    led = Ledger(2)
    led.record_blowup("E0", "point", {})
    led.record_ramification("E0", RamificationReport("x0", "fierce", 1, 1, 1))
    disc = led.solve_discrepancies()
    assert disc == {"E0": Fraction(1)}


def test_degree_five_chain():
    # the seven-stage tower: canonical coefficients then discrepancies
    led = Ledger(5)
    led.record_blowup("E0", "point", {})
    led.record_blowup("E1", "curve", {"E0": 1})
    led.record_blowup("E2", "curve", {"E0": 1, "E1": 1})
    led.record_blowup("E3", "point", {"E1": 1})
    led.record_blowup("E4", "curve", {"E1": 1})
    led.record_blowup("E5", "curve", {"E1": 1, "E4": 1})
    led.record_blowup("E6", "curve", {"E1": 1, "E5": 1})
    assert led.k == {"E0": 2, "E1": 3, "E2": 6, "E3": 5, "E4": 4,
                     "E5": 8, "E6": 12}
    led.record_ramification("E0", unram())
    led.record_ramification("E1", unram())
    led.record_ramification("E2", fierce(1))
    led.record_ramification("E3", fierce(1))
    led.record_ramification("E4", unram())
    led.record_ramification("E5", fierce(1))
    led.record_ramification("E6", fierce(2))
    disc = led.solve_discrepancies()
    assert disc == {"E0": 2, "E1": 3, "E2": 2, "E3": 1, "E4": 4,
                    "E5": 4, "E6": 4}


def test_degree_three_chain():
    led = Ledger(3)
    led.record_blowup("E0", "point", {})
    led.record_blowup("E1", "curve", {"E0": 1})
    assert led.k == {"E0": 2, "E1": 3}
    led.record_ramification("E0", unram())
    led.record_ramification("E1", RamificationReport("x1", "fierce", 1, 2, 1))
    disc = led.solve_discrepancies()
    assert disc == {"E0": 2, "E1": 1}


def test_missing_report_is_loud():
    led = Ledger(3)
    led.record_blowup("E0", "point", {})
    led.record_blowup("E1", "curve", {"E0": 1})
    led.record_ramification("E0", unram())
    with pytest.raises(LedgerError) as ei:
        led.solve_discrepancies()
    assert "E1" in str(ei.value)


def test_duplicate_and_unknown_symbols():
    led = Ledger(2)
    led.record_blowup("E0", "point", {})
    with pytest.raises(LedgerError):
        led.record_blowup("E0", "point", {})
    with pytest.raises(LedgerError):
        led.record_blowup("E1", "curve", {"E9": 1})
    with pytest.raises(LedgerError):
        led.record_blowup("E2", "plane", {})


def test_wild_divisor_index():
    # wild ramification divides the pullback index into the discrepancy
    led = Ledger(2)
    led.record_blowup("E0", "point", {})
    led.record_ramification("E0", RamificationReport("x", "wild", 2, 2, 2))
    disc = led.solve_discrepancies()
    assert disc == {"E0": Fraction(0)}


def test_assemble_verdict():
    disc = {"E0": Fraction(1)}
    good = [{"label": "P1", "classification": "Terminal"},
            {"label": "P2", "classification": "Regular"}]
    v = assemble_verdict(disc, good)
    assert v.verdict == "terminal"

    v2 = assemble_verdict({"E0": Fraction(0)}, good)
    assert v2.verdict == "canonical-not-terminal"
    v2b = assemble_verdict({"E0": Fraction(-1)}, good)
    assert v2b.verdict == "not-canonical"

    mixed = [{"label": "P1", "classification": "Canonical", "pair_ok": True}]
    v3 = assemble_verdict(disc, mixed)
    assert v3.verdict == "terminal"

    bad = [{"label": "P1", "classification": "Canonical", "pair_ok": False}]
    v4 = assemble_verdict(disc, bad)
    assert v4.verdict == "undetermined"
    assert "P1" in v4.detail

    worse = [{"label": "P1", "classification": "NotCanonical"}]
    v5 = assemble_verdict(disc, worse)
    assert v5.verdict == "undetermined"
    assert "P1" in v5.detail

    rescued = [{"label": "P1", "classification": "NotCanonical",
                "pair_ok": True}]
    v6 = assemble_verdict(disc, rescued)
    assert v6.verdict == "terminal"
