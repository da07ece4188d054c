"""Fixed-locus membership, completeness scans, and exactness proofs."""

import pytest

from artifact.action import ActionMap
from artifact.badlocus import (
    LocusError, check_locus, compare_zero_sets, residual_generators,
    restrict_to_exceptional,
)
from artifact.blowup import base_chart, blow_up
from artifact.expr import parse_expression
from artifact.ring import RingContext

EIS = {2: (2, -2), 3: (3, 0, -3), 5: (5, -25, 25, 0, -5)}


def z2_tower():
    ctx = RingContext(2, ("x0", "x1", "e2"), mode="mixed", eis=EIS[2],
                      uniformizer={(0, 0, 1): 1})
    img = {
        "x0": parse_expression("-x0/(1+x0)", ctx),
        "x1": parse_expression("-x1/(1+x1)", ctx),
        "e2": parse_expression("2-e2", ctx),
    }
    base = base_chart("base", ctx, ActionMap(ctx, img))
    charts, _ = blow_up(base, ("x0", "x1", "e2"), "E0", [
        {"name": "u0", "keep": "x0", "rename": {"x1": "y1", "e2": "y2"}},
        {"name": "u2", "keep": "e2", "rename": {"x0": "y0", "x1": "y1"}},
    ])
    return charts


def f3_y1_chart():
    ctx = RingContext(3, ("x0", "x1", "x2"))
    img = {
        "x0": parse_expression("x0/(1+x1)", ctx),
        "x1": parse_expression("(x1+x0)/(1+x1)", ctx),
        "x2": parse_expression("x2/(1+x2)", ctx),
    }
    base = base_chart("base", ctx, ActionMap(ctx, img))
    charts, _ = blow_up(base, ("x0", "x1", "x2"), "E0", [
        {"name": "p1", "keep": "x1", "rename": {"x0": "y0", "x2": "y2"}},
    ])
    return charts[0]


def test_z2_u0_four_bad_points_exact():
    u0, _ = z2_tower()
    pts = [{"y1": a, "y2": b} for a in (0, 1) for b in (0, 1)]
    rep = check_locus(u0, "E0", {"E0": 1}, pts, [])
    assert rep.status == "exact", rep.detail
    assert rep.scanned_to == 4


def test_z2_u2_four_bad_points_exact():
    _, u2 = z2_tower()
    pts = [{"y0": a, "y1": b} for a in (0, 1) for b in (0, 1)]
    rep = check_locus(u2, "E0", {"E0": 1}, pts, [])
    assert rep.status == "exact", rep.detail


def test_z2_missing_point_is_caught():
    u0, _ = z2_tower()
    pts = [{"y1": a, "y2": b} for (a, b) in ((0, 0), (1, 0), (0, 1))]
    rep = check_locus(u0, "E0", {"E0": 1}, pts, [])
    assert rep.status == "fail"
    assert "unclaimed" in rep.detail or "zero set" in rep.detail


def test_z2_duplicate_points_collapse():
    u0, _ = z2_tower()
    pts = [{"y1": a, "y2": b} for a in (0, 1) for b in (0, 1)]
    rep = check_locus(u0, "E0", {"E0": 1}, pts + [{"y1": 0, "y2": 0}], [])
    assert rep.status == "exact"


def test_z2_overstated_multiplicity():
    u0, _ = z2_tower()
    with pytest.raises(LocusError) as ei:
        residual_generators(u0, {"E0": 2})
    assert "does not contain" in str(ei.value)


def test_z2_understated_multiplicity():
    u0, _ = z2_tower()
    with pytest.raises(LocusError) as ei:
        residual_generators(u0, {})
    # with no divisor part every generator is divisible by x0
    assert "understated" in str(ei.value) or "pointwise" in str(ei.value)


def test_f3_fixed_line_exact():
    p1 = f3_y1_chart()
    rep = check_locus(p1, "E0", {}, [], [{"var": "y0", "value": 0}])
    assert rep.status == "exact", rep.detail


def test_f3_fixed_line_wrong_claim():
    p1 = f3_y1_chart()
    rep = check_locus(p1, "E0", {}, [], [{"var": "y2", "value": 0}])
    assert rep.status == "fail"


def test_compare_zero_sets_heuristic_branch():
    # x^2+1 over F_3 is irreducible: roots exist only upstairs, and the
    # empty claim set survives the scan without an exactness certificate
    ctx = RingContext(3, ("a", "b"))
    f = parse_expression("a^2+1+b-b", ctx).num  # a^2+1 as a Poly
    g = parse_expression("b", ctx).num
    rep = compare_zero_sets(3, ("a", "b"), [f * f + g - g, g], [], [], max_k=1)
    # roots of a^2+1 appear over GF(9); with max_k=1 they are missed
    assert rep.status in ("heuristic", "fail")
    rep2 = compare_zero_sets(3, ("a", "b"), [f, g], [], [], max_k=2)
    assert rep2.status == "fail"
    assert "GF(3^2)" in rep2.detail


def test_restriction_requires_p_vanishing():
    u0, _ = z2_tower()
    gens, _ = residual_generators(u0, {"E0": 1})
    tctx, rgens = restrict_to_exceptional(u0, "E0", gens)
    assert tctx.variables == ("y1", "y2")
    assert tctx.p == 2
