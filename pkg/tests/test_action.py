"""Group actions: operators, order checks, expansion claims, witnesses.

The concrete actions here are the degree-2 ones (base chart and the two
interesting charts of the first blow-up); deeper charts are exercised via
the scenario suite.
"""

import pytest

from artifact.action import (
    ActionMap, ExpansionClaim, check_expansion_claim, shift_origin,
)
from artifact.expr import parse_expression
from artifact.ring import RationalExpr, RingContext, valuation_along

EIS2 = (2, -2)


def inversion_action():
    """tau(x) = 1/x on the torus, char 5 for variety."""
    ctx = RingContext(5, ("x",))
    x = ctx.var("x")
    return ActionMap(ctx, {"x": RationalExpr(ctx.one(), x)})


def base_chart_p2():
    """(x0, x1, e2) with tau = sigma of order 2, e2^2-2e2+2 = 0."""
    ctx = RingContext(2, ("x0", "x1", "e2"), mode="mixed", eis=EIS2,
                      uniformizer={(0, 0, 1): 1})
    img = {
        "x0": parse_expression("-x0/(1+x0)", ctx),
        "x1": parse_expression("-x1/(1+x1)", ctx),
        "e2": parse_expression("2-e2", ctx),
    }
    return ActionMap(ctx, img)


def chart_u0_p2():
    """First blow-up chart with coordinates (x0, y1, y2), e2 = x0*y2."""
    ctx = RingContext(2, ("x0", "y1", "y2"), mode="mixed", eis=EIS2,
                      uniformizer={(1, 0, 1): 1})
    img = {
        "x0": parse_expression("-x0/(1+x0)", ctx),
        "y1": parse_expression("y1*(1+x0)/(1+x0*y1)", ctx),
        "y2": parse_expression("-y2*(1-x0*y2)*(1+x0)", ctx),
    }
    return ActionMap(ctx, img)


def test_inversion_I():
    A = inversion_action()
    ctx = A.ctx
    x = ctx.var("x")
    got = A.I(x)
    assert got == RationalExpr(1 - x * x, x)


def test_base_chart_order_and_witness():
    A = base_chart_p2()
    assert A.check_order()
    ctx = A.ctx
    f = ctx.var("e2") - 1
    ok, detail = A.cm_witness(f, {})
    assert ok, detail
    # trace of e2 is 2 (= minus the subleading relation coefficient)
    assert A.trace(ctx.var("e2")) == 2
    # non-witness: a non-unit
    ok2, _ = A.cm_witness(ctx.var("x0") * (ctx.var("e2") - 1), {})
    assert not ok2


def test_base_chart_fixed_point_and_domain():
    import artifact.action as action_mod
    A = base_chart_p2()
    assert A.is_fixed_point({})
    # tau(x0) = -x0/(1+x0) leaves the F_2-point x0=1 outside its domain
    with pytest.raises(action_mod.ActionError):
        A.is_fixed_point({"x0": 1})


def test_wrong_characteristic_order():
    # translation has order 3 in char 3, so asking for order 2 must fail
    ctx = RingContext(3, ("x",))
    A = ActionMap(ctx, {"x": RationalExpr(ctx.var("x") + 1)})
    assert not A.check_order(order=2)
    assert A.check_order()
    ctx2 = RingContext(2, ("x",))
    B = ActionMap(ctx2, {"x": RationalExpr(ctx2.var("x") + 1)})
    assert B.check_order()


def test_relation_preservation_detects_bad_image():
    ctx = RingContext(2, ("x0", "e2"), mode="mixed", eis=EIS2,
                      uniformizer={(0, 1): 1})
    bad = ActionMap(ctx, {
        "x0": RationalExpr(ctx.var("x0")),
        "e2": RationalExpr(ctx.var("e2") + 1),  # does not satisfy the relation
    })
    assert not bad.preserves_relation()
    assert not bad.check_order()


def test_u0_chart_order_and_derived_formulas():
    A = chart_u0_p2()
    ctx = A.ctx
    assert A.check_order()
    # I(x0) = x0^2 (-1 - x0 y2^2 + x0^2 y2^3) / (1+x0)
    want = parse_expression("x0^2*(-1-x0*y2^2+x0^2*y2^3)/(1+x0)", ctx)
    assert A.I(ctx.var("x0")) == want
    # I(y1) = x0 y1 (1-y1) / (1+x0 y1)
    want1 = parse_expression("x0*y1*(1-y1)/(1+x0*y1)", ctx)
    assert A.I(ctx.var("y1")) == want1
    # I(y2) = x0 y2 (-1 - y2 + x0 y2 + x0 y2^2), exactly (unit denominator 1)
    want2 = parse_expression("x0*y2*(-1-y2+x0*y2+x0*y2^2)", ctx)
    assert A.I(ctx.var("y2")) == want2


def test_expansion_claims_u0():
    A = chart_u0_p2()
    ctx = A.ctx
    claim = ExpansionClaim(
        target="x0",
        monomial={"x0": 2},
        body=parse_expression("-1-x0*y2^2+x0^2*y2^3", ctx).num,
        denominator=parse_expression("1+x0", ctx).num,
    )
    ok, detail = check_expansion_claim(claim, A)
    assert ok, detail

    # same claim as a truncated expansion with error ideal (x0)
    truncated = ExpansionClaim(
        target="x0",
        monomial={"x0": 2},
        body=parse_expression("-1-x0*y2^2+x0^2*y2^3", ctx).num * parse_expression("1", ctx).num,
        denominator=parse_expression("1+x0", ctx).num,
        error_monomial={"x0": 3},
    )
    ok2, _ = check_expansion_claim(truncated, A)
    assert ok2

    perturbed = ExpansionClaim(
        target="x0",
        monomial={"x0": 2},
        body=parse_expression("-1-x0*y2^2+x0^2*y2^3+1", ctx).num,
        denominator=parse_expression("1+x0", ctx).num,
    )
    ok3, why = check_expansion_claim(perturbed, A)
    assert not ok3 and why

    overclaimed = ExpansionClaim(target="y1", monomial={"x0": 2},
                                 body=ctx.var("y1"))
    ok4, why4 = check_expansion_claim(overclaimed, A)
    assert not ok4 and "divisible" in why4


def test_invariant_norm():
    A = chart_u0_p2()
    ctx = A.ctx
    # the norm of 1+x0 is invariant: sigma fixes it and I kills it
    n = A.norm(1 + ctx.var("x0"))
    assert A.sigma(n) == n
    assert A.I(n).is_zero()


def test_fixed_scheme_generators_base():
    A = base_chart_p2()
    gens = A.fixed_scheme_generators()
    ctx = A.ctx
    # I(e2) = 2 - 2e2, numerator up to the fraction cleanups
    assert any(g == 1 - ctx.var("e2") or g == ctx.const(2) - 2 * ctx.var("e2")
               for g in gens)
    # every generator vanishes at the fixed origin
    from artifact.ring import residue_at
    for g in gens:
        assert residue_at(g, {}) == 0


def test_shift_origin_roundtrip():
    A = chart_u0_p2()
    ctx = A.ctx
    B = shift_origin(A, {"y1": 1}, renames={"y1": "t1"})
    assert B.ctx.variables == ("x0", "t1", "y2")
    assert B.check_order()
    # the shifted point is now the origin and it is fixed
    assert B.is_fixed_point({})
    # I(t1) picks up the recentered formula; valuation along x0 still 1
    it = B.I(B.ctx.var("t1"))
    assert valuation_along(it.num, "x0") == 1
    # shifting back is the identity on formulas
    C = shift_origin(B, {"t1": -1}, renames={"t1": "y1"})
    for name in ctx.variables:
        assert C.images[name] == RationalExpr(
            C.ctx.from_terms(A.images[name].num.terms),
            C.ctx.from_terms(A.images[name].den.terms))


def test_shift_by_zero_is_identity():
    A = base_chart_p2()
    B = shift_origin(A, {})
    for name in A.ctx.variables:
        assert B.images[name].num.terms == A.images[name].num.terms
        assert B.images[name].den.terms == A.images[name].den.terms


def test_trace_examples_p3():
    eis3 = (3, 0, -3)
    ctx = RingContext(3, ("x0", "x1", "e2"), mode="mixed", eis=eis3,
                      uniformizer={(0, 0, 1): 1})
    img = {
        "x0": parse_expression("(x0-3*x1)/(1+x1)", ctx),
        "x1": parse_expression("(x0-2*x1)/(1+x1)", ctx),
        "e2": parse_expression("3+e2-e2^2", ctx),
    }
    A = ActionMap(ctx, img)
    assert A.check_order()
    assert A.trace(ctx.var("e2")) == 3
    ok, detail = A.cm_witness(1 - ctx.var("e2"), {})
    assert ok, detail
    assert A.is_fixed_point({})
    assert not A.is_fixed_point({"x0": 1})
