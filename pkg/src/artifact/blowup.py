"""Blow-ups along invariant coordinate centers, with action transport.

Each blow-up of a chart along a coordinate subscheme produces one new
affine chart per center generator.  This module builds those charts,
rewrites the group action in the new coordinates (dividing out the kept
generator exactly, through the p-rewrite when the mixed-characteristic
uniformizer is involved), and follows exceptional divisors through the
tower as strict transforms.
"""

from .action import ActionMap
from .ring import (
    Poly, RationalExpr, RingError, Substituter, local_divide, valuation_along,
)


class BlowupError(RuntimeError):
    pass


class Chart:
    """One affine piece of one stage of the tower.

    divisors maps exceptional symbols to their local equations here;
    None means the divisor misses the chart entirely.
    """

    __slots__ = ("name", "stage", "ctx", "action", "divisors", "parent",
                 "keep", "renames", "center_fixed")

    def __init__(self, name, stage, ctx, action, divisors, parent=None,
                 keep=None, renames=None, center_fixed=True):
        self.name = name
        self.stage = stage
        self.ctx = ctx
        self.action = action
        self.divisors = divisors
        self.parent = parent
        self.keep = keep
        self.renames = renames
        self.center_fixed = center_fixed

    def __repr__(self):
        return "Chart(%s, stage %d, %s)" % (
            self.name, self.stage, list(self.ctx.variables))


def base_chart(name, ctx, action, divisors=None):
    return Chart(name, 0, ctx, action, dict(divisors or {}))


def _center_pointwise_fixed(action, center):
    """Does the action fix the center pointwise?

    Checked on coordinate differences restricted to the center; in the
    mixed ring p itself lies in the center ideal exactly when every term
    of the uniformizer involves a center variable.
    """
    ctx = action.ctx
    sub = {c: 0 for c in center}
    p_in_center = ctx.mode == "char_p"
    if ctx.mode == "mixed":
        terms = ctx.uniformizer.terms
        for c in center:
            i = ctx.index(c)
            if all(m[i] > 0 for m in terms):
                p_in_center = True
                break

    def restricted_zero(f):
        r = f.substitute(sub)
        if r.is_zero():
            return True
        if p_in_center:
            return all(cc % ctx.p == 0 for cc in r.terms.values())
        return False

    for v in ctx.variables:
        diff = action.I(ctx.var(v))
        if not restricted_zero(diff.num):
            return False
        if restricted_zero(diff.den):
            # the action is not even defined along the center
            return False
    return True


def _one_chart(parent, center, exc_symbol, plan, center_fixed):
    ctx = parent.ctx
    name = plan["name"]
    keep = plan["keep"]
    renames = dict(plan.get("rename", {}))
    if keep not in center:
        raise BlowupError("chart %s keeps %r, not a center generator"
                          % (name, keep))
    others = [c for c in center if c != keep]
    if sorted(renames) != sorted(others):
        raise BlowupError("chart %s must rename exactly the non-kept center "
                          "generators %s" % (name, others))
    new_vars = tuple(renames.get(v, v) for v in ctx.variables)
    if len(set(new_vars)) != len(new_vars):
        raise BlowupError("coordinate name collision in chart %s" % name)

    u_terms = None
    if ctx.mode == "mixed":
        ki = ctx.index(keep)
        rcols = [ctx.index(c) for c in renames]
        u_terms = {}
        for m, c in ctx.uniformizer.terms.items():
            mm = list(m)
            mm[ki] += sum(m[i] for i in rcols)
            key = tuple(mm)
            u_terms[key] = u_terms.get(key, 0) + c
    new_ctx = ctx.with_variables(new_vars, uniformizer_terms=u_terms)

    keep_var = new_ctx.var(keep)
    images = {c: RationalExpr(keep_var * new_ctx.var(w))
              for c, w in renames.items()}
    sub = Substituter(ctx, images)

    moved = {}
    for v in ctx.variables:
        img = parent.action.images[v]
        moved[v] = sub.rational(img.num, img.den)

    try:
        qk = local_divide(moved[keep].num, keep, 1)
    except RingError as err:
        raise BlowupError("image of %s is not divisible by %s in chart %s: %s"
                          % (keep, keep, name, err)) from None
    new_images = {}
    for v in ctx.variables:
        if v == keep or v not in renames:
            new_images[v] = moved[v]
    for c, w in renames.items():
        try:
            qc = local_divide(moved[c].num, keep, 1)
        except RingError as err:
            raise BlowupError(
                "the action does not preserve the center: image of %s is not "
                "divisible by %s in chart %s (%s)" % (c, keep, name, err)
            ) from None
        if moved[c].den == moved[keep].den:
            # center coordinates transported from the same parent share one
            # denominator; cancelling it here keeps tower actions from
            # dragging that factor through every later stage squared
            new_images[w] = RationalExpr(qc, qk)
        else:
            new_images[w] = RationalExpr(qc * moved[keep].den,
                                         moved[c].den * qk)

    divisors = {}
    mults = {}
    for sym, eq in parent.divisors.items():
        if eq is None:
            divisors[sym] = None
            continue
        tot = sub.poly(eq)
        if not (tot.den.degree() == 0 and tot.den.constant_term() == 1):
            raise BlowupError("divisor %s picked up a denominator" % sym)
        tot = tot.num
        k = valuation_along(tot, keep)
        if k is None:
            raise BlowupError("divisor %s pulled back to zero in chart %s"
                              % (sym, name))
        strict = local_divide(tot, keep, k) if k else tot
        mults[sym] = k
        if strict.degree() == 0:
            if strict.constant_term() % ctx.p == 0:
                raise BlowupError("strict transform of %s degenerated in "
                                  "chart %s" % (sym, name))
            divisors[sym] = None
        else:
            divisors[sym] = strict
    if exc_symbol in divisors:
        raise BlowupError("exceptional symbol %r already in use" % exc_symbol)
    divisors[exc_symbol] = keep_var

    chart = Chart(name, parent.stage + 1, new_ctx,
                  ActionMap(new_ctx, new_images), divisors, parent=parent,
                  keep=keep, renames=renames, center_fixed=center_fixed)
    return chart, mults


def blow_up(parent, center, exc_symbol, plans):
    """Blow up the coordinate subscheme V(center) inside one parent chart.

    center: tuple of parent coordinate names (all three for a point of a
    threefold chart, two for a coordinate curve).  plans: one dict per
    requested chart, {"name": ..., "keep": generator,
    "rename": {other generator: new coordinate name}}.

    Returns (charts, pullback_mults); the multiplicity table counts how
    many times each previously known exceptional divisor contains the
    center, read off from its total transform.  Consistency across the
    returned charts is enforced here; consistency across sibling parent
    charts covering the same center is the caller's responsibility.
    """
    ctx = parent.ctx
    center = tuple(center)
    if len(set(center)) != len(center):
        raise BlowupError("repeated center generator")
    for c in center:
        ctx.index(c)
    center_fixed = _center_pointwise_fixed(parent.action, center)
    charts = []
    mults = {}
    for plan in plans:
        chart, m = _one_chart(parent, center, exc_symbol, plan, center_fixed)
        charts.append(chart)
        for sym, k in m.items():
            if sym in mults and mults[sym] != k:
                raise BlowupError(
                    "inconsistent pullback multiplicity for %s: %d vs %d"
                    % (sym, mults[sym], k))
            mults[sym] = k
    return charts, mults


def verify_transition(chart_a, chart_b, mapping):
    """Check that two charts of the same stage carry the same action.

    mapping sends each coordinate of chart_a to its expression in
    chart_b's coordinates (a RationalExpr; Laurent monomials in
    practice).  The identity verified on every coordinate v is

        T(tau_a(v)) == tau_b-image of T(v)

    both sides being rational functions on chart_b.
    """
    if chart_a.stage != chart_b.stage:
        raise BlowupError("transition between stages %d and %d"
                          % (chart_a.stage, chart_b.stage))
    sub = Substituter(chart_a.ctx, dict(mapping))
    bad = []
    for v in chart_a.ctx.variables:
        img = chart_a.action.images[v]
        lhs = sub.rational(img.num, img.den)
        rhs = chart_b.action.sigma(mapping[v])
        if lhs != rhs:
            bad.append(v)
    if bad:
        return False, "transition mismatch at %s" % ", ".join(bad)
    return True, "actions agree on the overlap"


def actions_agree(action, declared):
    """Pointwise equality of an action map against declared images."""
    bad = []
    for v in action.ctx.variables:
        want = declared[v]
        if not isinstance(want, RationalExpr):
            want = RationalExpr(want)
        if action.images[v] != want:
            bad.append(v)
    if bad:
        return False, "image mismatch at %s" % ", ".join(bad)
    return True, "all images agree"
