"""Order-p automorphisms of chart rings and the operators built from them.

An ActionMap stores, for each chart coordinate v, the image tau(v) as a
RationalExpr (tau = sigma^{-1}).  Applying sigma to a *function* f is
then plain substitution: sigma(f) = f(tau(v_1), ..., tau(v_n)).

On top of sigma we get the basic operators of the verification:

    I(f)     = sigma(f) - f
    trace(f) = f + sigma(f) + ... + sigma^{p-1}(f)
    N(f)     = f * sigma(f) * ... * sigma^{p-1}(f)

as well as fixed-scheme generators, expansion-claim checking, witness
certification for failure of the Cohen-Macaulay property, and recentering
of a chart at a point with integer coordinates.
"""

from __future__ import annotations

from .ring import (
    Poly, RationalExpr, RingError, Substituter, local_divide, residue_at,
)


class ActionError(Exception):
    pass


class ActionMap:
    """tau-images of every coordinate of one chart ring.

    images: {variable name: RationalExpr}, one entry per context variable.
    """

    __slots__ = ("ctx", "images", "_subst")

    def __init__(self, ctx, images):
        self.ctx = ctx
        self.images = {}
        for name in ctx.variables:
            if name not in images:
                raise ActionError("missing tau-image for %r" % name)
            self.images[name] = RationalExpr.of(images[name], ctx)
        extra = set(images) - set(ctx.variables)
        if extra:
            raise ActionError("tau-images for unknown variables: %s" % sorted(extra))
        self._subst = None

    # -- applying sigma ------------------------------------------------------

    def _substituter(self):
        if self._subst is None:
            self._subst = Substituter(self.ctx, self.images)
        return self._subst

    def sigma_poly(self, f):
        """sigma(f) for a Poly f in this chart ring, as a RationalExpr."""
        return self._substituter().poly(f)

    def sigma(self, f):
        """sigma(f) for a Poly or RationalExpr."""
        if isinstance(f, Poly):
            return self.sigma_poly(f)
        return self._substituter().rational(f.num, f.den)

    def I(self, f):
        """I(f) = sigma(f) - f."""
        return self.sigma(f) - RationalExpr.of(f, self.ctx)

    def iterate(self):
        """Yield the images of sigma^k for k = 0, 1, 2, ...: maps
        {name: RationalExpr} with sigma^0 = identity.

        Each iterate is gcd-reduced: the composites of a finite-order map
        have small reduced form, while the raw substitutes grow without
        bound."""
        cur = {name: RationalExpr(self.ctx.var(name)) for name in self.ctx.variables}
        while True:
            yield cur
            cur = {name: self.sigma(expr).reduced() for name, expr in cur.items()}

    def power_images(self, k):
        """Images of sigma^k of every coordinate."""
        it = self.iterate()
        cur = next(it)
        for _ in range(k):
            cur = next(it)
        return cur

    def trace(self, f):
        f = RationalExpr.of(f, self.ctx)
        total = f
        cur = f
        for _ in range(self.ctx.p - 1):
            cur = self.sigma(cur).reduced()
            total = total + cur
        return total.reduced()

    def norm(self, f):
        f = RationalExpr.of(f, self.ctx)
        total = f
        cur = f
        for _ in range(self.ctx.p - 1):
            cur = self.sigma(cur).reduced()
            total = total * cur
        return total.reduced()

    # -- contracts -----------------------------------------------------------

    def preserves_relation(self):
        """In mixed mode: the relation must map to zero, so that the
        images define a ring endomorphism."""
        ctx = self.ctx
        if ctx.mode != "mixed" or ctx.uniformizer is None:
            return True
        G = ctx.relation()
        return self._substituter().poly(G).is_zero()

    def is_identity(self):
        return all(self.images[name] == self.ctx.var(name)
                   for name in self.ctx.variables)

    def check_order(self, order=None):
        """True iff the action has order exactly `order` (default: the
        residue characteristic p) and, in mixed mode, respects the
        defining relation.  `order` is prime in all uses, so exactness
        reduces to sigma^order = id together with sigma != id."""
        order = self.ctx.p if order is None else order
        if not self.preserves_relation():
            return False
        if self.is_identity():
            return False
        cur = self.power_images(order)
        for name in self.ctx.variables:
            if cur[name] != self.ctx.var(name):
                return False
        return True

    # -- fixed locus ---------------------------------------------------------

    def fixed_scheme_generators(self):
        """Numerators of I(v) for every chart coordinate v.

        Denominators are units near the points of interest, so the
        numerators generate the fixed-scheme ideal locally.
        """
        return [self.I(self.ctx.var(name)).num for name in self.ctx.variables]

    def is_fixed_point(self, point):
        """All I(v) vanish at the F_p-point (denominators must be units)."""
        for name in self.ctx.variables:
            img = self.images[name]
            if residue_at(img.den, point) == 0:
                raise ActionError("tau(%s) has non-unit denominator at the point" % name)
            want = point.get(name, 0) % self.ctx.p
            if (residue_at(img.num, point) *
                    pow(residue_at(img.den, point), self.ctx.p - 2, self.ctx.p)
                    - want) % self.ctx.p != 0:
                return False
        return True

    # -- witnesses -----------------------------------------------------------

    def cm_witness(self, f, point):
        """Certify f as a witness against the Cohen-Macaulay property of
        the quotient at the fixed point: trace(f) = 0 while f is a unit
        at the point.  Returns (ok, detail string)."""
        if not self.is_fixed_point(point):
            return False, "the declared point is not fixed by the action"
        f = RationalExpr.of(f, self.ctx)
        tr = self.trace(f)
        if not tr.is_zero():
            return False, "trace of the witness is nonzero"
        if not f.is_unit_at(point):
            return False, "witness is not a unit at the point"
        return True, "trace zero, witness a unit at the fixed point"


# ---------------------------------------------------------------------------
# expansion claims


class ExpansionClaim:
    """I(target) = monomial * (body + error) / denominator, error in (w).

    monomial: {name: exponent}; body: Poly in chart coordinates;
    denominator: optional Poly (default 1); error_monomial: optional
    {name: exponent} generating the principal error ideal, or None for
    an exact claim.
    """

    __slots__ = ("target", "monomial", "body", "denominator", "error_monomial")

    def __init__(self, target, monomial, body, denominator=None, error_monomial=None):
        self.target = target
        self.monomial = dict(monomial)
        self.body = body
        self.denominator = denominator
        self.error_monomial = dict(error_monomial) if error_monomial else None


def check_expansion_claim(claim, action):
    """Mechanically verify an ExpansionClaim against the derived action.

    Writes I(t) = N/D, clears D and the claim's denominator d, divides
    the numerator by the monomial, and checks the remainder against the
    error ideal:  N*d = M*(body + err)*D  with  err in (w).
    Returns (ok, detail).
    """
    ctx = action.ctx
    if isinstance(claim.target, str):
        It = action.I(ctx.var(claim.target))
    else:
        It = action.I(claim.target)
    N, D = It.num, It.den
    lhs = N if claim.denominator is None else N * claim.denominator
    try:
        q = lhs
        for name, k in claim.monomial.items():
            q = local_divide(q, name, k)
    except RingError as ex:
        return False, "I(target) is not divisible by the declared monomial: %s" % ex
    r = q - claim.body * D
    if r.is_zero():
        return True, "exact"
    if claim.error_monomial is None:
        return False, "remainder nonzero but the claim declared no error term"
    try:
        for name, k in claim.error_monomial.items():
            r = local_divide(r, name, k)
    except RingError:
        return False, "remainder lies outside the declared error ideal"
    return True, "remainder absorbed by the declared error ideal"


# ---------------------------------------------------------------------------
# recentering


def shift_origin(action, point, renames=None):
    """Move the chart origin to an integer point P: new coordinates
    v' = v - P (optionally renamed), action rewritten accordingly.

    Substituting v = v' + P into a normal form never triggers relation
    reduction (exponents only decrease), so representatives transport
    cleanly; the new context reduces against the recentered uniformizer.
    Returns the new ActionMap (its ctx is the new chart ring).
    """
    ctx = action.ctx
    renames = renames or {}
    offsets = {name: point.get(name, 0) for name in ctx.variables}
    new_names = tuple(renames.get(name, name) for name in ctx.variables)
    if len(set(new_names)) != len(new_names):
        raise ActionError("coordinate renames collide")

    uterms = None
    if ctx.mode == "mixed" and ctx.uniformizer is not None:
        shifted_u = Poly(ctx, ctx.uniformizer.terms).shift(offsets)
        uterms = shifted_u.terms
    new_ctx = ctx.with_variables(new_names, uniformizer_terms=uterms)

    def carry(f):
        return new_ctx.from_terms(f.terms)

    images = {}
    for i, name in enumerate(ctx.variables):
        img = action.images[name]
        num = img.num.shift(offsets)
        den = img.den.shift(offsets)
        # tau(v') = tau(v) - P
        num = num - offsets[name] * den
        images[new_names[i]] = RationalExpr(carry(num), carry(den))
    return ActionMap(new_ctx, images)
