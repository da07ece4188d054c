"""Exact arithmetic in the local rings where the verification runs.

Two kinds of coefficient ring show up:

* positive characteristic: F_p[v_1..v_n] localized at a point, and
* mixed characteristic: Z_p[e]/(g(e)) with g Eisenstein, adjoined to
  polynomial variables, where e is carried either as a distinguished
  variable (reduced against the monic relation g) or eliminated in favor
  of a chart uniformizer u(v) with g(u(v)) = 0.

Everything is exact: coefficients are Python ints (reduced mod p only in
positive characteristic), and equality in the mixed ring means equality
of normal forms after division by G = g(u).  Normal forms are canonical,
so Poly equality is dict equality.

The uniformizer u is always a monomial or a shifted monomial (a monomial
in translates v_i + c_i), which keeps the leading term of G monic under
graded lex order and makes the division algorithm exact over Z.
"""

from __future__ import annotations

import heapq

Monomial = tuple  # exponent tuple, one slot per context variable


class RingError(Exception):
    pass


class RingContext:
    """Ambient ring of one chart: variable names plus coefficient data.

    mode "char_p":   F_p[variables], coefficients stored in 0..p-1.
    mode "mixed":    Z[variables] modulo the relation G = g(u) = 0, where
                     g is Eisenstein over Z_p (coeffs given low-to-high,
                     excluding the leading 1) and u is the uniformizer
                     polynomial in the variables.  If the uniformizer is
                     the bare variable "e2" with exponent 1 this is the
                     plain Eisenstein extension.
    """

    __slots__ = ("p", "mode", "variables", "eis", "uniformizer", "_G",
                 "_uvar", "_uvar_known", "_rewrite", "_index", "_sring")

    def __init__(self, p, variables, mode="char_p", eis=None, uniformizer=None):
        self.p = p
        self.mode = mode
        self.variables = tuple(variables)
        self._index = {name: i for i, name in enumerate(self.variables)}
        if mode == "char_p":
            self.eis = None
            self.uniformizer = None
        elif mode == "mixed":
            if eis is None:
                raise RingError("mixed mode needs Eisenstein coefficients")
            self.eis = tuple(eis)  # (a_0, ..., a_{p-1}) of g(e)=e^p+a_{p-1}e^{p-1}+..+a_0
            if len(self.eis) != p:
                raise RingError("Eisenstein relation must have degree p")
            if self.eis[0] % p != 0 or self.eis[0] % (p * p) == 0:
                raise RingError("constant term of the relation must have p-valuation 1")
            if any(a % p for a in self.eis):
                raise RingError("all lower relation coefficients must be divisible by p")
            self.uniformizer = None
            if uniformizer is not None:
                self.uniformizer = self._raw(uniformizer)
        else:
            raise RingError("unknown mode %r" % mode)
        self._G = None
        self._uvar = None
        self._uvar_known = False
        self._rewrite = None
        self._sring = None

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise RingError("unknown variable %r" % name) from None

    # -- construction helpers ------------------------------------------------

    def zero(self):
        return Poly(self, {})

    def one(self):
        return self.const(1)

    def const(self, c):
        if self.mode == "char_p":
            c %= self.p
        if c == 0:
            return Poly(self, {})
        return Poly(self, {(0,) * len(self.variables): c})

    def var(self, name):
        i = self.index(name)
        expo = [0] * len(self.variables)
        expo[i] = 1
        return Poly(self, {tuple(expo): 1})

    def monomial(self, exps, c=1):
        return Poly(self, {tuple(exps): c})

    def from_terms(self, terms):
        """Poly from {exponent tuple: int}, normalizing."""
        return Poly(self, dict(terms))

    # -- the relation G = g(u) ----------------------------------------------

    def _raw(self, terms):
        """A Poly wrapper around raw terms, skipping normal-form reduction.

        Needed for G itself (whose normal form is zero) and for
        intermediate values inside the division routines.
        """
        q = Poly.__new__(Poly)
        q.ctx = self
        q.terms = {m: c for m, c in terms.items() if c != 0}
        return q

    def relation(self):
        """G = u^p + eis[p-1] u^{p-1} + ... + eis[0], as raw terms."""
        if self._G is not None:
            return self._G
        if self.mode != "mixed" or self.uniformizer is None:
            raise RingError("no relation available")
        u = self.uniformizer
        acc = {(0,) * len(self.variables): self.eis[0]}
        upow = u.terms
        for k in range(1, self.p + 1):
            if k > 1:
                upow = _raw_mul_terms(upow, u.terms)
            c = 1 if k == self.p else self.eis[k]
            if c:
                for m, a in upow.items():
                    acc[m] = acc.get(m, 0) + c * a
        self._G = self._raw(acc)
        return self._G

    def is_e_variable_mode(self):
        """True when the uniformizer is a single bare variable of degree 1."""
        if self.mode != "mixed" or self.uniformizer is None:
            return False
        if self._uvar_known:
            return self._uvar is not None
        self._uvar_known = True
        t = self.uniformizer.terms
        if len(t) == 1:
            (m, c), = t.items()
            if c == 1 and sum(m) == 1:
                self._uvar = m.index(1)
        return self._uvar is not None

    def uniformizer_var_index(self):
        if not self.is_e_variable_mode():
            raise RingError("uniformizer is not a bare variable")
        return self._uvar

    def p_rewrite(self):
        """Raw terms R with p = -u * R in the ring.

        From g(u) = 0 with constant term exactly p:
        p = -(u^p + a_{p-1}u^{p-1} + ... + a_1 u) = -u * R,
        R = a_1 + a_2 u + ... + u^{p-1}.
        """
        if self._rewrite is not None:
            return self._rewrite
        if self.eis[0] != self.p:
            raise RingError("p-rewrite assumes the relation has constant term exactly p")
        u = self.uniformizer
        acc = {}
        upow = {(0,) * len(self.variables): 1}
        for k in range(1, self.p + 1):
            if k > 1:
                upow = _raw_mul_terms(upow, u.terms)
            c = 1 if k == self.p else self.eis[k]
            if c:
                for m, a in upow.items():
                    acc[m] = acc.get(m, 0) + c * a
        self._rewrite = self._raw(acc)
        return self._rewrite

    def with_variables(self, variables, uniformizer_terms=None):
        """Same coefficient ring over a different variable list."""
        if self.mode == "char_p":
            return RingContext(self.p, variables, mode="char_p")
        return RingContext(self.p, variables, mode="mixed", eis=self.eis,
                           uniformizer=uniformizer_terms)

    def __repr__(self):
        if self.mode == "char_p":
            return "RingContext(F_%d, %s)" % (self.p, list(self.variables))
        return "RingContext(Z_%d mixed, %s)" % (self.p, list(self.variables))


def _raw_mul_terms(a, b):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            elif m in out:
                del out[m]
    return out


def _grlex_key(m):
    # graded lex: total degree first, then lexicographic on the tuple
    return (sum(m), m)


def _heap_key(m):
    # heapq is a min-heap; invert so the grlex-largest pops first
    return (-sum(m), tuple(-x for x in m))


class Poly:
    """Immutable sparse polynomial over the context's coefficient ring.

    terms: {exponent tuple: nonzero int}.  Always in normal form:
    coefficients reduced mod p in char_p mode; degree in the bare
    uniformizer variable < p in e-variable mode; fully reduced by
    graded-lex division against G in general mixed mode.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms):
        self.ctx = ctx
        self.terms = _normal_form(ctx, terms)

    # -- basics --------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ctx), frozenset(self.terms.items())))

    def __add__(self, other):
        other = _coerce(self.ctx, other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(self.ctx, other))

    def __rsub__(self, other):
        return _coerce(self.ctx, other) - self

    def __mul__(self, other):
        other = _coerce(self.ctx, other)
        return Poly(self.ctx, _raw_mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise RingError("negative power of a Poly")
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.ctx.variables), 0)

    def coeff_of_var(self, name):
        """Coefficient of the degree-1 monomial in the named variable."""
        i = self.ctx.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(self.ctx.variables)))
        return self.terms.get(mono, 0)

    def content(self):
        """gcd of the integer coefficients (0 for the zero polynomial)."""
        g = 0
        for c in self.terms.values():
            g = _gcd(g, abs(c))
            if g == 1:
                return 1
        return g

    def min_exponents(self):
        """Componentwise min of the exponent tuples (common monomial factor)."""
        n = len(self.ctx.variables)
        if not self.terms:
            return (0,) * n
        return tuple(min(m[i] for m in self.terms) for i in range(n))

    # -- evaluation / substitution ------------------------------------------

    def substitute(self, images):
        """Substitute Polys (or ints) for variables.  images: {name: Poly|int}.

        Unlisted variables map to themselves in the target context (taken
        from the first Poly image, else self.ctx).
        """
        tgt = None
        for v in images.values():
            if isinstance(v, Poly):
                tgt = v.ctx
                break
        if tgt is None:
            tgt = self.ctx
        base = {}
        for i, name in enumerate(self.ctx.variables):
            if name in images:
                v = images[name]
                base[i] = v if isinstance(v, Poly) else tgt.const(v)
            else:
                base[i] = tgt.var(name)
        acc = {}
        powcache = {}
        for m, c in self.terms.items():
            term = {(0,) * len(tgt.variables): c}
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    if key not in powcache:
                        powcache[key] = (base[i] ** e).terms
                    term = _raw_mul_terms(term, powcache[key])
            for mm, cc in term.items():
                acc[mm] = acc.get(mm, 0) + cc
        return Poly(tgt, acc)

    def shift(self, offsets):
        """Translate: v -> v + offsets[name] for each named variable."""
        images = {}
        for name, c in offsets.items():
            if c:
                images[name] = self.ctx.var(name) + self.ctx.const(c)
        if not images:
            return self
        return self.substitute(images)

    def split_by(self, name):
        """Write self = f0 + v * f1 with v the named variable; return (f0, f1).

        Both halves are raw (no fresh reduction); f0 has no v.
        """
        i = self.ctx.index(name)
        t0, t1 = {}, {}
        for m, c in self.terms.items():
            if m[i] == 0:
                t0[m] = c
            else:
                m2 = m[:i] + (m[i] - 1,) + m[i + 1:]
                t1[m2] = t1.get(m2, 0) + c
        return self.ctx._raw(t0), self.ctx._raw(t1)

    def derivative(self, name):
        i = self.ctx.index(name)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                m2 = m[:i] + (m[i] - 1,) + m[i + 1:]
                out[m2] = out.get(m2, 0) + c * m[i]
        return Poly(self.ctx, out)

    def __repr__(self):
        return "Poly(%s)" % format_poly(self)


def _coerce(ctx, x):
    if isinstance(x, Poly):
        if x.ctx is not ctx:
            raise RingError("mixing polynomials from different ring contexts")
        return x
    if isinstance(x, int):
        return ctx.const(x)
    raise RingError("cannot coerce %r into the ring" % (x,))


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# normal forms


def _normal_form(ctx, terms):
    terms = {m: c for m, c in terms.items() if c != 0}
    if ctx.mode == "char_p":
        out = {}
        for m, c in terms.items():
            c %= ctx.p
            if c:
                out[m] = c
        return out
    if ctx.uniformizer is None:
        # abstract mixed ring with no relation in scope (scratch contexts)
        return terms
    if ctx.is_e_variable_mode():
        return _reduce_e_variable(ctx, terms)
    return _reduce_by_relation(ctx, terms)


def _reduce_e_variable(ctx, terms):
    """Reduce e-degree below p against the monic univariate relation.

    One downward sweep over e-degrees: rewriting degree d only creates
    degrees d-p..d-1.
    """
    i = ctx._uvar
    p = ctx.p
    eis = ctx.eis
    buckets = {}
    maxd = 0
    for m, c in terms.items():
        d = m[i]
        if d > maxd:
            maxd = d
        base = m[:i] + (0,) + m[i + 1:]
        b = buckets.setdefault(d, {})
        b[base] = b.get(base, 0) + c
    for d in range(maxd, p - 1, -1):
        b = buckets.pop(d, None)
        if not b:
            continue
        for k in range(p):
            if eis[k]:
                tb = buckets.setdefault(d - p + k, {})
                for base, c in b.items():
                    tb[base] = tb.get(base, 0) - c * eis[k]
    out = {}
    for d, b in buckets.items():
        for base, c in b.items():
            if c:
                out[base[:i] + (d,) + base[i + 1:]] = c
    return out


def _reduce_by_relation(ctx, terms):
    """Divide by G = g(u) under graded lex; G's leading term is monic.

    The uniformizer is a product of (possibly translated) variables, so
    LT(G) = LT(u)^p with coefficient 1 and the division is exact over Z.
    Reducing the grlex-largest reducible monomial only creates strictly
    smaller ones, so a single heap-driven descending sweep terminates.
    """
    G = ctx.relation().terms
    lt = max(G, key=_grlex_key)
    if G[lt] != 1:
        raise RingError("relation leading coefficient must be 1")
    work = dict(terms)
    heap = [_heap_key(m) for m in work
            if all(a >= b for a, b in zip(m, lt))]
    heapq.heapify(heap)
    seen = set(heap)
    while heap:
        hk = heapq.heappop(heap)
        m = tuple(-x for x in hk[1])
        c = work.get(m, 0)
        if c == 0:
            continue
        del work[m]
        shift = tuple(a - b for a, b in zip(m, lt))
        for m2, c2 in G.items():
            if m2 == lt:
                continue
            mm = tuple(a + b for a, b in zip(m2, shift))
            v = work.get(mm, 0) - c * c2
            if v:
                work[mm] = v
                if all(a >= b for a, b in zip(mm, lt)):
                    k = _heap_key(mm)
                    if k not in seen:
                        seen.add(k)
                        heapq.heappush(heap, k)
            elif mm in work:
                del work[mm]
    return {m: c for m, c in work.items() if c != 0}


# ---------------------------------------------------------------------------
# division by a coordinate in the local ring


def local_divide(f, name, k=1):
    """Exact division f / v^k in the local ring at the origin of the chart.

    v is a chart coordinate.  In positive characteristic, or when v does
    not appear in the uniformizer, this is plain term-by-term division.
    In mixed characteristic with v dividing the uniformizer, the part of
    f constant in v may instead be divisible by p, which the rewrite
    p = -u * R turns into a multiple of v.  Raises RingError when f is
    not in (v^k).
    """
    ctx = f.ctx
    for _ in range(k):
        f = _divide_once(ctx, f, name)
    return f


def _divide_once(ctx, f, name):
    i = ctx.index(name)
    f0, f1 = f.split_by(name)
    if not f0.terms:
        return Poly(ctx, f1.terms)
    if ctx.mode == "char_p" or ctx.uniformizer is None:
        raise RingError("polynomial is not divisible by %s" % name)
    uterms = ctx.uniformizer.terms
    if all(m[i] > 0 for m in uterms):
        # v divides u, so p = -u*R is a multiple of v:
        # f = p*h + v*f1 = v*(f1 - (u/v)*R*h)
        p = ctx.p
        h = {}
        for m, c in f0.terms.items():
            if c % p:
                raise RingError("polynomial is not divisible by %s" % name)
            h[m] = c // p
        uv = {m[:i] + (m[i] - 1,) + m[i + 1:]: c for m, c in uterms.items()}
        corr = _raw_mul_terms(_raw_mul_terms(uv, ctx.p_rewrite().terms), h)
        out = dict(f1.terms)
        for m, c in corr.items():
            out[m] = out.get(m, 0) - c
        return Poly(ctx, out)
    # v does not divide u.  If no term of G involves v (pure-monomial
    # uniformizer not containing v), then the v-free part of a normal
    # form is itself a normal form, so f0 must vanish identically.
    G = ctx.relation().terms
    G0 = {m: c for m, c in G.items() if m[i] == 0}
    G1 = {m[:i] + (m[i] - 1,) + m[i + 1:]: c for m, c in G.items() if m[i] > 0}
    if not G1:
        raise RingError("polynomial is not divisible by %s" % name)
    # Mixed case (shifted uniformizer involving v+c): divide f0 by G0 in
    # the v=0 slice, exact only when G0 stays monic in grlex.
    lt0 = max(G0, key=_grlex_key)
    if G0[lt0] != 1:
        raise RingError("cannot certify division by %s: restricted relation is not monic" % name)
    work = dict(f0.terms)
    quot = {}
    while True:
        cand = None
        best = None
        for m in work:
            if all(a >= b for a, b in zip(m, lt0)):
                k = _grlex_key(m)
                if best is None or k > best:
                    best = k
                    cand = m
        if cand is None:
            break
        c = work.pop(cand)
        shift = tuple(a - b for a, b in zip(cand, lt0))
        quot[shift] = quot.get(shift, 0) + c
        for m2, c2 in G0.items():
            if m2 == lt0:
                continue
            mm = tuple(a + b for a, b in zip(m2, shift))
            v = work.get(mm, 0) - c * c2
            if v:
                work[mm] = v
            elif mm in work:
                del work[mm]
    if work:
        raise RingError("polynomial is not divisible by %s" % name)
    # f = quot*G0 + v*f1 = quot*(G - v*G1) + v*f1 == v*(f1 - quot*G1)  (mod G)
    corr = _raw_mul_terms(quot, G1)
    out = dict(f1.terms)
    for m, c in corr.items():
        out[m] = out.get(m, 0) - c
    return Poly(ctx, out)


def divides(f, name, k=1):
    try:
        local_divide(f, name, k)
        return True
    except RingError:
        return False


def valuation_along(f, name, bound=None):
    """Order of vanishing of f along {v=0}: the largest k with f in (v^k).

    Returns None for the zero polynomial (infinite valuation).  The
    default bound covers every input the verifier produces; exceeding it
    raises rather than returning a wrong answer.
    """
    if f.is_zero():
        return None
    if bound is None:
        extra = 0
        if f.ctx.mode == "mixed":
            c = f.content()
            while c and c % f.ctx.p == 0:
                extra += 1
                c //= f.ctx.p
        bound = f.ctx.p * (f.degree() + extra + 2)
    k = 0
    cur = f
    while True:
        try:
            cur = _divide_once(f.ctx, cur, name)
        except RingError:
            return k
        if cur.is_zero():
            return None
        k += 1
        if k > bound:
            raise RingError("valuation bound exceeded along %s" % name)


# ---------------------------------------------------------------------------
# the residue field at a point, linear parts


def reduce_mod_p(f, target_ctx=None):
    """Image of f in F_p[variables].

    In e-variable mode the uniformizer variable is sent to 0 (it spans
    the kernel of reduction).  For a general uniformizer the coefficients
    are reduced mod p; callers restrict such polynomials to loci where
    the uniformizer vanishes before interpreting the result.
    """
    ctx = f.ctx
    if ctx.mode == "char_p":
        return f if target_ctx is None else target_ctx.from_terms(f.terms)
    tgt = target_ctx or RingContext(ctx.p, ctx.variables, mode="char_p")
    terms = f.terms
    if ctx.is_e_variable_mode():
        i = ctx._uvar
        terms = {m: c for m, c in terms.items() if m[i] == 0}
    return tgt.from_terms(terms)


def _eval_terms_mod_p(ctx, terms, point):
    val = 0
    names = ctx.variables
    for m, c in terms.items():
        t = c
        for i, e in enumerate(m):
            if e:
                t *= point.get(names[i], 0) ** e
        val += t
    return val % ctx.p


def residue_at(f, point):
    """Value of f in the residue field F_p at the F_p-point given by
    {variable name: int} (missing names default to 0).

    In mixed characteristic the point must kill the uniformizer, else
    evaluation is not well defined on residue classes.
    """
    ctx = f.ctx
    if ctx.mode == "mixed" and ctx.uniformizer is not None:
        if _eval_terms_mod_p(ctx, ctx.uniformizer.terms, point) != 0:
            raise RingError("residue undefined: uniformizer is a unit at the point")
    return _eval_terms_mod_p(ctx, f.terms, point)


def is_unit_at(f, point):
    return residue_at(f, point) != 0


def linear_part(f, names=None):
    """Constant and degree-1 data of f mod p at the origin of the chart.

    Returns {name: coefficient in F_p} over the requested names (default
    all variables).  Raises if f does not lie in the maximal ideal.
    Well defined on residue classes: the relation G has constant term p
    and all its sub-leading coefficients are divisible by p.
    """
    ctx = f.ctx
    if f.constant_term() % ctx.p != 0:
        raise RingError("polynomial is not in the maximal ideal at the origin")
    names = ctx.variables if names is None else names
    return {name: f.coeff_of_var(name) % ctx.p for name in names}


def inverse_mod(a, p):
    a %= p
    if a == 0:
        raise RingError("not invertible mod %d" % p)
    return pow(a, p - 2, p)


# ---------------------------------------------------------------------------
# fractions of polynomials


class RationalExpr:
    """Quotient num/den of Polys, den nonzero (a unit wherever evaluated).

    Kept unreduced apart from cheap canonical cleanups: integer content,
    common monomial factors, and a sign convention.  Equality is
    cross-multiplication, exact in the ring.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        ctx = num.ctx
        if den is None:
            den = ctx.one()
        if den.is_zero():
            raise RingError("zero denominator")
        cn, cd = num.content(), den.content()
        g = _gcd(cn, cd)
        if g > 1:
            num = ctx.from_terms({m: c // g for m, c in num.terms.items()})
            den = ctx.from_terms({m: c // g for m, c in den.terms.items()})
        if not num.is_zero():
            mn, md = num.min_exponents(), den.min_exponents()
            common = tuple(min(a, b) for a, b in zip(mn, md))
            if any(common):
                num = ctx.from_terms({tuple(a - b for a, b in zip(m, common)): c
                                      for m, c in num.terms.items()})
                den = ctx.from_terms({tuple(a - b for a, b in zip(m, common)): c
                                      for m, c in den.terms.items()})
        if den.terms:
            lead = min(den.terms, key=_grlex_key)
            c = den.terms[lead]
            if c < 0 or (ctx.mode == "char_p" and ctx.p > 2 and c > (ctx.p - 1) // 2):
                num, den = -num, -den
        self.num = num
        self.den = den

    @property
    def ctx(self):
        return self.num.ctx

    @classmethod
    def of(cls, x, ctx=None):
        if isinstance(x, RationalExpr):
            return x
        if isinstance(x, Poly):
            return cls(x)
        if isinstance(x, int):
            if ctx is None:
                raise RingError("need a context to lift an int")
            return cls(ctx.const(x))
        raise RingError("cannot build a RationalExpr from %r" % (x,))

    def __add__(self, other):
        other = RationalExpr.of(other, self.ctx)
        if self.den == other.den:
            return RationalExpr(self.num + other.num, self.den)
        return RationalExpr(self.num * other.den + other.num * self.den,
                            self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalExpr(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalExpr.of(other, self.ctx))

    def __rsub__(self, other):
        return RationalExpr.of(other, self.ctx) - self

    def __mul__(self, other):
        other = RationalExpr.of(other, self.ctx)
        return RationalExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RationalExpr.of(other, self.ctx)
        if other.num.is_zero():
            raise RingError("division by zero expression")
        return RationalExpr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RationalExpr.of(other, self.ctx) / self

    def __pow__(self, n):
        if n < 0:
            if self.num.is_zero():
                raise RingError("division by zero expression")
            return RationalExpr(self.den ** (-n), self.num ** (-n))
        return RationalExpr(self.num ** n, self.den ** n)

    def __eq__(self, other):
        if isinstance(other, (Poly, int)):
            other = RationalExpr.of(other, self.ctx)
        if not isinstance(other, RationalExpr):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None

    def is_zero(self):
        return self.num.is_zero()

    def substitute(self, images):
        return substitute_rational_pair(self.num, self.den, images)

    def shift(self, offsets):
        return RationalExpr(self.num.shift(offsets), self.den.shift(offsets))

    def residue_at(self, point):
        d = residue_at(self.den, point)
        if d == 0:
            raise RingError("denominator vanishes at the point")
        return (residue_at(self.num, point) * inverse_mod(d, self.ctx.p)) % self.ctx.p

    def is_unit_at(self, point):
        return residue_at(self.den, point) != 0 and residue_at(self.num, point) != 0

    def reduced(self):
        """Cancel the full polynomial gcd of num and den.

        The cheap cleanups in __init__ only strip contents and monomial
        factors, which is fine for one-shot arithmetic but lets iterated
        substitution (sigma composed with itself, transported actions) pile
        up enormous common factors.  Reduction keeps those orbits small.
        """
        num, den = reduce_fraction(self.num, self.den)
        return RationalExpr(num, den)

    def __repr__(self):
        if self.den.terms == {(0,) * len(self.ctx.variables): 1}:
            return "RationalExpr(%s)" % format_poly(self.num)
        return "RationalExpr((%s)/(%s))" % (format_poly(self.num), format_poly(self.den))


def _sympy_ring(ctx):
    """Sparse sympy polynomial ring mirroring this context, built lazily.

    char_p contexts map onto GF(p); everything else onto ZZ, where mixed
    polynomials are handled through their integer representatives.
    """
    if ctx._sring is None:
        from sympy.polys.domains import GF, ZZ
        from sympy.polys.rings import ring as _ring
        dom = GF(ctx.p) if ctx.mode == "char_p" else ZZ
        ctx._sring = _ring(",".join(ctx.variables), dom)[0]
    return ctx._sring


def reduce_fraction(num, den):
    """(num', den') with the common polynomial factor of num and den removed.

    Exact: the gcd and both quotients come from arithmetic over GF(p) or
    ZZ, and cancelling a factor common to the stored representatives is
    sound in the mixed ring as well (the normal forms have uniformizer
    degree below p, so the representative identity num = q * g holds
    verbatim after reduction).
    """
    ctx = num.ctx
    if num.is_zero():
        return num, ctx.one()
    if len(num.terms) == 1 or len(den.terms) == 1:
        # monomial factors are already stripped by RationalExpr.__init__
        return num, den
    R = _sympy_ring(ctx)
    f = R.from_dict(num.terms)
    g = R.from_dict(den.terms)
    h, fq, gq = f.cofactors(g)
    if h == R.one:
        return num, den
    return (ctx.from_terms({m: int(c) for m, c in fq.items()}),
            ctx.from_terms({m: int(c) for m, c in gq.items()}))


class Substituter:
    """Shared power caches for substituting one family of images into
    many polynomials (all coordinates of a map, say)."""

    __slots__ = ("src_ctx", "tgt", "nums", "dens", "_npow", "_dpow")

    def __init__(self, src_ctx, images):
        rat = {}
        tgt = None
        for name, v in images.items():
            if isinstance(v, RationalExpr):
                rat[name] = v
                tgt = v.ctx
            elif isinstance(v, Poly):
                rat[name] = RationalExpr(v)
                tgt = v.ctx
            else:
                rat[name] = v  # int, lifted once the target is known
        if tgt is None:
            tgt = src_ctx
        self.src_ctx = src_ctx
        self.tgt = tgt
        self.nums = {}
        self.dens = {}
        for i, name in enumerate(src_ctx.variables):
            if name in rat:
                v = rat[name]
                if isinstance(v, int):
                    self.nums[i] = tgt.const(v)
                    self.dens[i] = None
                else:
                    self.nums[i] = v.num
                    self.dens[i] = None if _is_one(v.den) else v.den
            else:
                self.nums[i] = tgt.var(name)
                self.dens[i] = None
        self._npow = {}
        self._dpow = {}

    def _pow(self, cache, i, e, base):
        key = (i, e)
        if key not in cache:
            cache[key] = (base ** e).terms
        return cache[key]

    def _accumulate(self, f, maxdeg, acc):
        for m, c in f.terms.items():
            term = {(0,) * len(self.tgt.variables): c}
            for i, e in enumerate(m):
                if e:
                    term = _raw_mul_terms(term, self._pow(self._npow, i, e, self.nums[i]))
                d = maxdeg[i] - e
                if d and self.dens[i] is not None:
                    term = _raw_mul_terms(term, self._pow(self._dpow, i, d, self.dens[i]))
            for mm, cc in term.items():
                acc[mm] = acc.get(mm, 0) + cc

    def _maxdeg(self, polys):
        n = len(self.src_ctx.variables)
        maxdeg = [0] * n
        for f in polys:
            for m in f.terms:
                for i, e in enumerate(m):
                    if e > maxdeg[i]:
                        maxdeg[i] = e
        return maxdeg

    def _denominator(self, maxdeg):
        terms = {(0,) * len(self.tgt.variables): 1}
        for i, d in enumerate(maxdeg):
            if d and self.dens[i] is not None:
                terms = _raw_mul_terms(terms, self._pow(self._dpow, i, d, self.dens[i]))
        return Poly(self.tgt, terms)

    def poly(self, f):
        """f(images) as a RationalExpr with one common denominator."""
        maxdeg = self._maxdeg([f])
        acc = {}
        self._accumulate(f, maxdeg, acc)
        return RationalExpr(Poly(self.tgt, acc), self._denominator(maxdeg))

    def rational(self, num, den):
        """(num/den)(images); the shared denominator cancels exactly."""
        maxdeg = self._maxdeg([num, den])
        accn, accd = {}, {}
        self._accumulate(num, maxdeg, accn)
        self._accumulate(den, maxdeg, accd)
        return RationalExpr(Poly(self.tgt, accn), Poly(self.tgt, accd))


def _is_one(f):
    return f.terms == {(0,) * len(f.ctx.variables): 1}


def substitute_rational_poly(f, images):
    """Substitute RationalExprs (or Polys/ints) into a Poly."""
    return Substituter(f.ctx, images).poly(f)


def substitute_rational_pair(num, den, images):
    """Substitute into num/den jointly, cancelling the common denominator."""
    return Substituter(num.ctx, images).rational(num, den)


# ---------------------------------------------------------------------------
# printing


def format_poly(f):
    if not f.terms:
        return "0"
    names = f.ctx.variables
    parts = []
    for m in sorted(f.terms, key=_grlex_key):
        c = f.terms[m]
        factors = []
        for i, e in enumerate(m):
            if e == 1:
                factors.append(names[i])
            elif e > 1:
                factors.append("%s^%d" % (names[i], e))
        if not factors:
            body = str(abs(c))
        else:
            body = "*".join(factors)
            if abs(c) != 1:
                body = "%d*%s" % (abs(c), body)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    sign0, body0 = parts[0]
    out = ("-" if sign0 == "-" else "") + body0
    for sign, body in parts[1:]:
        out += " %s %s" % (sign, body)
    return out
