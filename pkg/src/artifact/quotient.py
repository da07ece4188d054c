"""Cyclic quotient singularities: recognition, classification, ramification.

Three layers:

* recognition: at a declared fixed point P with declared elements e, s,
  verify the switch hypotheses (I(s) = e*s*unit, I(v) in (e) for all
  coordinates, p in e^{p-1}*m) and either conclude regularity or read off
  the linear action phi(v) = I(v)/(e*unit) mod m^2, whose eigenvalues
  give the toric type 1/p(b_1,...,b_n);

* classification: the age inequalities deciding terminal/canonical for
  a type 1/r(b_1,...,b_n), plain and with boundary coefficients;

* ramification: for a G-stable divisor, the ramification number i(E),
  the wild/fierce dichotomy, and the different coefficient (p-1)i(E).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .ring import (
    RingError, inverse_mod, linear_part, local_divide, residue_at,
    valuation_along,
)


class QuotientError(Exception):
    pass


# ---------------------------------------------------------------------------
# types 1/r(b_1..b_n)


@dataclass(frozen=True)
class SingularityType:
    r: int
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(w % self.r for w in self.weights))

    def well_formed(self):
        """gcd(r, all weights but the j-th) must be 1 for every j."""
        for j in range(len(self.weights)):
            g = self.r
            for k, b in enumerate(self.weights):
                if k != j:
                    g = gcd(g, b)
            if g != 1:
                return False, j
        return True, None

    def require_well_formed(self):
        ok, j = self.well_formed()
        if not ok:
            others = [b for k, b in enumerate(self.weights) if k != j]
            raise QuotientError(
                "type 1/%d%s is not well-formed: gcd(%d, %s) > 1 after dropping "
                "weight %d" % (self.r, self.weights, self.r, others, j))

    def canonical_form(self):
        """Smallest sorted weight tuple over unit rescalings: the
        invariant used to compare types up to change of group generator
        and coordinate permutation."""
        best = None
        for c in range(1, self.r):
            if gcd(c, self.r) != 1:
                continue
            cand = tuple(sorted((c * b) % self.r for b in self.weights))
            if best is None or cand < best:
                best = cand
        return (self.r, best)

    def equivalent_to(self, other):
        return self.canonical_form() == other.canonical_form()

    def __str__(self):
        return "1/%d(%s)" % (self.r, ",".join(str(b) for b in self.weights))


def reid_tai(t):
    """Terminal / Canonical / NotCanonical for the cyclic type t.

    Terminal iff sum_j (i*b_j mod r) > r for every i = 1..r-1; Canonical
    iff every sum is >= r; otherwise NotCanonical.  Returns
    (classification, list of the r-1 sums).
    """
    t.require_well_formed()
    r = t.r
    sums = []
    for i in range(1, r):
        sums.append(sum((i * b) % r for b in t.weights))
    if all(s > r for s in sums):
        return "Terminal", sums
    if all(s >= r for s in sums):
        return "Canonical", sums
    return "NotCanonical", sums


def reid_tai_pair(t, coeffs):
    """Boundary version: with per-weight coefficients c_j, require
    c_j < 1, c_j + c_k < 1 (j != k), and
    sum_j (1 - c_j) * (i*b_j mod r) > r for every i = 1..r-1.

    Returns (ok, detail) where detail carries the per-i weighted sums as
    exact Fractions.
    """
    t.require_well_formed()
    r = t.r
    cs = [Fraction(c) for c in coeffs]
    if len(cs) != len(t.weights):
        raise QuotientError("need one coefficient per weight")
    for j, c in enumerate(cs):
        if not c < 1:
            return False, "coefficient %s at position %d is not < 1" % (c, j)
    for j in range(len(cs)):
        for k in range(j + 1, len(cs)):
            if not cs[j] + cs[k] < 1:
                return False, "coefficients at positions %d,%d sum to %s >= 1" % (
                    j, k, cs[j] + cs[k])
    sums = []
    for i in range(1, r):
        s = sum((1 - c) * ((i * b) % r) for c, b in zip(cs, t.weights))
        sums.append(s)
        if not s > r:
            return False, "weighted sum %s at i=%d is not > %d" % (s, i, r)
    return True, sums


# ---------------------------------------------------------------------------
# linear algebra mod p (tiny dense matrices)


def _rank_mod_p(rows, p):
    rows = [list(r) for r in rows]
    n = len(rows)
    m = len(rows[0]) if rows else 0
    rank = 0
    col = 0
    for col in range(m):
        piv = None
        for i in range(rank, n):
            if rows[i][col] % p:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = inverse_mod(rows[rank][col], p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(n):
            if i != rank and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def eigen_analysis(matrix, p):
    """(diagonalizable over F_p?, eigenvalue multiset, per-eigenvalue
    geometric multiplicity).  matrix: list of rows over F_p, where row i
    expresses phi(v_i) in the coordinate basis."""
    n = len(matrix)
    mults = {}
    total = 0
    for lam in range(p):
        shifted = [[(matrix[i][j] - (lam if i == j else 0)) % p
                    for j in range(n)] for i in range(n)]
        g = n - _rank_mod_p(shifted, p)
        if g:
            mults[lam] = g
            total += g
    eigen = []
    for lam in sorted(mults):
        eigen.extend([lam] * mults[lam])
    return total == n, eigen, mults


# ---------------------------------------------------------------------------
# the switch criterion


@dataclass
class MupReport:
    status: str                  # "Regular" | "Toric" | "Inapplicable"
    detail: str = ""
    toric_type: SingularityType | None = None
    matrix: list = field(default_factory=list)
    coordinate_weights: dict = field(default_factory=dict)
    classification: str | None = None
    rt_sums: list = field(default_factory=list)


def _divide_by_monomial(f, monomial):
    for name, k in monomial.items():
        if k:
            f = local_divide(f, name, k)
    return f


def check_mup(action, e_monomial, s_name):
    """Run the switch criterion at the origin of the chart (shift first
    for other points).

    e_monomial: {coordinate: exponent} for the element e; s_name: the
    coordinate s.  Returns a MupReport; hypothesis failures give status
    Inapplicable with the failed check named.
    """
    ctx = action.ctx
    p = ctx.p
    origin = {}
    if not action.is_fixed_point(origin):
        return MupReport("Inapplicable", "the analyzed point is not fixed")

    # (a) I(s) = e*s*unit
    Is = action.I(ctx.var(s_name))
    if residue_at(Is.den, origin) == 0:
        return MupReport("Inapplicable", "I(%s) has a non-unit denominator" % s_name)
    es = dict(e_monomial)
    es[s_name] = es.get(s_name, 0) + 1
    try:
        u_num = _divide_by_monomial(Is.num, es)
    except RingError:
        return MupReport("Inapplicable",
                         "I(%s) is not divisible by e*%s" % (s_name, s_name))
    if residue_at(u_num, origin) == 0:
        return MupReport("Inapplicable",
                         "I(%s)/(e*%s) is not a unit at the point" % (s_name, s_name))
    u_den_res = residue_at(Is.den, origin)
    u_res = (residue_at(u_num, origin) * inverse_mod(u_den_res, p)) % p

    # (b) I(v) in (e) for every coordinate
    quotients = {}
    for name in ctx.variables:
        Iv = action.I(ctx.var(name))
        if residue_at(Iv.den, origin) == 0:
            return MupReport("Inapplicable",
                             "I(%s) has a non-unit denominator" % name)
        try:
            q = _divide_by_monomial(Iv.num, e_monomial)
        except RingError:
            return MupReport("Inapplicable", "I(%s) is not in (e)" % name)
        quotients[name] = (q, Iv.den)

    # (c) p in e^{p-1} * m (vacuous in positive characteristic)
    if ctx.mode == "mixed":
        pm = {name: k * (p - 1) for name, k in e_monomial.items()}
        try:
            pq = _divide_by_monomial(ctx.const(p), pm)
        except RingError:
            return MupReport("Inapplicable", "p is not in (e^(p-1))")
        if residue_at(pq, origin) != 0:
            return MupReport("Inapplicable", "p/e^(p-1) is a unit, not in m")

    # (d) regular branch
    for name, (q, d) in quotients.items():
        if residue_at(q, origin) != 0:
            return MupReport("Regular",
                             "I(%s)/e is a unit at the point" % name)

    # (e) linear action phi(v) = I(v)/(e*u) mod m^2, over F_p
    names = ctx.variables
    inv_u = inverse_mod(u_res, p)
    matrix = []
    for name in names:
        q, d = quotients[name]
        lp = linear_part(q, names)
        d_inv = inverse_mod(residue_at(d, origin), p)
        row = [(lp[n2] * d_inv * inv_u) % p for n2 in names]
        matrix.append(row)
    ok, eigen, mults = eigen_analysis(matrix, p)
    if not ok:
        return MupReport(
            "Inapplicable",
            "eigenvalues not realized over F_p with full multiplicity -- "
            "criterion contract violated, check inputs",
            matrix=matrix)
    coord_weights = {}
    for i, name in enumerate(names):
        if all(matrix[i][j] == 0 for j in range(len(names)) if j != i):
            coord_weights[name] = matrix[i][i]
    t = SingularityType(p, tuple(eigen))
    rep = MupReport("Toric", "phi diagonalizable with eigenvalues %s" % (eigen,),
                    toric_type=t, matrix=matrix, coordinate_weights=coord_weights)
    cls, sums = reid_tai(t)
    rep.classification = cls
    rep.rt_sums = sums
    return rep


def divisor_weight(report, name):
    """The phi-eigenvalue on a coordinate divisor {name=0} through the
    analyzed point; requires the coordinate class to be an eigenvector."""
    if report.status != "Toric":
        raise QuotientError("weights only exist for toric reports")
    if name not in report.coordinate_weights:
        raise QuotientError("coordinate %r is not a phi-eigenvector" % name)
    return report.coordinate_weights[name]


# ---------------------------------------------------------------------------
# ramification along a divisor


@dataclass
class RamificationReport:
    divisor: str
    kind: str          # "unramified" | "wild" | "fierce"
    i: int             # ramification number i(E)
    different: int     # (p-1) * i
    pullback_index: int  # e in f*F = e*E: p for wild, else 1


def ramification(action, divisor_coordinate):
    """Classify the covering Y -> Y/G along the divisor {t=0} for a
    chart coordinate t.

    Moved divisor (t does not divide I(t)): unramified.  Else
    i(E) = min over fixed-scheme generators of the valuation along t,
    wild iff the valuation of I(t) equals i(E), fierce otherwise.
    """
    ctx = action.ctx
    p = ctx.p
    t = divisor_coordinate

    def val(r):
        vn = valuation_along(r.num, t)
        if vn is None:
            return None
        vd = valuation_along(r.den, t)
        if vd:
            raise QuotientError(
                "denominator of an action image vanishes along %s" % t)
        return vn

    It = action.I(ctx.var(t))
    vt = val(It)
    if vt == 0:
        return RamificationReport(t, "unramified", 0, 0, 1)
    vals = []
    for name in ctx.variables:
        v = val(action.I(ctx.var(name)))
        if v is not None:
            vals.append(v)
    if not vals:
        raise QuotientError("the action is trivial; no ramification data")
    i_e = min(vals)
    if i_e == 0:
        # the divisor is preserved but not contained in the fixed scheme,
        # so the action on it is generically free and the covering adds
        # nothing to the different there
        return RamificationReport(t, "unramified", 0, 0, 1)
    if vt is None:
        kind = "fierce"
    else:
        kind = "wild" if vt == i_e else "fierce"
    return RamificationReport(t, kind, i_e, (p - 1) * i_e,
                              p if kind == "wild" else 1)
