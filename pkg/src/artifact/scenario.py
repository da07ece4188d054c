"""Scenario files and the end-to-end verification pipeline.

A scenario is a JSON document describing one construction completely:
the base ring and its order-p action, a tower of blow-ups with the
chart data expected at every stage, fixed-locus claims, the quotient
singularity analyses at marked points, ramification and discrepancy
bookkeeping, and the expected verdict.

run_scenario recomputes everything the file claims and returns a
report: an ordered list of steps, each carrying a pass/fail status,
the citation supplied with the expectation it checks, and a detail
string.  A failing step never aborts the run; later steps that do not
depend on it are still attempted, so one report shows everything that
disagrees, not just the first problem.

Every declared expectation must carry a citation string; a file with
an uncited expectation is rejected before anything runs.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .action import (
    ActionError, ActionMap, ExpansionClaim, check_expansion_claim, shift_origin,
)
from .badlocus import LocusError, check_locus
from .blowup import BlowupError, base_chart, blow_up, verify_transition
from .expr import ExprError, parse_expression
from .ledger import Ledger, LedgerError, assemble_verdict
from .quotient import (
    QuotientError, SingularityType, check_mup, ramification, reid_tai_pair,
)
from .ring import (
    RationalExpr, RingContext, RingError, format_poly, is_unit_at, local_divide,
    reduce_mod_p,
)

VERDICTS = ("terminal", "canonical-not-terminal", "not-canonical", "undetermined")

_CHECK_ERRORS = (RingError, ActionError, BlowupError, LocusError,
                 QuotientError, LedgerError)


class ScenarioError(ValueError):
    """Malformed scenario input (as opposed to a failed verification)."""


# ---------------------------------------------------------------------------
# schema validation


def _check_keys(obj, where, required, optional=()):
    if not isinstance(obj, dict):
        raise ScenarioError("%s: expected an object" % where)
    for k in required:
        if k not in obj:
            raise ScenarioError("%s: missing %r" % (where, k))
    extra = sorted(set(obj) - set(required) - set(optional))
    if extra:
        raise ScenarioError("%s: unknown keys %s" % (where, extra))


def _cited(obj, where):
    c = obj.get("citation")
    if not isinstance(c, str) or not c.strip():
        raise ScenarioError("%s: expectation lacks a citation" % where)
    return c


def _name_list(obj, where):
    if (not isinstance(obj, list) or not obj
            or len(set(obj)) != len(obj)
            or not all(isinstance(x, str) for x in obj)):
        raise ScenarioError("%s: expected a list of distinct names" % where)
    return obj


def _int_map(obj, where, minimum=0):
    if not isinstance(obj, dict):
        raise ScenarioError("%s: expected an object" % where)
    for k, v in obj.items():
        if not isinstance(v, int) or v < minimum:
            raise ScenarioError("%s: %r must be an integer >= %d" % (where, k, minimum))
    return obj


def _point(obj, where):
    if not isinstance(obj, dict) or not all(isinstance(v, int) for v in obj.values()):
        raise ScenarioError("%s: a point is {coordinate: integer}" % where)
    return obj


def _validate_stage(st, where, mixed, chart_names):
    _check_keys(st, where, ("exceptional", "center_kind", "blowups",
                            "pullbacks", "citation"),
                ("center_fixed", "transitions", "expansions", "loci"))
    _cited(st, where)
    if st["center_kind"] not in ("point", "curve"):
        raise ScenarioError("%s: center_kind must be 'point' or 'curve'" % where)
    if not isinstance(st["blowups"], list) or not st["blowups"]:
        raise ScenarioError("%s: blowups must be a nonempty list" % where)
    for i, b in enumerate(st["blowups"]):
        w = "%s.blowups[%d]" % (where, i)
        _check_keys(b, w, ("parent", "center", "charts"))
        _name_list(b["center"], w + ".center")
        if not isinstance(b["charts"], list) or not b["charts"]:
            raise ScenarioError("%s: charts must be a nonempty list" % w)
        for j, c in enumerate(b["charts"]):
            wc = "%s.charts[%d]" % (w, j)
            required = ("name", "keep", "citation") + (("uniformizer",) if mixed else ())
            _check_keys(c, wc, required, ("rename", "action", "divisors"))
            _cited(c, wc)
            if mixed:
                _int_map(c["uniformizer"], wc + ".uniformizer", minimum=1)
            if c["name"] in chart_names:
                raise ScenarioError("%s: duplicate chart name %r" % (wc, c["name"]))
            chart_names.add(c["name"])
            if "action" in c and not isinstance(c["action"], dict):
                raise ScenarioError("%s: action must map coordinates to expressions" % wc)
            if "divisors" in c and not isinstance(c["divisors"], dict):
                raise ScenarioError("%s: divisors must map symbols to a coordinate or null" % wc)
    pb = st["pullbacks"]
    _check_keys(pb, where + ".pullbacks", ("mults", "citation"))
    _cited(pb, where + ".pullbacks")
    _int_map(pb["mults"], where + ".pullbacks.mults")
    for i, t in enumerate(st.get("transitions", [])):
        w = "%s.transitions[%d]" % (where, i)
        _check_keys(t, w, ("from", "to", "mapping", "citation"))
        _cited(t, w)
        if not isinstance(t["mapping"], dict) or not t["mapping"]:
            raise ScenarioError("%s: mapping must be a nonempty object" % w)
    for i, e in enumerate(st.get("expansions", [])):
        w = "%s.expansions[%d]" % (where, i)
        _check_keys(e, w, ("chart", "target", "monomial", "body", "citation"),
                    ("denominator", "error"))
        _cited(e, w)
        _int_map(e["monomial"], w + ".monomial", minimum=1)
        if "error" in e:
            _int_map(e["error"], w + ".error", minimum=1)
    for i, L in enumerate(st.get("loci", [])):
        w = "%s.loci[%d]" % (where, i)
        _check_keys(L, w, ("chart", "divisor_part", "citation"),
                    ("points", "curves", "on"))
        _cited(L, w)
        _int_map(L["divisor_part"], w + ".divisor_part", minimum=1)
        for k, pt in enumerate(L.get("points", [])):
            _point(pt, "%s.points[%d]" % (w, k))
        for k, cv in enumerate(L.get("curves", [])):
            _check_keys(cv, "%s.curves[%d]" % (w, k), ("var", "value"))


def validate_scenario(data):
    """Structural validation; raises ScenarioError on any defect."""
    _check_keys(data, "scenario",
                ("schema", "name", "title", "ring", "base", "stages",
                 "quotient_points", "ramification", "ledger", "expect"),
                ("description", "cm_witness", "canonical_factor", "ring_claims",
                 "identifications", "action_mod_p", "change_of_variables"))
    if data["schema"] != 1:
        raise ScenarioError("unsupported schema version %r" % (data["schema"],))
    ring = data["ring"]
    _check_keys(ring, "ring", ("p", "mode"), ("eisenstein",))
    if not isinstance(ring["p"], int) or ring["p"] < 2:
        raise ScenarioError("ring.p must be an integer >= 2")
    mixed = ring["mode"] == "mixed"
    if ring["mode"] not in ("char_p", "mixed"):
        raise ScenarioError("ring.mode must be 'char_p' or 'mixed'")
    if mixed and "eisenstein" not in ring:
        raise ScenarioError("ring: mixed mode needs the eisenstein coefficients")
    if not mixed and "eisenstein" in ring:
        raise ScenarioError("ring: eisenstein coefficients only apply to mixed mode")

    base = data["base"]
    req = ("chart", "coordinates", "action", "citation") + (("uniformizer",) if mixed else ())
    _check_keys(base, "base", req)
    _cited(base, "base")
    coords = _name_list(base["coordinates"], "base.coordinates")
    if sorted(base["action"]) != sorted(coords):
        raise ScenarioError("base.action must give one image per coordinate")
    if mixed:
        _int_map(base["uniformizer"], "base.uniformizer", minimum=1)

    chart_names = {base["chart"]}
    symbols = set()
    if not isinstance(data["stages"], list):
        raise ScenarioError("stages must be a list")
    for i, st in enumerate(data["stages"]):
        where = "stages[%d]" % i
        _validate_stage(st, where, mixed, chart_names)
        if st["exceptional"] in symbols:
            raise ScenarioError("%s: duplicate exceptional symbol %r"
                                % (where, st["exceptional"]))
        symbols.add(st["exceptional"])

    idf = data.get("identifications")
    if idf is not None:
        _check_keys(idf, "identifications", ("groups", "citation"), ("count",))
        _cited(idf, "identifications")
        labels = set()
        for i, g in enumerate(idf["groups"]):
            w = "identifications.groups[%d]" % i
            _check_keys(g, w, ("label", "members"))
            if g["label"] in labels:
                raise ScenarioError("%s: duplicate label %r" % (w, g["label"]))
            labels.add(g["label"])
            if not isinstance(g["members"], list) or not g["members"]:
                raise ScenarioError("%s: members must be a nonempty list" % w)
            for m in g["members"]:
                if (not isinstance(m, list) or len(m) != 2
                        or not isinstance(m[0], str)):
                    raise ScenarioError("%s: each member is [chart, point]" % w)
                _point(m[1], w + ".members")

    labels = set()
    for i, q in enumerate(data["quotient_points"]):
        w = "quotient_points[%d]" % i
        _check_keys(q, w, ("label", "chart", "point", "e", "s", "citation"),
                    ("renames", "status", "type", "classification", "pair", "locus"))
        _cited(q, w)
        if q["label"] in labels:
            raise ScenarioError("%s: duplicate label %r" % (w, q["label"]))
        labels.add(q["label"])
        _point(q["point"], w + ".point")
        _int_map(q["e"], w + ".e", minimum=1)
        status = q.get("status", "Toric")
        if status not in ("Toric", "Regular"):
            raise ScenarioError("%s: status must be 'Toric' or 'Regular'" % w)
        if status == "Toric":
            if "type" not in q or "classification" not in q:
                raise ScenarioError("%s: a Toric expectation needs type and "
                                    "classification" % w)
            _check_keys(q["type"], w + ".type", ("r", "weights"))
            if q["classification"] not in ("Terminal", "Canonical", "NotCanonical"):
                raise ScenarioError("%s: unknown classification %r"
                                    % (w, q["classification"]))
        elif "type" in q or "classification" in q or "pair" in q:
            raise ScenarioError("%s: a Regular expectation carries no type data" % w)
        if "pair" in q:
            _check_keys(q["pair"], w + ".pair", ("coefficients", "citation"))
            _cited(q["pair"], w + ".pair")

    seen = set()
    for i, r in enumerate(data["ramification"]):
        w = "ramification[%d]" % i
        _check_keys(r, w, ("symbol", "chart", "kind", "citation"), ("i",))
        _cited(r, w)
        if r["kind"] not in ("unramified", "wild", "fierce"):
            raise ScenarioError("%s: unknown kind %r" % (w, r["kind"]))
        if r["symbol"] in seen:
            raise ScenarioError("%s: duplicate symbol %r" % (w, r["symbol"]))
        seen.add(r["symbol"])

    led = data["ledger"]
    _check_keys(led, "ledger", ("expected_k", "expected_discrepancies", "citation"))
    _cited(led, "ledger")
    _int_map(led["expected_k"], "ledger.expected_k")

    exp = data["expect"]
    _check_keys(exp, "expect", ("verdict", "citation"), ("type_counts",))
    _cited(exp, "expect")
    if exp["verdict"] not in VERDICTS:
        raise ScenarioError("expect.verdict must be one of %s" % (VERDICTS,))
    for i, row in enumerate(exp.get("type_counts", [])):
        _check_keys(row, "expect.type_counts[%d]" % i, ("r", "weights", "count"))

    for i, rc in enumerate(data.get("ring_claims", [])):
        w = "ring_claims[%d]" % i
        _check_keys(rc, w, ("monomial", "citation"), ("chart", "cofactor", "unit"))
        _cited(rc, w)
        _int_map(rc["monomial"], w + ".monomial", minimum=1)
        if "unit" in rc and not isinstance(rc["unit"], bool):
            raise ScenarioError("%s: unit must be a boolean" % w)
    if "cm_witness" in data:
        _check_keys(data["cm_witness"], "cm_witness", ("function", "citation"), ("point",))
        _cited(data["cm_witness"], "cm_witness")
    if "canonical_factor" in data:
        _check_keys(data["canonical_factor"], "canonical_factor",
                    ("numerator", "weights", "citation"))
        _cited(data["canonical_factor"], "canonical_factor")
    if "action_mod_p" in data:
        _check_keys(data["action_mod_p"], "action_mod_p",
                    ("coordinates", "images", "citation"))
        _cited(data["action_mod_p"], "action_mod_p")
    if "change_of_variables" in data:
        blk = data["change_of_variables"]
        _check_keys(blk, "change_of_variables",
                    ("projective_coordinates", "projective_images",
                     "new_coordinates", "definitions", "conjugated_images",
                     "affine_variables", "citation"))
        _cited(blk, "change_of_variables")
        n = len(_name_list(blk["projective_coordinates"],
                           "change_of_variables.projective_coordinates"))
        for key in ("projective_images", "new_coordinates", "definitions",
                    "conjugated_images"):
            if len(blk[key]) != n:
                raise ScenarioError("change_of_variables.%s: expected %d entries"
                                    % (key, n))
        if len(blk["affine_variables"]) != n - 1:
            raise ScenarioError("change_of_variables.affine_variables: expected "
                                "%d entries" % (n - 1))
    return data


def load_scenario(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as ex:
        raise ScenarioError("cannot read %s: %s" % (path, ex)) from None
    except json.JSONDecodeError as ex:
        raise ScenarioError("%s is not valid JSON: %s" % (path, ex)) from None
    return validate_scenario(data)


# ---------------------------------------------------------------------------
# small math helpers used only by the runner


def _poly(text, ctx, where):
    """Parse an expression that must reduce to a polynomial."""
    try:
        e = parse_expression(text, ctx)
    except ExprError as ex:
        raise ScenarioError("%s: %s" % (where, ex)) from None
    if e.den.terms != {(0,) * len(ctx.variables): 1}:
        raise ScenarioError("%s: expected a polynomial, got a denominator" % where)
    return e.num


def _rational(text, ctx, where):
    try:
        return parse_expression(text, ctx)
    except ExprError as ex:
        raise ScenarioError("%s: %s" % (where, ex)) from None


def _expo(names, monomial, where):
    out = [0] * len(names)
    for k, v in monomial.items():
        if k not in names:
            raise ScenarioError("%s: unknown coordinate %r" % (where, k))
        out[names.index(k)] = v
    return tuple(out)


def _fmt_monomial(m):
    return "*".join("%s^%d" % (k, v) if v > 1 else k for k, v in sorted(m.items()))


def _fraction(v, where):
    try:
        return Fraction(v) if isinstance(v, int) else Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise ScenarioError("%s: %r is not a rational number" % (where, v)) from None


def _det(rows):
    """Determinant of a small square matrix of RationalExprs."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def volume_factor_check(action, numerator, weights):
    """sigma-invariance of the declared volume form.

    The form is numerator * dv_1 ^ ... ^ dv_n / (w_1 ... w_n) on the
    chart coordinates v_i.  Pulling back along tau multiplies the wedge
    by the Jacobian determinant of the tau-images, so invariance is the
    rational identity

        (numerator o tau) * det(J) * prod w_i = numerator * prod (w_i o tau).

    Derivatives act on the stored normal-form representatives of the
    images; the check certifies this declared-representative identity
    only, not a model of the differential calculus itself.
    """
    ctx = action.ctx
    names = ctx.variables
    rows = []
    for name in names:
        img = action.images[name]
        N, D = img.num, img.den
        row = []
        for v in names:
            row.append(RationalExpr(N.derivative(v) * D - N * D.derivative(v),
                                    D * D))
        rows.append(row)
    J = _det(rows)
    lhs = action.sigma(numerator) * J
    rhs = RationalExpr.of(numerator, ctx)
    for w in weights:
        lhs = lhs * RationalExpr.of(w, ctx)
        rhs = rhs * action.sigma(w)
    if lhs != rhs:
        return False, "the declared form is not sigma-invariant"
    return True, ("sigma(form)/form = 1 on the declared representatives "
                  "(the identity is checked on coordinates, not on a model "
                  "of the differential calculus)")


def _order_result(action):
    if not action.preserves_relation():
        return False, "the images do not preserve the defining relation"
    if action.is_identity():
        return False, "the action is the identity"
    if not action.check_order():
        return False, "sigma^%d is not the identity" % action.ctx.p
    return True, ("order exactly %d; the ring relation is preserved"
                  % action.ctx.p)


def _bare_divisor_coordinate(chart, symbol):
    eq = chart.divisors.get(symbol)
    if eq is None:
        raise ScenarioError("divisor %s has no equation in chart %s"
                            % (symbol, chart.name))
    if len(eq.terms) == 1:
        (m, c), = eq.terms.items()
        if c == 1 and sum(m) == 1:
            return chart.ctx.variables[m.index(1)]
    raise ScenarioError("divisor %s is not cut out by a coordinate in chart %s"
                        % (symbol, chart.name))


# ---------------------------------------------------------------------------
# the runner


class _Run:
    def __init__(self, data, chart_filter, max_scan_degree):
        self.data = data
        self.filter = chart_filter
        self.max_k = max_scan_degree
        self.steps = []
        self.charts = {}
        self.ledger = Ledger(data["ring"]["p"])
        self.point_results = []
        self.computed_types = {}
        self.locus_points = []      # (chart, normalized point) claimed anywhere
        self.discrepancies = None
        self.verdict = None

    # -- plumbing ------------------------------------------------------------

    def record(self, sid, kind, citation, status, detail):
        self.steps.append({"id": sid, "kind": kind, "status": status,
                           "citation": citation, "detail": detail})

    def step(self, sid, kind, citation, fn, chart=None):
        if self.filter and chart is not None and chart != self.filter:
            return None
        try:
            ok, detail = fn()
        except _CHECK_ERRORS as ex:
            ok, detail = False, str(ex)
        if ok is True:
            status = "pass"
        elif ok == "heuristic":
            status = "heuristic"
        else:
            status = "fail"
        self.record(sid, kind, citation, status, detail)
        return ok

    def chart(self, name):
        ch = self.charts.get(name)
        if ch is None:
            raise BlowupError("prerequisite chart %s was never built" % name)
        return ch

    def _norm_point(self, pt):
        p = self.data["ring"]["p"]
        return tuple(sorted((k, v % p) for k, v in pt.items()))

    # -- phases --------------------------------------------------------------

    def base(self):
        d = self.data
        ring = d["ring"]
        base = d["base"]
        names = tuple(base["coordinates"])
        try:
            if ring["mode"] == "char_p":
                ctx = RingContext(ring["p"], names)
            else:
                terms = {_expo(names, base["uniformizer"], "base.uniformizer"): 1}
                ctx = RingContext(ring["p"], names, mode="mixed",
                                  eis=tuple(ring["eisenstein"]),
                                  uniformizer=terms)
        except RingError as ex:
            raise ScenarioError("ring: %s" % ex) from None
        images = {n: _rational(s, ctx, "base.action.%s" % n)
                  for n, s in base["action"].items()}
        try:
            action = ActionMap(ctx, images)
        except ActionError as ex:
            raise ScenarioError("base.action: %s" % ex) from None
        self.charts[base["chart"]] = base_chart(base["chart"], ctx, action)
        self.step("order", "order", base["citation"],
                  lambda: _order_result(action))

    def prelims(self):
        d = self.data
        root = self.charts[d["base"]["chart"]]
        cm = d.get("cm_witness")
        if cm:
            def run_cm():
                f = _rational(cm["function"], root.ctx, "cm_witness.function")
                return root.action.cm_witness(f, dict(cm.get("point", {})))
            self.step("cm-witness", "witness", cm["citation"], run_cm)
        vol = d.get("canonical_factor")
        if vol:
            def run_vol():
                num = _rational(vol["numerator"], root.ctx,
                                "canonical_factor.numerator")
                ws = [_rational(w, root.ctx, "canonical_factor.weights")
                      for w in vol["weights"]]
                if len(ws) != len(root.ctx.variables):
                    raise ScenarioError("canonical_factor.weights: one entry "
                                        "per coordinate")
                return volume_factor_check(root.action, num, ws)
            self.step("volume-factor", "volume", vol["citation"], run_vol)
        self.ring_claims(chart_level=False)

    def ring_claims(self, chart_level):
        # Claims about a blow-up chart can only run once that chart exists,
        # so they are deferred until after the stages.
        d = self.data
        for idx, rc in enumerate(d.get("ring_claims", []), 1):
            if ("chart" in rc) != chart_level:
                continue
            where = "ring_claims[%d]" % (idx - 1)

            def run_rc(rc=rc, where=where):
                ch = self.chart(rc.get("chart", d["base"]["chart"]))
                q = ch.ctx.const(ch.ctx.p)
                for nm, k in rc["monomial"].items():
                    q = local_divide(q, nm, k)
                if "unit" in rc and is_unit_at(q, {}) != rc["unit"]:
                    return False, ("p/%s %s a unit at the origin, contrary to "
                                   "the declaration"
                                   % (_fmt_monomial(rc["monomial"]),
                                      "is" if rc["unit"] is False else "is not"))
                if "cofactor" in rc:
                    want = _poly(rc["cofactor"], ch.ctx, where + ".cofactor")
                    if q != want:
                        return False, ("cofactor is %s, declared %s"
                                       % (format_poly(q), format_poly(want)))
                return True, ("p = %s * (%s)"
                              % (_fmt_monomial(rc["monomial"]), format_poly(q)))
            self.step("ring-claim-%d" % idx, "ring", rc["citation"], run_rc,
                      chart=rc.get("chart"))

    def stage(self, k, st):
        exc = st["exceptional"]
        cite = st["citation"]
        mixed = self.data["ring"]["mode"] == "mixed"
        merged = {}
        merge_conflict = None
        fixed_flags = []
        built = []
        for b in st["blowups"]:
            pname = b["parent"]
            sid = "s%d-blowup-%s" % (k, pname)
            plans = [{"name": c["name"], "keep": c["keep"],
                      "rename": c.get("rename", {})} for c in b["charts"]]
            try:
                parent = self.chart(pname)
                charts, mults = blow_up(parent, tuple(b["center"]), exc, plans)
            except _CHECK_ERRORS as ex:
                self.record(sid, "blowup", cite, "fail", str(ex))
                continue
            for ch in charts:
                self.charts[ch.name] = ch
            built.extend(zip(charts, b["charts"]))
            fixed_flags.append(charts[0].center_fixed)
            for sym, m in mults.items():
                if sym in merged and merged[sym] != m:
                    merge_conflict = (sym, merged[sym], m)
                merged[sym] = m
            self.record(sid, "blowup", cite, "pass",
                        "charts %s; center pointwise fixed: %s"
                        % (", ".join(ch.name for ch in charts),
                           charts[0].center_fixed))

        if "center_fixed" in st:
            want = st["center_fixed"]
            got = bool(fixed_flags) and all(fixed_flags)
            self.record("s%d-center-fixed" % k, "blowup", cite,
                        "pass" if got == want and fixed_flags else "fail",
                        "center pointwise fixed: %s (declared %s)" % (got, want))

        for ch, cdecl in built:
            nm = ch.name
            if mixed:
                def run_u(ch=ch, cdecl=cdecl):
                    want = {_expo(ch.ctx.variables, cdecl["uniformizer"],
                                  "chart %s uniformizer" % ch.name): 1}
                    got = ch.ctx.uniformizer.terms
                    if got == want:
                        return True, ("uniformizer %s confirmed"
                                      % _fmt_monomial(cdecl["uniformizer"]))
                    return False, ("uniformizer is %s, declared %s"
                                   % (format_poly(ch.ctx.uniformizer),
                                      _fmt_monomial(cdecl["uniformizer"])))
                self.step("s%d-uniformizer-%s" % (k, nm), "uniformizer",
                          cdecl["citation"], run_u, chart=nm)
            if "action" in cdecl:
                def run_a(ch=ch, cdecl=cdecl):
                    bad = []
                    for name, s in sorted(cdecl["action"].items()):
                        want = _rational(s, ch.ctx,
                                         "chart %s action.%s" % (ch.name, name))
                        if ch.action.images[name] != want:
                            bad.append(name)
                    if bad:
                        return False, ("transported action disagrees with the "
                                       "declared images at %s" % ", ".join(bad))
                    return True, ("declared images match the transported action "
                                  "(%s)" % ", ".join(sorted(cdecl["action"])))
                self.step("s%d-action-%s" % (k, nm), "action",
                          cdecl["citation"], run_a, chart=nm)
            if "divisors" in cdecl:
                def run_d(ch=ch, cdecl=cdecl):
                    bad = []
                    for sym, v in sorted(cdecl["divisors"].items()):
                        if sym not in ch.divisors:
                            bad.append("%s unknown" % sym)
                            continue
                        got = ch.divisors[sym]
                        if v is None:
                            if got is not None:
                                bad.append("%s present" % sym)
                        elif got is None or got != ch.ctx.var(v):
                            bad.append("%s != {%s=0}" % (sym, v))
                    if bad:
                        return False, "divisor table mismatch: %s" % "; ".join(bad)
                    return True, "divisor equations as declared"
                self.step("s%d-divisors-%s" % (k, nm), "divisors",
                          cdecl["citation"], run_d, chart=nm)

        pb = st["pullbacks"]

        def run_pb():
            declared = dict(pb["mults"])
            problems = []
            if merge_conflict:
                problems.append("inconsistent computed multiplicity for %s: "
                                "%d vs %d" % merge_conflict)
            for sym in sorted(set(merged) | set(declared)):
                got, want = merged.get(sym), declared.get(sym, 0)
                if got is None:
                    problems.append("%s never computed" % sym)
                elif got != want:
                    problems.append("%s: computed %d, declared %d"
                                    % (sym, got, want))
            if problems:
                return False, "; ".join(problems)
            text = " + ".join("%d*%s" % (m, s)
                              for s, m in sorted(declared.items()) if m)
            if not text:
                return True, "no prior divisor contains the center"
            return True, "center multiplicities: %s (each gains %s)" % (text, exc)
        self.step("s%d-pullbacks" % k, "pullback", pb["citation"], run_pb)
        try:
            self.ledger.record_blowup(
                exc, st["center_kind"],
                {s: m for s, m in pb["mults"].items() if m}, cite)
        except LedgerError as ex:
            self.record("s%d-ledger" % k, "ledger", cite, "fail", str(ex))

        for t in st.get("transitions", []):
            sid = "s%d-transition-%s-%s" % (k, t["from"], t["to"])

            def run_t(t=t):
                a = self.chart(t["from"])
                b = self.chart(t["to"])
                mapping = {}
                for v, s in t["mapping"].items():
                    mapping[v] = _rational(s, b.ctx, "transition %s->%s"
                                           % (t["from"], t["to"]))
                return verify_transition(a, b, mapping)
            self.step(sid, "transition", t["citation"], run_t)

        counts = {}
        for e in st.get("expansions", []):
            key = (e["chart"], e["target"])
            counts[key] = counts.get(key, 0) + 1
            sid = "s%d-expand-%s-%s" % (k, e["chart"], e["target"])
            if counts[key] > 1:
                sid += "-%d" % counts[key]

            def run_e(e=e):
                ch = self.chart(e["chart"])
                body = _poly(e["body"], ch.ctx, "expansion body")
                den = None
                if "denominator" in e:
                    den = _poly(e["denominator"], ch.ctx, "expansion denominator")
                claim = ExpansionClaim(e["target"], e["monomial"], body, den,
                                       e.get("error"))
                return check_expansion_claim(claim, ch.action)
            self.step(sid, "expansion", e["citation"], run_e, chart=e["chart"])

        for L in st.get("loci", []):
            sid = "s%d-locus-%s" % (k, L["chart"])
            for pt in L.get("points", []):
                self.locus_points.append((L["chart"], self._norm_point(pt)))

            def run_l(L=L):
                ch = self.chart(L["chart"])
                rep = check_locus(ch, L.get("on", exc), dict(L["divisor_part"]),
                                  [dict(p) for p in L.get("points", [])],
                                  [dict(c) for c in L.get("curves", [])],
                                  max_k=self.max_k)
                if rep.status == "exact":
                    return True, rep.detail
                if rep.status == "heuristic":
                    return "heuristic", rep.detail
                return False, rep.detail
            self.step(sid, "locus", L["citation"], run_l, chart=L["chart"])

    def identifications(self):
        idf = self.data.get("identifications")
        if not idf:
            return

        def run():
            seen = {}
            for g in idf["groups"]:
                for chart, pt in g["members"]:
                    key = (chart, self._norm_point(pt))
                    if key in seen:
                        return False, ("chart point %s of %s claimed by groups "
                                       "%s and %s" % (pt, chart, seen[key],
                                                      g["label"]))
                    seen[key] = g["label"]
            claimed = set(self.locus_points)
            missing = sorted(k for k in claimed if k not in seen)
            extra = sorted(k for k in seen if k not in claimed)
            if missing:
                return False, ("locus points never identified: %s"
                               % "; ".join("%s %s" % m for m in missing))
            if extra:
                return False, ("identified points never claimed in a locus: %s"
                               % "; ".join("%s %s" % m for m in extra))
            n = len(idf["groups"])
            if "count" in idf and idf["count"] != n:
                return False, ("%d groups declared, count says %d"
                               % (n, idf["count"]))
            return True, ("%d chart points form %d distinct points"
                          % (len(seen), n))
        self.step("identifications", "identify", idf["citation"], run)

    def points(self):
        for q in self.data["quotient_points"]:
            label = q["label"]
            status_want = q.get("status", "Toric")
            result = {"label": label, "classification": None}
            self.point_results.append(result)

            def run_q(q=q, result=result, status_want=status_want):
                ch = self.chart(q["chart"])
                act = ch.action
                pt = dict(q["point"])
                if pt:
                    act = shift_origin(act, pt, q.get("renames"))
                rep = check_mup(act, dict(q["e"]), q["s"])
                if rep.status != status_want:
                    return False, ("criterion returned %s (%s), expected %s"
                                   % (rep.status, rep.detail, status_want))
                if rep.status == "Regular":
                    result["classification"] = "Regular"
                    return True, "the quotient is regular at this point"
                self.computed_types[label] = rep.toric_type
                result["classification"] = rep.classification
                declared = SingularityType(q["type"]["r"],
                                           tuple(q["type"]["weights"]))
                if not rep.toric_type.equivalent_to(declared):
                    return False, ("computed type %s does not match declared %s"
                                   % (rep.toric_type, declared))
                if rep.classification != q["classification"]:
                    return False, ("computed class %s, declared %s"
                                   % (rep.classification, q["classification"]))
                return True, ("type %s, %s (age sums %s)"
                              % (rep.toric_type, rep.classification,
                                 rep.rt_sums))
            self.step("mup-%s" % label, "mup", q["citation"], run_q,
                      chart=q["chart"])

            if "pair" in q:
                def run_p(q=q, result=result):
                    t = SingularityType(q["type"]["r"],
                                        tuple(q["type"]["weights"]))
                    coeffs = [_fraction(c, "pair coefficients")
                              for c in q["pair"]["coefficients"]]
                    ok, sums = reid_tai_pair(t, coeffs)
                    result["pair_ok"] = ok
                    if not ok:
                        return False, "boundary inequality fails: %s" % sums
                    return True, ("boundary inequality holds for %s with "
                                  "coefficients (%s): sums %s"
                                  % (t, ", ".join(str(c) for c in coeffs),
                                     ", ".join(str(s) for s in sums)))
                self.step("pair-%s" % label, "pair", q["pair"]["citation"],
                          run_p, chart=q["chart"])

    def ramification(self):
        for r in self.data["ramification"]:
            sym = r["symbol"]

            def run_r(r=r, sym=sym):
                ch = self.chart(r["chart"])
                try:
                    name = _bare_divisor_coordinate(ch, sym)
                except ScenarioError as ex:
                    return False, str(ex)
                rep = ramification(ch.action, name)
                if rep.kind != r["kind"]:
                    return False, ("computed %s along %s, declared %s"
                                   % (rep.kind, sym, r["kind"]))
                if "i" in r and rep.i != r["i"]:
                    return False, ("ramification number %d, declared %d"
                                   % (rep.i, r["i"]))
                self.ledger.record_ramification(sym, rep, r["citation"])
                return True, ("%s: %s, i=%d, different %d, pullback index %d"
                              % (sym, rep.kind, rep.i, rep.different,
                                 rep.pullback_index))
            self.step("ram-%s" % sym, "ramification", r["citation"], run_r,
                      chart=r["chart"])

    def ledger_checks(self):
        led = self.data["ledger"]

        def run_k():
            want = dict(led["expected_k"])
            got = self.ledger.k
            bad = ["%s: computed %s, declared %s" % (s, got.get(s), want.get(s))
                   for s in sorted(set(got) | set(want))
                   if got.get(s) != want.get(s)]
            if bad:
                return False, "; ".join(bad)
            text = " + ".join("%d*%s" % (got[s], s) for s in self.ledger.order)
            return True, "K_top = pull*K_0 + %s" % text
        self.step("ledger-k", "ledger", led["citation"], run_k)

        def run_disc():
            self.discrepancies = self.ledger.solve_discrepancies()
            want = {s: _fraction(v, "ledger.expected_discrepancies")
                    for s, v in led["expected_discrepancies"].items()}
            got = self.discrepancies
            bad = ["%s: computed %s, declared %s" % (s, got.get(s), want.get(s))
                   for s in sorted(set(got) | set(want))
                   if got.get(s) != want.get(s)]
            if bad:
                return False, "; ".join(bad)
            text = ", ".join("a(%s) = %s" % (s, got[s]) for s in self.ledger.order)
            return True, text
        self.step("ledger-disc", "ledger", led["citation"], run_disc)

    def modp(self):
        blk = self.data.get("action_mod_p")
        if not blk:
            return

        def run():
            root = self.charts[self.data["base"]["chart"]]
            tgt = RingContext(root.ctx.p, tuple(blk["coordinates"]))
            bad = []
            for name in blk["coordinates"]:
                want = _rational(blk["images"][name], tgt,
                                 "action_mod_p.images.%s" % name)
                img = root.action.images[name]
                num = reduce_mod_p(img.num, tgt)
                den = reduce_mod_p(img.den, tgt)
                if den.is_zero():
                    return False, ("denominator of tau(%s) vanishes mod p"
                                   % name)
                if RationalExpr(num, den) != want:
                    bad.append(name)
            if bad:
                return False, ("reduction differs from the declared "
                               "positive-characteristic action at %s"
                               % ", ".join(bad))
            return True, ("the action reduces mod p to the declared "
                          "positive-characteristic action")
        self.step("mod-p", "modp", blk["citation"], run)

    def conjugation(self):
        blk = self.data.get("change_of_variables")
        if not blk:
            return

        def run():
            root = self.charts[self.data["base"]["chart"]]
            eis = root.ctx.eis
            if eis is None:
                return False, "the conjugation check needs a mixed base ring"
            pv = tuple(blk["projective_coordinates"])
            nv = tuple(blk["new_coordinates"])
            sp = RingContext(root.ctx.p, pv, mode="mixed", eis=eis)
            sn = RingContext(root.ctx.p, nv, mode="mixed", eis=eis)
            imgs = [_poly(s, sp, "projective_images") for s in blk["projective_images"]]
            defs = [_poly(s, sp, "definitions") for s in blk["definitions"]]
            conj = [_poly(s, sn, "conjugated_images") for s in blk["conjugated_images"]]
            to_old = {nv[j]: defs[j] for j in range(len(nv))}
            acted = {pv[j]: imgs[j] for j in range(len(pv))}
            for i in range(len(nv)):
                lhs = conj[i].substitute(to_old)
                rhs = defs[i].substitute(acted)
                if lhs != rhs:
                    return False, ("conjugated image of %s does not transform "
                                   "the substituted coordinates" % nv[i])
            av = blk["affine_variables"]
            sub = {nv[j]: root.ctx.var(av[j]) for j in range(len(av))}
            sub[nv[-1]] = root.ctx.one()
            nums = [c.substitute(sub) for c in conj]
            bad = []
            for j, name in enumerate(av):
                if RationalExpr(nums[j], nums[-1]) != root.action.images[name]:
                    bad.append(name)
            if bad:
                return False, ("dehomogenized action differs at %s"
                               % ", ".join(bad))
            return True, ("the conjugated projective action reproduces the "
                          "declared affine images")
        self.step("conjugation", "conjugation", blk["citation"], run)

    def census(self):
        exp = self.data["expect"]
        rows = exp.get("type_counts")
        if not rows:
            return

        def run():
            toric = [q["label"] for q in self.data["quotient_points"]
                     if q.get("status", "Toric") == "Toric"]
            used = set()
            problems = []
            for row in rows:
                t = SingularityType(row["r"], tuple(row["weights"]))
                hits = [lab for lab in toric
                        if lab in self.computed_types
                        and self.computed_types[lab].equivalent_to(t)]
                for lab in hits:
                    if lab in used:
                        problems.append("%s matched twice" % lab)
                used.update(hits)
                if len(hits) != row["count"]:
                    problems.append("type %s: %d points computed, %d declared"
                                    % (t, len(hits), row["count"]))
            unmatched = [lab for lab in toric if lab not in used]
            if unmatched:
                problems.append("no declared class for %s" % ", ".join(unmatched))
            if problems:
                return False, "; ".join(problems)
            return True, ("%d analyzed points fall into the declared classes"
                          % len(toric))
        self.step("census", "census", exp["citation"], run)

    def final_verdict(self):
        exp = self.data["expect"]

        def run():
            if self.discrepancies is None:
                return False, "discrepancies unavailable; verdict not computed"
            bundle = assemble_verdict(self.discrepancies, self.point_results)
            self.verdict = bundle.verdict
            if bundle.verdict != exp["verdict"]:
                return False, ("verdict %s (%s), expected %s"
                               % (bundle.verdict, bundle.detail, exp["verdict"]))
            return True, "%s: %s" % (bundle.verdict, bundle.detail)
        self.step("verdict", "verdict", exp["citation"], run)

    # -- entry ---------------------------------------------------------------

    def run(self):
        self.base()
        self.prelims()
        for i, st in enumerate(self.data["stages"], 1):
            self.stage(i, st)
        self.ring_claims(chart_level=True)
        self.identifications()
        self.points()
        if not self.filter:
            self.ramification()
            self.ledger_checks()
            self.modp()
            self.conjugation()
            self.census()
            self.final_verdict()
        return {"scenario": self.data["name"], "steps": self.steps,
                "verdict": self.verdict, "runtime": None}


def run_scenario(data, chart_filter=None, max_scan_degree=4):
    """Execute every check a validated scenario declares.

    chart_filter restricts chart-local steps to one chart and skips the
    global bookkeeping (ledger, verdict); it exists for debugging a
    single chart quickly.  Returns the report dict.
    """
    return _Run(data, chart_filter, max_scan_degree).run()


def report_passed(report):
    return all(s["status"] != "fail" for s in report["steps"])


def render_report(report):
    """Stable text rendering of a report."""
    lines = ["scenario %s" % report["scenario"]]
    width = max((len(s["id"]) for s in report["steps"]), default=0)
    for s in report["steps"]:
        tag = {"pass": "PASS", "fail": "FAIL", "heuristic": "HEUR"}[s["status"]]
        lines.append("  [%s] %-*s %s" % (tag, width, s["id"], s["detail"]))
    lines.append("verdict: %s" % (report["verdict"] or "not computed"))
    lines.append("result: %s" % ("PASS" if report_passed(report) else "FAIL"))
    return "\n".join(lines)
