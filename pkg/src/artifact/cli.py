"""Command line front end.

    artifact verify <scenario> [--json OUT] [--chart NAME] [--max-scan-degree K]
    artifact reid-tai R W1 W2 ... [-c C1 C2 ...]
    artifact list
    artifact explain <scenario> <step-id>

Exit codes: 0 success, 1 a verification step failed, 2 bad input.
The ARTIFACT_MAX_SCAN_DEGREE environment variable caps the field
extension degree used by the zero-set scans (default and maximum 4).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from importlib import resources

from .quotient import QuotientError, SingularityType, reid_tai, reid_tai_pair
from .scenario import (
    ScenarioError, load_scenario, render_report, report_passed, run_scenario,
)

_EXPLANATIONS = {
    "order": "Verifies that the declared coordinate images define a ring "
             "automorphism whose order is exactly the residue characteristic, "
             "and that the defining relation of the base ring is preserved.",
    "witness": "Certifies the witness against the Cohen-Macaulay property: "
               "the function has zero trace under the group yet is a unit at "
               "the declared fixed point, so it cannot come from the quotient.",
    "volume": "Checks sigma-invariance of the declared volume form by "
              "comparing the Jacobian determinant of the action against the "
              "transformation of the declared weight functions.",
    "ring": "Confirms that p lies in the declared monomial ideal of the chart "
            "ring, with a unit cofactor (compared against the declared "
            "cofactor when one is given).",
    "blowup": "Builds the charts of one blow-up, transporting the action "
              "through the substitution and recording whether the center is "
              "pointwise fixed.",
    "uniformizer": "Compares the computed uniformizer monomial of a chart "
                   "against the declared one.",
    "action": "Compares the transported action against the declared images, "
              "as rational functions modulo the ring relation.",
    "divisors": "Compares the computed strict-transform equations of the "
                "exceptional divisors against the declared table.",
    "pullback": "Compares the computed multiplicities of the earlier "
                "exceptional divisors along the center against the declared "
                "pullback formula, then records the stage in the ledger.",
    "transition": "Checks that two charts of the same stage carry the same "
                  "action on their overlap, through the declared coordinate "
                  "change.",
    "expansion": "Verifies a declared expansion of a coordinate difference "
                 "I(v): divisibility by the stated monomial, the stated "
                 "cofactor, and containment of any remainder in the stated "
                 "error ideal.",
    "locus": "Compares the residual fixed locus on the newest exceptional "
             "divisor against the claimed points and curves, by exact "
             "certification where possible and by scanning finite field "
             "extensions otherwise.",
    "identify": "Checks that the chart-by-chart locus points are partitioned "
                "by the declared identification groups, each point claimed "
                "exactly once.",
    "mup": "Runs the quotient-singularity switch criterion at a marked "
           "point: hypothesis checks, the induced linear action, its "
           "eigenvalues, and the resulting toric type with its Reid-Tai "
           "classification.",
    "pair": "Evaluates the boundary-corrected Reid-Tai inequality for a "
            "canonical point, using the declared divisor coefficients.",
    "ramification": "Classifies the quotient map along one exceptional "
                    "divisor (unramified, wild, or fierce) and records the "
                    "ramification number in the ledger.",
    "ledger": "Solves the canonical-class bookkeeping: coefficients of the "
              "exceptional divisors upstairs and the resulting discrepancies "
              "downstairs, compared against the declared values.",
    "modp": "Reduces the mixed-characteristic action modulo p and compares "
            "it with the declared positive-characteristic action.",
    "conjugation": "Checks that the declared projective action, conjugated "
                   "by the declared change of variables, reproduces the "
                   "affine images used by the scenario.",
    "census": "Counts the computed singularity types against the declared "
              "class inventory.",
    "verdict": "Assembles the final classification from the discrepancies "
               "and the per-point analyses, and compares it with the "
               "expected verdict.",
}


def _scan_cap():
    raw = os.environ.get("ARTIFACT_MAX_SCAN_DEGREE")
    if raw is None:
        return 4
    try:
        v = int(raw)
    except ValueError:
        raise ScenarioError("ARTIFACT_MAX_SCAN_DEGREE must be an integer") from None
    if not 1 <= v <= 4:
        raise ScenarioError("ARTIFACT_MAX_SCAN_DEGREE must be between 1 and 4")
    return v


def _resolve(name):
    if os.path.exists(name):
        return name
    base = name if name.endswith(".json") else name + ".json"
    ref = resources.files("artifact").joinpath("scenarios", base)
    if ref.is_file():
        return ref
    raise ScenarioError("no such file or bundled scenario: %s" % name)


def _bundled():
    root = resources.files("artifact").joinpath("scenarios")
    if not root.is_dir():
        return []
    return sorted((f for f in root.iterdir() if f.name.endswith(".json")),
                  key=lambda f: f.name)


def _cmd_verify(args):
    data = load_scenario(_resolve(args.scenario))
    cap = _scan_cap()
    degree = min(args.max_scan_degree or cap, cap)
    t0 = time.monotonic()
    report = run_scenario(data, chart_filter=args.chart, max_scan_degree=degree)
    elapsed = time.monotonic() - t0
    print(render_report(report))
    print("elapsed: %.2fs" % elapsed)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return 0 if report_passed(report) else 1


def _cmd_reid_tai(args):
    try:
        t = SingularityType(args.r, tuple(args.weights))
        if args.coefficients is not None:
            if len(args.coefficients) != len(args.weights):
                raise ScenarioError("need one coefficient per weight")
            coeffs = [Fraction(c) for c in args.coefficients]
            ok, sums = reid_tai_pair(t, coeffs)
            print("%s  %s with boundary %s, sums %s"
                  % ("Terminal" if ok else "NotTerminal", t,
                     [str(c) for c in coeffs], sums))
            return 0
        cls, sums = reid_tai(t)
        print("%s  %s, age sums %s" % (cls, t, sums))
        return 0
    except (QuotientError, ValueError) as ex:
        print("error: %s" % ex, file=sys.stderr)
        return 2


def _cmd_list(args):
    for ref in _bundled():
        try:
            data = json.loads(ref.read_text(encoding="utf-8"))
            print("%-12s %s" % (data.get("name", ref.name), data.get("title", "")))
        except (OSError, json.JSONDecodeError):
            print("%-12s (unreadable)" % ref.name)
    return 0


def _cmd_explain(args):
    data = load_scenario(_resolve(args.scenario))
    report = run_scenario(data, max_scan_degree=_scan_cap())
    for s in report["steps"]:
        if s["id"] == args.step:
            print("step %s (%s): %s" % (s["id"], s["kind"], s["status"]))
            print()
            print(_EXPLANATIONS.get(s["kind"], "No description."))
            print()
            if s["citation"]:
                print("claimed: %s" % s["citation"])
            print("observed: %s" % s["detail"])
            return 0
    raise ScenarioError("no step %r in scenario %s (try 'verify' for the "
                        "full list)" % (args.step, report["scenario"]))


def build_parser():
    ap = argparse.ArgumentParser(
        prog="artifact",
        description="mechanical verification of quotient constructions")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run every check a scenario declares")
    v.add_argument("scenario", help="path or bundled scenario name")
    v.add_argument("--json", metavar="OUT", help="write the machine report here")
    v.add_argument("--chart", metavar="NAME",
                   help="debug: restrict chart-local steps to one chart and "
                        "skip the global bookkeeping")
    v.add_argument("--max-scan-degree", type=int, metavar="K",
                   help="largest field extension degree for zero-set scans")
    v.set_defaults(fn=_cmd_verify)

    r = sub.add_parser("reid-tai", help="classify one cyclic quotient type")
    r.add_argument("r", type=int, help="order of the cyclic group")
    r.add_argument("weights", type=int, nargs="+", help="weights a_1 ... a_n")
    r.add_argument("-c", "--coefficients", nargs="+", metavar="C",
                   help="boundary coefficients for the pair inequality")
    r.set_defaults(fn=_cmd_reid_tai)

    l = sub.add_parser("list", help="list the bundled scenarios")
    l.set_defaults(fn=_cmd_list)

    e = sub.add_parser("explain", help="describe one step of a scenario run")
    e.add_argument("scenario", help="path or bundled scenario name")
    e.add_argument("step", help="step id as shown by verify")
    e.set_defaults(fn=_cmd_explain)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as ex:
        print("error: %s" % ex, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
