"""Command-line surface.

Exit codes: 0 success; 2 validation error (bad arguments, non-prime p,
malformed descriptors); 1 internal verification failure (a failed axiom
check or acceptance criterion — a bug signal, not a usage error).

Output is one JSON document on stdout by default; --table renders the
same data as an aligned table.  --out FILE writes the document to FILE
instead.  P2MODELS_THREADS (or --threads) sizes the selftest pool;
results are canonically ordered either way.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .artin_hasse import ah_series, deformed_ah
from .dvr import eta, make_ring
from .errors import BudgetError, P2ModelsError
from .fiber import FiberClass, classify_fiber, verify_fiber
from .hopf import check_hopf_axioms
from .models import (DEFAULT_BUDGET, ModelDescriptor, build_extension,
                     enumerate_models, hom_models, hom_models_brute,
                     is_isomorphic, phi_brute, phi_closed, p2_surjective)
from .selftest import run_selftest


class ValidationError(Exception):
    pass


def _render_table(headers, rows) -> str:
    cols = [headers] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in cols[1:]:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)


def _emit(args, doc, headers=None, rows=None) -> None:
    if getattr(args, "table", False) and headers is not None:
        text = _render_table(headers, rows)
    else:
        text = json.dumps(doc, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _ring_for(args):
    try:
        return make_ring(args.p, args.precision)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _parse_descriptor(ring, blob: str) -> ModelDescriptor:
    try:
        obj = json.loads(blob)
        return ModelDescriptor.from_json(ring, obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise ValidationError(f"malformed descriptor: {exc}") from exc


def _check_cell(args):
    if not (args.p >= args.m >= args.n >= 0):
        raise ValidationError(
            f"need p >= m >= n >= 0, got p={args.p}, m={args.m}, n={args.n}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_ring_info(args) -> int:
    ring = _ring_for(args)
    doc = {
        "p": ring.p, "M": ring.M, "e": ring.e, "flavor": ring.flavor,
        "v_p": ring.e, "v_lam1": ring.lam1.valuation(),
        "v_lam2": ring.lam2.valuation(),
        "eta_digits_mod_pi^p": list(eta(ring).reduce_mod(ring.p).digits),
        "eisenstein_coeffs": [int(c) for c in ring.coeffs],
    }
    rows = [(k, v) for k, v in doc.items()]
    _emit(args, doc, ["field", "value"], rows)
    return 0


def cmd_phi(args) -> int:
    ring = _ring_for(args)
    _check_cell(args)
    els = (phi_brute(ring, args.m, args.n, args.budget) if args.brute
           else phi_closed(ring, args.m, args.n))
    els = sorted(els, key=lambda e: (e.j, e.a.digits))
    doc = {"p": args.p, "m": args.m, "n": args.n,
           "surjective": p2_surjective(ring, args.m, args.n),
           "elements": [e.to_json() for e in els]}
    rows = [(e.a.digit_string() or "0", e.j) for e in els]
    _emit(args, doc, ["a", "j"], rows)
    return 0


def cmd_enumerate(args) -> int:
    ring = _ring_for(args)
    if not (0 <= args.m_max <= args.p):
        raise ValidationError("need 0 <= m-max <= p")
    models = enumerate_models(ring, args.m_max)
    doc = {"p": args.p, "m_max": args.m_max,
           "models": [d.to_json() for d in models]}
    rows = [(d.m, d.n, d.a.digit_string() or "0", d.j) for d in models]
    _emit(args, doc, ["m", "n", "a", "j"], rows)
    return 0


def cmd_isomorphic(args) -> int:
    ring = _ring_for(args)
    d1 = _parse_descriptor(ring, args.left)
    d2 = _parse_descriptor(ring, args.right)
    if d1.j == 0 or d2.j == 0:
        raise ValidationError("isomorphism criterion needs j != 0")
    result = is_isomorphic(d1, d2)
    doc = {"left": d1.to_json(), "right": d2.to_json(),
           "isomorphic": result}
    _emit(args, doc, ["isomorphic"], [(result,)])
    return 0


def cmd_hom(args) -> int:
    ring = _ring_for(args)
    d1 = _parse_descriptor(ring, args.left)
    d2 = _parse_descriptor(ring, args.right)
    if d1.j == 0 or d2.j == 0:
        raise ValidationError("hom classification needs j != 0")
    hc = hom_models(d1, d2)
    doc = {"left": d1.to_json(), "right": d2.to_json(),
           "hom": hc.to_json()}
    if args.brute:
        hb, _ = hom_models_brute(d1, d2)
        doc["brute"] = hb.to_json()
        if hb.tag != hc.tag:
            print(json.dumps(doc, indent=2), file=sys.stderr)
            return 1
    _emit(args, doc, ["class"], [(hc.tag,)])
    return 0


def cmd_fiber(args) -> int:
    ring = _ring_for(args)
    d = _parse_descriptor(ring, args.descriptor)
    fc = classify_fiber(d)
    doc = {"descriptor": d.to_json(), "fiber": fc.to_json()}
    if args.verify:
        ok = verify_fiber(d)
        doc["verified"] = ok
        if not ok:
            _emit(args, doc)
            return 1
    _emit(args, doc, ["class", "params"], [(fc.tag, fc.params)])
    return 0


def cmd_verify(args) -> int:
    ring = _ring_for(args)
    d = _parse_descriptor(ring, args.descriptor)
    pres = build_extension(d)
    rep = check_hopf_axioms(pres)
    report = []
    fiber_ok = verify_fiber(d, report)
    doc = {"descriptor": d.to_json(),
           "axioms": {"coassoc": rep.coassoc, "counit": rep.counit_law,
                      "antipode": rep.antipode_law,
                      "commutative": rep.commutativity,
                      "units": rep.unit_certificates, "rank": rep.rank},
           "fiber_verified": fiber_ok,
           "failures": rep.failures + report}
    if args.emit_presentation:
        doc["presentation"] = pres.to_json()
    ok = rep.ok and fiber_ok and rep.rank == ring.p ** 2
    _emit(args, doc, ["check", "result"],
          [("axioms", rep.ok), ("rank", rep.rank),
           ("fiber", fiber_ok)])
    return 0 if ok else 1


def cmd_selftest(args) -> int:
    criteria = args.criteria.split(",") if args.criteria else None
    try:
        results = run_selftest(args.p, criteria, threads=args.threads)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    doc = [r.to_json() for r in results]
    rows = [(r.cid, "PASS" if r.passed else "FAIL",
             f"{r.seconds:.2f}s", r.description) for r in results]
    _emit(args, doc, ["criterion", "status", "time", "description"], rows)
    return 0 if all(r.passed for r in results) else 1


def cmd_dump_series(args) -> int:
    if args.degree < 1:
        raise ValidationError("degree must be >= 1")
    if args.deformed:
        d = deformed_ah(args.p, args.degree)
        doc = {"p": args.p, "degree": args.degree, "series": "deformed",
               "coefficients": [
                   {"degree": i,
                    "terms": [{"u": ue, "l": le, "value": str(q)}
                              for (ue, le), q in sorted(poly.terms.items())]}
                   for i, poly in enumerate(d.coeffs)]}
        rows = [(i, " + ".join(f"({q}) U^{ue} L^{le}"
                               for (ue, le), q in sorted(poly.terms.items()))
                 or "0")
                for i, poly in enumerate(d.coeffs)]
    else:
        s = ah_series(args.p, args.degree)
        doc = {"p": args.p, "degree": args.degree, "series": "exponential",
               "coefficients": [str(c) for c in s.coeffs]}
        rows = [(i, str(c)) for i, c in enumerate(s.coeffs)]
    _emit(args, doc, ["degree", "coefficient"], rows)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    env_threads = os.environ.get("P2MODELS_THREADS", "1")
    parser = argparse.ArgumentParser(
        prog="p2models",
        description="Exact constructions and classification of the finite "
                    "flat models of the cyclic group of order p^2 over the "
                    "ramified cyclotomic base.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, cell=False):
        sp.add_argument("--p", type=int, default=3, help="odd prime")
        sp.add_argument("--precision", type=int, default=12,
                        help="coefficient precision M (digits mod p^M)")
        sp.add_argument("--json", action="store_true", default=False,
                        help="JSON output (default)")
        sp.add_argument("--table", action="store_true",
                        help="aligned-table output")
        sp.add_argument("--out", help="write output to FILE")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="brute-force candidate budget")
        if cell:
            sp.add_argument("--m", type=int, required=True)
            sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("ring-info", help="base-ring constants")
    common(sp)
    sp.set_defaults(fn=cmd_ring_info)

    sp = sub.add_parser("phi", help="the parameter group of a cell")
    common(sp, cell=True)
    sp.add_argument("--brute", action="store_true",
                    help="enumerate the congruence instead of the closed form")
    sp.set_defaults(fn=cmd_phi)

    sp = sub.add_parser("enumerate", help="all models up to m-max")
    common(sp)
    sp.add_argument("--m-max", type=int, required=True)
    sp.set_defaults(fn=cmd_enumerate)

    sp = sub.add_parser("isomorphic", help="isomorphism test")
    common(sp)
    sp.add_argument("--left", required=True, help="descriptor JSON")
    sp.add_argument("--right", required=True, help="descriptor JSON")
    sp.set_defaults(fn=cmd_isomorphic)

    sp = sub.add_parser("hom", help="Hom classification between models")
    common(sp)
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--brute", action="store_true",
                    help="cross-check against the p^2 candidate maps")
    sp.set_defaults(fn=cmd_hom)

    sp = sub.add_parser("fiber", help="special-fiber class")
    common(sp)
    sp.add_argument("--descriptor", required=True)
    sp.add_argument("--verify", action="store_true")
    sp.set_defaults(fn=cmd_fiber)

    sp = sub.add_parser("verify", help="full verification of one model")
    common(sp)
    sp.add_argument("--descriptor", required=True)
    sp.add_argument("--emit-presentation", action="store_true")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("selftest", help="run the acceptance battery")
    common(sp)
    sp.add_argument("--criteria", help="comma-separated criterion ids")
    sp.add_argument("--threads", type=int, default=int(env_threads)
                    if env_threads.isdigit() else 1)
    sp.set_defaults(fn=cmd_selftest)

    sp = sub.add_parser("dump-series", help="series coefficients as "
                        "exact fractions (golden-file friendly)")
    common(sp)
    sp.add_argument("--degree", type=int, default=27)
    sp.add_argument("--deformed", action="store_true")
    sp.set_defaults(fn=cmd_dump_series)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except P2ModelsError as exc:
        print(f"verification failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
