"""Command line entry point: pfq <subcommand> [options].

Exit codes: 0 success, 1 a property or agreement failure, 2 a usage error.
"""
import argparse
import csv
import io
import json
import math
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import charsum, classifier, geometry, oracle, quad_core
from .errors import BudgetExceeded, PfqError, WitnessVerificationFailed
from .field_tower import FieldTower, in_mu, make_tower
from .quad_core import CoeffVec

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_BUDGET = 100_000  # coefficient vectors a census may process
CSV_COLUMNS = ["c0", "c1", "c2", "c3", "coarse", "family", "class", "epsilon",
               "epsilon_square_class", "verdict_class", "verdict_brute", "agree"]


class UsageError(Exception):
    pass


def _tower(args):
    if getattr(args, "field", None):
        try:
            obj = json.loads(args.field)
        except json.JSONDecodeError as e:
            raise UsageError(f"--field is not valid JSON: {e}")
        return FieldTower.from_json(obj)
    if args.p is None or args.k is None or args.ell is None:
        raise UsageError("give --p, --k and --ell, or --field")
    return make_tower(args.p, args.k, args.ell)


def _coeffs(t, text):
    if text is None:
        raise UsageError("--c is required")
    return quad_core.coeffs(t, text)


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _bool_str(b):
    return "" if b is None else ("planar" if b else "not_planar")


# ----------------------------------------------------------------------
# single-input commands


def cmd_classify(args):
    t = _tower(args)
    c = _coeffs(t, args.c)
    v = classifier.planar_verdict(c)
    out = {"field": t.to_json(), "c": c.strs()}
    out.update(v.to_json())
    out["witness"] = v.witness.to_json() if v.witness else None
    _emit(out)
    return EXIT_OK


def cmd_planar(args):
    t = _tower(args)
    c = _coeffs(t, args.c)
    out = {"c": c.strs()}
    code = EXIT_OK
    if not args.oracle_only:
        v = classifier.planar_verdict(c, witness=False)
        out.update({"classifier": v.planar, "rule": v.rule, "class": v.cls})
    if args.oracle_only or args.both:
        b = oracle.is_planar_bruteforce(oracle.table_of(c))
        out["brute"] = b.planar
        if b.witness:
            out["brute_witness"] = {"a": str(t.elt(b.witness[0])), "b": str(t.elt(b.witness[1])),
                                    "x1": str(t.elt(b.witness[2])), "x2": str(t.elt(b.witness[3]))}
    if args.both:
        out["agree"] = out["brute"] == out["classifier"]
        code = EXIT_OK if out["agree"] else EXIT_FAIL
    _emit(out)
    return code


def cmd_invariants(args):
    t = _tower(args)
    c = _coeffs(t, args.c)
    qd = quad_core.build_quad(c)
    out = {"c": c.strs(), "invariants": quad_core.invariants(c).to_json(),
           "A": qd.A.to_json(), "B": qd.B.to_json(), "C": qd.C.to_json(),
           "g": qd.g.to_json(), "deg_g": qd.deg_g,
           "identities": quad_core.check_identities(c)}
    _emit(out)
    return EXIT_OK if all(out["identities"].values()) else EXIT_FAIL


def cmd_geometry(args):
    t = _tower(args)
    c = _coeffs(t, args.c)
    rep = geometry.ram_report(c)
    _emit({"c": c.strs(), **rep.to_json(), "ok": rep.ok()})
    return EXIT_OK if rep.ok() else EXIT_FAIL


def cmd_family(args):
    t = _tower(args)
    eps = None if args.epsilon is None else t.parse(args.epsilon)
    tag = args.tag
    out = {"tag": tag, "epsilon": None if eps is None else str(eps)}
    code = EXIT_OK
    table = oracle.make_family(tag, eps, t)
    if tag in oracle.TAGS:
        c = oracle.canonical_coeffs(t, tag, eps)
        out["coeffs"] = c.strs()
        if t.ell % t.k:
            planar, rule = classifier.verdict_for_class(tag, eps, t)
        else:
            v = classifier.tilde_verdict(c)
            planar, rule = v.planar, v.rule
        out["classifier"], out["rule"] = planar, rule
    if args.planar:
        out["brute"] = oracle.is_planar_bruteforce(table).planar
        if "classifier" in out:
            out["agree"] = out["brute"] == out["classifier"]
            code = EXIT_OK if out["agree"] else EXIT_FAIL
    _emit(out)
    return code


# ----------------------------------------------------------------------
# census


def census_row(c, brute):
    v = classifier.planar_verdict(c, witness=False)
    eps = v.label.epsilon if v.label else None
    row = {"c0": str(c[0]), "c1": str(c[1]), "c2": str(c[2]), "c3": str(c[3]),
           "coarse": v.coarse or "", "family": v.family or "",
           "class": v.cls or "", "epsilon": "" if eps is None else str(eps),
           "epsilon_square_class": v.epsilon_square_class() or "",
           "verdict_class": _bool_str(v.planar), "verdict_brute": "", "agree": ""}
    if brute or v.planar:
        b = oracle.is_planar_bruteforce(oracle.table_of(c)).planar
        row["verdict_brute"] = _bool_str(b)
        row["agree"] = str(b == v.planar).lower()
    return row


def _census_chunk(job):
    field_json, items = job
    t = FieldTower.from_json(field_json)
    return [census_row(CoeffVec(t, [t.elt(x) for x in key]), brute) for key, brute in items]


def census_plan(t, samples=None, exhaustive=False, cross_check=0.05, seed=0, budget=None):
    """(coefficient keys, brute-force flags) in canonical order."""
    budget = DEFAULT_BUDGET if budget is None else budget
    rng = random.Random(seed)
    if exhaustive:
        n = t.q2 ** 4 - 1
        if n > budget:
            raise BudgetExceeded(f"exhaustive census needs {n} vectors, budget is {budget}")
        keys = [(a, b, c, d) for a in range(t.q2) for b in range(t.q2)
                for c in range(t.q2) for d in range(t.q2)][1:]
    else:
        if samples is None:
            raise UsageError("give --samples or --exhaustive")
        if samples > budget:
            raise BudgetExceeded(f"{samples} samples exceed the budget {budget}")
        keys = []
        while len(keys) < samples:
            k = tuple(rng.randrange(t.q2) for _ in range(4))
            if any(k):
                keys.append(k)
        keys.sort()
    m = len(keys)
    n_check = min(m, math.ceil(cross_check * m))
    chosen = set(rng.sample(range(m), n_check))
    return keys, [i in chosen for i in range(m)]


def run_census(t, keys, flags, workers=1, chunk=500):
    items = list(zip(keys, flags))
    jobs = [(t.to_json(), items[i:i + chunk]) for i in range(0, len(items), chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_census_chunk, jobs))
    else:
        parts = [_census_chunk(j) for j in jobs]
    return [r for part in parts for r in part]


def census_summary(t, rows):
    classes, verdicts = {}, {"planar": 0, "not_planar": 0}
    checked = disagree = 0
    for r in rows:
        key = r["class"] or r["coarse"]
        classes[key] = classes.get(key, 0) + 1
        verdicts[r["verdict_class"]] += 1
        if r["verdict_brute"]:
            checked += 1
            disagree += r["agree"] != "true"
    return {"field": t.to_json(), "rows": len(rows), "per_class": dict(sorted(classes.items())),
            "verdicts": verdicts, "cross_checked": checked, "disagreements": disagree}


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_census(args):
    t = _tower(args)
    keys, flags = census_plan(t, args.samples, args.exhaustive, args.cross_check,
                              args.seed, args.budget)
    rows = run_census(t, keys, flags, args.workers)
    text = rows_to_csv(rows)
    summary = census_summary(t, rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.summary:
        with open(args.summary, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
    print(json.dumps(summary, sort_keys=True), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK if summary["disagreements"] == 0 else EXIT_FAIL


# ----------------------------------------------------------------------
# verification suite


def _random_c(t, rng):
    while True:
        c = CoeffVec(t, [t.elt(rng.randrange(t.q2)) for _ in range(4)])
        if not c.is_zero():
            return c


def verify_field(t, samples, rng, fault=None):
    """Named invariant -> (passed, checked) over random inputs in one tower."""
    res = {}

    def record(name, ok):
        p, n = res.get(name, (0, 0))
        res[name] = (p + bool(ok), n + 1)

    for _ in range(samples):
        c = _random_c(t, rng)
        for name, ok in quad_core.check_identities(c, fault=fault).items():
            record(name, ok)
        record("swap_symmetry", quad_core.swap_symmetry(c))
        inv = quad_core.invariants(c)
        if inv.V and not quad_core.build_quad(c).g.is_constant():
            rep = geometry.ram_report(c)
            for name, ok in rep.checks.items():
                record("geometry:" + name, ok)
    # planarity against two-to-one for a few canonical forms
    for tag in ("F0", "F1"):
        F = oracle.make_family(tag, None, t)
        record("planar_iff_two_to_one", oracle.do_planarity_equivalence(F)["agree"])
        planar, _ = classifier.verdict_for_class(tag, None, t)
        if t.ell % t.k:
            record("parity_closed_form", planar == oracle.is_planar_bruteforce(F).planar)
    return res


def cmd_verify(args):
    fields = args.fields or ["3,1,1", "3,3,1", "3,3,2", "5,1,1"]
    rng = random.Random(args.seed)
    failed = []
    for triple in fields:
        try:
            p, k, ell = (int(x) for x in triple.split(","))
        except ValueError:
            raise UsageError(f"bad field triple {triple!r}")
        t = make_tower(p, k, ell)
        res = verify_field(t, args.samples, rng, args.inject_fault)
        for name, (ok, n) in sorted(res.items()):
            status = "PASS" if ok == n else "FAIL"
            print(f"{status} ({p},{k},{ell}) {name}: {ok}/{n}")
            if ok != n:
                failed.append(f"({p},{k},{ell}) {name}")
    if failed:
        print("failed invariants: " + "; ".join(failed))
        return EXIT_FAIL
    return EXIT_OK


# ----------------------------------------------------------------------
# character sums


def cmd_charsum(args):
    t = _tower(args)
    eps = t.parse(args.epsilon)
    if args.which == "appendix-a":
        cert = charsum.appendix_A(t, eps, check=False)
    else:
        xi = None if args.xi is None else t.parse(args.xi)
        if (t.ell // t.delta) % 2 == 0 and not in_mu(eps) and eps.v:
            t, eps = charsum.f2_lift(t, eps)
            xi = None if xi is None else t.elt(xi.v)
        cert = charsum.appendix_B(t, eps, xi, check=False)
    out = cert.to_json()
    _emit(out)
    weil = all(s.within_bound() for s in cert.sums)
    ok = cert.positive and cert.bound_holds and weil and cert.value == cert.identity_value
    return EXIT_OK if ok else EXIT_FAIL


# ----------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--ell", type=int)
    common.add_argument("--field", help="tower as JSON")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--budget", type=int, default=None,
                        help="maximum number of coefficient vectors")

    ap = argparse.ArgumentParser(prog="pfq", description="Planarity of quadrinomials over F_{q^2}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name, fn in (("classify", cmd_classify), ("invariants", cmd_invariants),
                     ("geometry", cmd_geometry)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--c", help="c0,c1,c2,c3")
        s.set_defaults(func=fn)

    s = sub.add_parser("planar", parents=[common])
    s.add_argument("--c")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--oracle-only", action="store_true")
    g.add_argument("--both", action="store_true")
    s.set_defaults(func=cmd_planar)

    s = sub.add_parser("family", parents=[common])
    s.add_argument("--tag", required=True, choices=list(oracle.TAGS) + ["X2"])
    s.add_argument("--epsilon")
    s.add_argument("--planar", action="store_true", help="also run the brute-force test")
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("census", parents=[common])
    g = s.add_mutually_exclusive_group()
    g.add_argument("--samples", type=int)
    g.add_argument("--exhaustive", action="store_true")
    s.add_argument("--cross-check", type=float, default=0.05)
    s.add_argument("--out")
    s.add_argument("--summary")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("verify", parents=[common])
    s.add_argument("--fields", nargs="+", help="p,k,ell triples")
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--inject-fault", choices=["E4-sign"])
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("charsum", parents=[common])
    s.add_argument("which", choices=["appendix-a", "appendix-b"])
    s.add_argument("--epsilon", required=True)
    s.add_argument("--xi")
    s.set_defaults(func=cmd_charsum)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, BudgetExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WitnessVerificationFailed as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except PfqError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
