"""Command-line front end.

Exit codes: 0 every requested check passed, 1 a checked property failed,
2 usage or input error.
"""

import argparse
import json
import sys

from . import __version__
from .catalog import FIXTURE_TEXT, TABLE1, validate_params, verify_patterson, williams
from .design import (
    DEFAULT_ENUMERATION_CAP,
    classify,
    enumerate_column_multisets,
    format_design,
    parse_design,
    random_design,
    stats,
)
from .errors import CrossoverError
from .infomat import (
    ADJUSTED,
    IGNORED,
    effects_info,
    info_elim_subjects,
    is_connected,
    patterson_closed,
    schur_effects,
)
from .kernels import BACKEND
from .optimality import (
    DIRECT,
    JOINT_BINARY,
    RESIDUAL,
    check_uo,
    efficiency,
    functional_A,
)
from .ratmat import fmt_rational
from .symmetry import BRUTE_FORCE_MAX_V, average_brute, average_closed, average_identity_holds

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _emit(report, out):
    report = {"schema_version": SCHEMA_VERSION, **report}
    out.write(json.dumps(report, indent=2) + "\n")


def _load(path, v=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_design(text, v=v)


def cmd_verify(args, out):
    d = _load(args.design, args.v)
    cls = classify(d)
    connected = is_connected(d)
    rep = verify_patterson(d)
    in_D = cls["no_self_succession"] and connected
    in_B = in_D and cls["binary"]
    report = {
        "command": "verify",
        "design": {"p": d.p, "v": d.v, "n": d.n},
        "no_self_succession": cls["no_self_succession"],
        "binary": cls["binary"],
        "connected": connected,
        "class_D": in_D,
        "class_B": in_B,
        "patterson": rep.as_dict(),
    }
    _emit(report, out)
    ok = in_D if args.class_only else in_D and rep.passed
    return 0 if ok else 1


MATRICES = ("N", "S", "Theta", "M", "C", "C11.22", "C22.11")


def cmd_info(args, out):
    d = _load(args.design, args.v)
    pr = d.profile
    layout = None
    name = args.matrix
    if name == "N":
        M = pr.N
    elif name == "S":
        M = pr.S
    elif name == "Theta":
        M = pr.Theta
    elif name == "M":
        J = info_elim_subjects(d)
        M, layout = J.matrix, J.layout
    else:
        E = effects_info(d, args.periods)
        if name == "C":
            M = E.assembled
            layout = (("tau", d.v), ("delta", d.v))
        elif name == "C11.22":
            M = schur_effects(E, "direct")
        else:
            M = schur_effects(E, "residual")
    if args.format == "csv":
        out.write(M.to_csv())
    else:
        report = {
            "command": "info",
            "matrix_name": name,
            "periods": args.periods if name in ("C", "C11.22", "C22.11") else None,
            "rows": M.rows,
            "cols": M.cols,
            "layout": [{"block": b, "size": s} for b, s in layout] if layout else None,
            "matrix": M.to_json_obj(),
        }
        _emit(report, out)
    return 0


def cmd_efficiency(args, out):
    if args.pairs == "table1":
        pairs = [(p, v) for p, v, _ in TABLE1]
    else:
        if args.p is None or args.v is None:
            raise UsageError("give --pairs table1 or both --p and --v")
        pairs = [(args.p, args.v)]
    rows = [efficiency(p, v) for p, v in pairs]
    if args.format == "json":
        _emit({
            "command": "efficiency",
            "rows": [
                {"p": r.p, "v": r.v, "e_star": fmt_rational(r.e_star), "e_star_decimal": r.e_star_decimal}
                for r in rows
            ],
        }, out)
    else:
        out.write("p,v,e_star\n")
        for r in rows:
            out.write(r.csv_row() + "\n")
    return 0


def _competitors(args, params):
    """(id, design) pairs of connected class-D competitors, canonical order."""
    p, v, n = params.p, params.v, params.n
    binary = args.mode == "joint-binary"
    comp = args.competitors
    if comp[0] == "exhaustive":
        if len(comp) != 1:
            raise UsageError("--competitors exhaustive takes no count")
        try:
            gen = enumerate_column_multisets(p, v, n, True, cap=args.cap)
        except CrossoverError as exc:
            raise UsageError(f"{exc}; try --competitors sample N --seed S") from exc
        for idx, d in enumerate(gen):
            if binary and not classify(d)["binary"]:
                continue
            if is_connected(d):
                yield idx, d
        return
    if comp[0] != "sample" or len(comp) != 2 or not comp[1].isdigit():
        raise UsageError("--competitors must be 'exhaustive' or 'sample N'")
    want = int(comp[1])
    got = 0
    draw = 0
    limit = 100 * max(want, 1)
    while got < want:
        if draw >= limit:
            raise UsageError(f"only {got} connected competitors in {limit} draws")
        d = random_design(p, v, n, seed=args.seed * 1_000_003 + draw,
                          no_self_succession=True, binary=binary)
        draw += 1
        if is_connected(d):
            yield draw - 1, d
            got += 1


def _params_from_args(args):
    if args.design:
        d = _load(args.design)
        rep = verify_patterson(d)
        if not rep.passed:
            raise UsageError("design file does not satisfy the balance conditions")
        return rep.params
    if None in (args.p, args.v, args.t):
        raise UsageError("give --design FILE or all of --p, --v, --t")
    return validate_params(args.p, args.v, args.t)


def cmd_certify(args, out):
    params = _params_from_args(args)
    mode = args.mode
    failures = []
    chain_failures = []
    tested = 0
    min_slack = None
    extra = {}
    if mode == "functional":
        star = patterson_closed(params.p, params.v, params.t)["C_adjusted"]
        A_star = functional_A(star)
        min_gap = None
        equality_off_origin = []
        for idx, d in _competitors(args, params):
            tested += 1
            A_d = functional_A(effects_info(d, ADJUSTED))
            gap = A_d - A_star
            if gap < 0:
                failures.append(idx)
            if gap == 0:
                st = stats(d)
                if (st.x, st.y) != (0, 0):
                    equality_off_origin.append(idx)
            elif min_gap is None or gap < min_gap:
                min_gap = gap
        extra = {
            "A_star": fmt_rational(A_star),
            "min_positive_gap": None if min_gap is None else fmt_rational(min_gap),
            "equality_off_origin": equality_off_origin,
        }
        failures.extend(equality_off_origin)
    else:
        uo_mode = {"direct": DIRECT, "residual": RESIDUAL, "joint-binary": JOINT_BINARY}[mode]
        for idx, d in _competitors(args, params):
            tested += 1
            rep = check_uo(uo_mode, params, d, competitor_id=idx)
            if not rep.dominance:
                failures.append(idx)
            if not rep.chain_ok:
                chain_failures.append(idx)
            if rep.min_slack is not None and (min_slack is None or rep.min_slack < min_slack):
                min_slack = rep.min_slack
        extra = {
            "min_slack": None if min_slack is None else fmt_rational(min_slack),
            "chain_failures": sorted(chain_failures),
        }
    report = {
        "command": "certify",
        "mode": mode,
        "params": params.as_dict(),
        "competitors": " ".join(args.competitors),
        "seed": args.seed,
        "competitors_tested": tested,
        "failures": sorted(failures),
        **extra,
        "backend": BACKEND,
    }
    _emit(report, out)
    return 0 if not failures and not chain_failures else 1


def cmd_construct(args, out):
    if args.kind == "fixture":
        d = parse_design(FIXTURE_TEXT)
        comment = "balanced design, p = 3, v = 4, n = 12"
    else:
        if args.v is None:
            raise UsageError("williams needs --v")
        d = williams(args.v)
        comment = f"Williams design, v = {args.v}"
    rep = verify_patterson(d)
    if not rep.passed:
        sys.stderr.write("constructed design failed self-verification\n")
        return 1
    prm = rep.params
    comment += f" (t = {prm.t}, lambda = {prm.lam})"
    out.write(format_design(d, header=True, letters=args.letters, comment=comment))
    return 0


def cmd_average(args, out):
    d = _load(args.design, args.v)
    report = {"command": "average", "design": {"p": d.p, "v": d.v, "n": d.n}}
    closed = None
    try:
        av = average_closed(d)
        closed = av.assembled(d.v)
        report["closed_form"] = {
            "abar": fmt_rational(av.abar),
            "bbar": fmt_rational(av.bbar),
            "cbar": fmt_rational(av.cbar),
            "e": fmt_rational(av.e),
            "matrix": closed.to_json_obj(),
        }
    except CrossoverError as exc:
        report["closed_form"] = {"error": str(exc)}
    if d.v > BRUTE_FORCE_MAX_V:
        report["brute_force"] = {"error": f"v = {d.v} exceeds brute-force cap {BRUTE_FORCE_MAX_V}"}
        _emit(report, out)
        return 2
    brute = average_brute(d, "C_ignored")
    report["brute_force"] = {"matrix": brute.to_json_obj()}
    match = closed is not None and closed == brute
    report["match"] = match if closed is not None else "not-applicable"
    cls = classify(d)
    eq32 = "not-applicable"
    if cls["binary"] and d.n % d.v == 0 and is_connected(d):
        try:
            eq32 = average_identity_holds(d)
        except CrossoverError:
            eq32 = "not-applicable"
    report["eq32"] = eq32
    _emit(report, out)
    ok = (closed is None or match) and eq32 is not False
    return 0 if ok else 1


def build_parser():
    ap = argparse.ArgumentParser(
        prog="crossover-uo",
        description="Exact verification and optimality certificates for balanced crossover designs.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="class membership, connectedness and balance conditions")
    p.add_argument("design")
    p.add_argument("--v", type=int, help="override the treatment count")
    p.add_argument("--class-only", action="store_true",
                   help="only require class D membership, not balance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("info", help="print a frequency or information matrix")
    p.add_argument("design")
    p.add_argument("--v", type=int)
    p.add_argument("--matrix", choices=MATRICES, default="C")
    p.add_argument("--periods", choices=(IGNORED, ADJUSTED), default=ADJUSTED)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("efficiency", help="efficiency lower bounds (CSV)")
    p.add_argument("--pairs", choices=("table1",))
    p.add_argument("--p", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("certify", help="dominance sweep over competing designs")
    p.add_argument("--design", help="balanced design file supplying p, v, t")
    p.add_argument("--p", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--mode", choices=("direct", "residual", "joint-binary", "functional"),
                   default="direct")
    p.add_argument("--competitors", nargs="+", default=["exhaustive"],
                   metavar="exhaustive|sample N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("construct", help="emit a known balanced design")
    p.add_argument("kind", choices=("fixture", "williams"))
    p.add_argument("--v", type=int)
    p.add_argument("--letters", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("average", help="permutation-averaged information, closed form vs brute force")
    p.add_argument("design")
    p.add_argument("--v", type=int)
    p.set_defaults(func=cmd_average)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args, out)
    except (UsageError, CrossoverError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
