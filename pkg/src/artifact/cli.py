"""Command-line entry point.  Exit codes: 0 pass, 1 fail, 2 usage error."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj, path, quiet):
    text = json.dumps(obj, indent=1, sort_keys=True)
    if path:
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            Path(path).write_text(text + "\n")
        except OSError as e:
            raise OSError(f"cannot write JSON report to {path}: {e}") from e
    elif not quiet:
        print(text)


def _say(args, msg):
    if not args.quiet:
        print(msg)


def _frac(s):
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


# ------------------------------------------------------------ object specs

def parse_rspec(spec: str):
    """so:<d>:ss[:<chirality>][:checked] | so:<n>:vv | sp:<n>:vv | sl:<k>"""
    from .clifford import build_gammas
    from .equivalence import sl_R
    from .rmatrix import fundamental_R, spinor_part

    parts = spec.split(":")
    try:
        if parts[0] == "sl":
            return sl_R(int(parts[1]))
        sym, n, pair = parts[0], int(parts[1]), parts[2]
    except (IndexError, ValueError):
        raise UsageError(f"bad R spec {spec!r}")
    if pair == "vv":
        if sym not in ("so", "sp"):
            raise UsageError(f"unknown symmetry {sym!r}")
        return fundamental_R(1 if sym == "so" else -1, n).matrix
    if pair == "ss" and sym == "so":
        chir = parts[3] if len(parts) > 3 else "full"
        checked = len(parts) > 4 and parts[4] == "checked"
        return spinor_part(build_gammas(n), chir, checked).matrix
    raise UsageError(f"bad R spec {spec!r}")


# ------------------------------------------------------------ subcommands

def cmd_gamma(args):
    from .clifford import build_gammas, clifford_violations, gammas_to_json

    rep = build_gammas(args.d)
    bad = clifford_violations(rep)
    out = gammas_to_json(rep)
    out["clifford_relations"] = "pass" if not bad else "fail"
    _dump(out, args.json, args.quiet or not args.json and not args.print)
    _say(args, f"so({args.d}) gammas: {len(rep.gammas)} of size {rep.n}, Clifford relations "
               f"{'hold' if not bad else 'FAIL'}")
    return EXIT_PASS if not bad else EXIT_FAIL


def cmd_invariants(args):
    from .clifford import build_gammas
    from .exact_core import qmat_to_json
    from . import invariants as inv

    rep = build_gammas(args.d)
    sp = inv.spinor_pair_space(rep)
    out = {"d": args.d, "emit": args.emit}
    if args.emit == "z":
        out["z"] = qmat_to_json(sp.z)
        out["roots"] = [str(r) for r in sp.roots]
        out["characteristic_poly"] = inv.characteristic_poly(args.d).to_json()
        ok = inv.poly_at_matrix(inv.full_tower_poly(args.d), sp.z).is_zero()
    elif args.emit == "projectors":
        out["projectors"] = {str(r): qmat_to_json(p) for r, p in sp.projectors.items()}
        out["multiplicities"] = {str(r): k for r, k in inv.multiplicities(rep).items()}
        ok = sum(out["multiplicities"].values()) == sp.dim
    elif args.emit == "permutation":
        P = inv.permutation_operator(rep, "spectral")
        out["permutation"] = qmat_to_json(P)
        out["signs"] = {str(r): inv.permutation_sign(r, args.d) for r in sp.roots}
        ok = P == inv.permutation_operator(rep, "gamma_sum")
    else:
        tw = inv.invariant_tower(rep)
        out["tower"] = [p.to_json() for p in inv.tower_polys(args.d)]
        ok = tw.agrees
        out["recurrence_matches_contraction"] = ok
    _dump(out, args.json, args.quiet or not args.json and not args.print)
    _say(args, f"invariants d={args.d} {args.emit}: {'ok' if ok else 'FAIL'}")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_rmatrix(args):
    from .clifford import build_gammas
    from .rmatrix import fundamental_R, spinor_part

    if args.pair == "vv":
        R = fundamental_R(1 if args.symmetry == "so" else -1, args.d)
    else:
        if args.symmetry != "so":
            raise UsageError("spinor-spinor R is built for so(d)")
        R = spinor_part(build_gammas(args.d), args.chirality, args.checked)
    _dump(R.to_json(), args.json, args.quiet or not args.json and not args.print)
    _say(args, f"{R.label()}: degree {R.degree}, {len(R.matrix.support())} nonzero entries")
    return EXIT_PASS


def _rep_and_L(d):
    from .clifford import L_operator, build_gammas
    rep = build_gammas(d)
    return rep, L_operator(rep)


def cmd_verify(args):
    from .rmatrix import fundamental_R, spinor_part
    from . import verifier as vf

    rep, L = _rep_and_L(args.d)
    beta = args.beta if args.beta is not None else vf.solve_inversion_beta(L, args.d, rep.n)
    if args.identity == "rrr":
        if args.pair == "vv":
            R = fundamental_R(-1 if args.symplectic else 1, args.d)
        else:
            R = spinor_part(rep, args.chirality, False)
        r = vf.check_rrr(R, grid_scale=args.grid_scale)
    elif args.identity == "rll":
        if args.layout == "vector_aux":
            R = fundamental_R(1, args.d)
        else:
            R = spinor_part(rep, args.chirality, args.layout == "spinor_aux_check")
        r = vf.check_rll(R, L, args.layout, args.d, rep.n, args.grid_scale)
    elif args.identity == "inversion":
        if beta is None:
            raise UsageError("no beta solves the inversion relation; pass --beta")
        r = vf.check_inversion(L, beta, args.d, rep.n)
    elif args.identity == "llr":
        r = vf.check_llr_fusion(rep, beta, args.grid_scale)
    else:
        if args.N > 3:
            raise UsageError("--N must be <= 3")
        r = vf.check_monodromy_fusion(rep, args.N, beta, args.grid_scale)
    _dump(r.to_json(), args.json, True)
    _say(args, f"{r.identity_name} d={args.d}: {r.status.upper()}"
               + (f" at {r.first_violation}" if r.first_violation else ""))
    return EXIT_PASS if r.passed else EXIT_FAIL


def cmd_equiv(args):
    from . import equivalence as eq
    from .clifford import build_gammas
    from .rmatrix import spinor_part

    if args.mode == "intertwine":
        if not (args.left and args.right):
            raise UsageError("equiv intertwine needs --left and --right")
        A, B = parse_rspec(args.left), parse_rspec(args.right)
        al, g0 = args.reparam
        space = eq.intertwiner_space(A, B, (al, g0))
        n = eq._factor_dim(A)
        factorizable = []
        for k, G in enumerate(space):
            g = eq.kron_factorize(G, n)
            if g is not None:
                factorizable.append(k)
        from .exact_core import QMat
        has_id = eq.in_span(QMat.identity(A.rows), space)
        out = {"left": args.left, "right": args.right, "reparam": [str(al), str(g0)], "lambda": "1",
               "dimension": len(space), "contains_identity": has_id,
               "factorizable_basis_elements": factorizable}
        ok = bool(space)
        msg = f"intertwiner space dimension {len(space)}, identity {'in' if has_id else 'not in'} span"
    elif args.mode == "blocks":
        rep = build_gammas(args.d)
        R = spinor_part(rep, args.chirality, False)
        V = {4: eq.V_so4, 6: eq.V_so6}.get(args.d)
        bd = eq.block_decompose(R, V() if V and not args.no_v else None)
        blocks = [eq.identify_sl_block(idx, M) for idx, M in bd.blocks] if bd.level == "site" else []
        out = {"d": args.d, "chirality": args.chirality, "decomposition": bd.to_json(),
               "sl_blocks": [b.to_json() for b in blocks]}
        ok = True
        msg = f"{len(bd.blocks)} blocks ({bd.level} level), sizes {bd.sizes()}"
    elif args.mode == "rtt-pattern":
        if args.d > 6:
            raise UsageError("rtt-pattern supports d <= 6")
        R = spinor_part(build_gammas(args.d), args.chirality, False)
        pat = eq.rtt_pattern(R)
        out = {"d": args.d, "chirality": args.chirality, "pattern": pat.to_json()}
        ok = True
        msg = f"{len(pat.allowed)} entries of T allowed, {len(pat.zeros)} forced to zero"
    elif args.mode == "table":
        name = args.table
        if name not in eq.table_names():
            raise UsageError(f"unknown table {name!r}; choose from {eq.table_names()}")
        t = eq.load_table(name)
        R = spinor_part(build_gammas(t["d"]), t["chirality"], False)
        m = eq.table_basis_match(R, t)
        out = {"table": name, "match": m.to_json()}
        ok = m.found
        msg = f"table {name}: {'match' if ok else 'no match'} {m.reason}"
    else:
        reps = [eq.proposition_so4(), eq.proposition_so6(), eq.proposition_so5(), eq.sp2_so3_coincidence()]
        out = {"propositions": [r.to_json() for r in reps]}
        ok = all(reps)
        msg = ", ".join(f"{r.name} {r.status}" for r in reps)
    _dump(out, args.json, args.quiet or not args.json and not args.print)
    _say(args, msg)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_chain(args):
    from . import chain as ch

    if args.aux == "vector":
        m = ch.vector_monodromy(args.d, args.N)
    else:
        kind = "R_chain" if args.kind == "R" else "L_chain"
        m = ch.spinor_monodromy(args.d, args.N, kind, args.chirality)
    out = {"d": args.d, "N": args.N, "aux": m.aux, "kind": m.kind}
    ok = True
    if args.action == "monodromy":
        out["matrix"] = m.matrix.to_json()
        out["aux_pattern"] = sorted(map(list, ch.aux_pattern(m)))
        msg = f"monodromy {m.aux}/{m.kind}: size {m.matrix.rows}, degree {m.matrix.degree()}"
    elif args.action == "transfer":
        t = ch.transfer(m)
        out["transfer"] = t.t.to_json()
        msg = f"transfer matrix size {t.t.rows}, degree {t.t.degree()}"
    elif args.action == "commute":
        r = ch.check_commuting_family(ch.transfer(m), grid_scale=args.grid_scale)
        out["report"] = r.to_json()
        ok = r.passed
        msg = f"[t(u), t(v)] = 0: {r.status.upper()}"
    else:
        if args.d != 4:
            raise UsageError("fusion trace identity is for d = 4")
        if args.N > 2:
            raise UsageError("--N must be <= 2 for the fusion trace")
        r = ch.fusion_trace_identity(4, args.N, args.shift)
        out["report"] = r.to_json()
        ok = r.passed
        msg = f"trace fusion N={args.N} shift={args.shift}: {r.status.upper()}"
    _dump(out, args.json, args.quiet or not args.json and not args.print)
    _say(args, msg)
    return EXIT_PASS if ok else EXIT_FAIL


def run_suite(numbers=None, include_so8_rrr=False, grid_scale=1, output_dir=None, tables=None, quiet=False):
    """Run the acceptance criteria; write per-criterion JSON and a summary table."""
    from . import suite

    if grid_scale < 1:
        raise UsageError("grid scale must be >= 1")
    results = suite.run(numbers, include_so8_rrr, grid_scale, tables)
    lines = []
    for c in results:
        flag = "PASS" if c.passed else "FAIL"
        tail = "" if c.passed else "  failing: " + "; ".join(c.failing())
        lines.append(f"[{flag}] {c.number:2d}. {c.title} ({len(c.checks)} checks){tail}")
    summary = "\n".join(lines)
    if output_dir:
        out = Path(output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            for c in results:
                (out / f"criterion_{c.number:02d}.json").write_text(
                    json.dumps(c.to_json(), indent=1, sort_keys=True) + "\n")
            (out / "summary.txt").write_text(summary + "\n")
        except OSError as e:
            raise OSError(f"cannot write suite output to {out}: {e}") from e
    if not quiet:
        print(summary)
    return results


def cmd_suite(args):
    tables = None
    if args.tables:
        try:
            tables = json.loads(Path(args.tables).read_text())["tables"]
        except (OSError, KeyError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read table fixture {args.tables}: {e}")
    numbers = None
    if args.criteria:
        try:
            numbers = sorted({int(x) for x in args.criteria.split(",")})
        except ValueError:
            raise UsageError("--criteria takes a comma-separated list of numbers")
        if any(k < 1 or k > 11 for k in numbers):
            raise UsageError("criteria are numbered 1..11")
    results = run_suite(numbers, args.so8_rrr, args.grid_scale, args.output_dir, tables, args.quiet)
    if args.json:
        _dump({"criteria": [c.to_json() for c in results],
               "passed": all(c.passed for c in results)}, args.json, True)
    return EXIT_PASS if all(c.passed for c in results) else EXIT_FAIL


# ------------------------------------------------------------ parser

def _pair(s):
    try:
        a, b = s.split(",")
        return Fraction(a), Fraction(b)
    except ValueError:
        raise argparse.ArgumentTypeError("--reparam takes alpha,gamma")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", default=argparse.SUPPRESS, help="write a JSON report")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="artifact", description="Exact spinorial R-matrix toolkit.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gamma", parents=[common], help="gamma matrices and chirality")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--print", action="store_true", help="print JSON to stdout")
    g.set_defaults(func=cmd_gamma)

    iv = sub.add_parser("invariants", parents=[common], help="z, projectors, permutation, invariant tower")
    iv.add_argument("--d", type=int, required=True)
    iv.add_argument("--emit", choices=["z", "projectors", "permutation", "tower"], default="z")
    iv.add_argument("--print", action="store_true")
    iv.set_defaults(func=cmd_invariants)

    r = sub.add_parser("rmatrix", parents=[common], help="build an R-matrix")
    r.add_argument("--symmetry", choices=["so", "sp"], default="so")
    r.add_argument("--d", type=int, required=True)
    r.add_argument("--pair", choices=["vv", "ss"], default="ss")
    r.add_argument("--chirality", choices=["plus", "minus", "full"], default="full")
    r.add_argument("--checked", action="store_true")
    r.add_argument("--print", action="store_true")
    r.set_defaults(func=cmd_rmatrix)

    v = sub.add_parser("verify", parents=[common], help="exact identity checks")
    v.add_argument("identity", choices=["rrr", "rll", "inversion", "llr", "fusion"])
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--chirality", choices=["plus", "minus", "full"], default="full")
    v.add_argument("--pair", choices=["vv", "ss"], default="ss")
    v.add_argument("--symplectic", action="store_true", help="fundamental sp(d) for rrr --pair vv")
    v.add_argument("--layout", choices=["vector_aux", "spinor_aux", "spinor_aux_check"],
                   default="spinor_aux_check")
    v.add_argument("--N", type=int, default=1)
    v.add_argument("--beta", type=_frac, default=None)
    v.add_argument("--grid-scale", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("equiv", parents=[common], help="intertwiners, blocks, RTT patterns, tables")
    e.add_argument("mode", nargs="?", default="intertwine",
                   choices=["intertwine", "blocks", "rtt-pattern", "table", "props"])
    e.add_argument("--left")
    e.add_argument("--right")
    e.add_argument("--reparam", type=_pair, default=(Fraction(1), Fraction(0)))
    e.add_argument("--d", type=int, default=4)
    e.add_argument("--chirality", choices=["plus", "minus", "full"], default="minus")
    e.add_argument("--no-v", action="store_true", help="skip the stored similarity matrix")
    e.add_argument("--table", default="so4_minus")
    e.add_argument("--print", action="store_true")
    e.set_defaults(func=cmd_equiv)

    c = sub.add_parser("chain", parents=[common], help="monodromy and transfer matrices")
    c.add_argument("action", choices=["monodromy", "transfer", "commute", "fusion"])
    c.add_argument("--d", type=int, default=4)
    c.add_argument("--N", type=int, default=1)
    c.add_argument("--aux", choices=["vector", "spinor"], default="vector")
    c.add_argument("--kind", choices=["L", "R"], default="L", help="spinor auxiliary: L or R factors")
    c.add_argument("--chirality", choices=["plus", "minus", "full"], default="minus")
    c.add_argument("--shift", type=_frac, default=Fraction(3, 2))
    c.add_argument("--grid-scale", type=int, default=1)
    c.add_argument("--print", action="store_true")
    c.set_defaults(func=cmd_chain)

    s = sub.add_parser("suite", parents=[common], help="run the acceptance suite")
    s.add_argument("--criteria", help="comma-separated subset, e.g. 1,7,8")
    s.add_argument("--so8-rrr", action="store_true", help="include the slow so(8) RRR checks")
    s.add_argument("--grid-scale", type=int, default=1)
    s.add_argument("--output-dir")
    s.add_argument("--tables", help="alternative table fixture (JSON)")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.json = getattr(args, "json", None)
    args.quiet = getattr(args, "quiet", False)
    if not hasattr(args, "print"):
        args.print = False
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:  # resource guards and invalid parameters
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
