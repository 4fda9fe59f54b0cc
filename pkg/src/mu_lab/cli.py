"""Command-line front end.

    mu-lab eval <function> --tau 0+1i [--u ... --v ... --alpha ... --x ...]
    mu-lab verify [--suite NAME | --id IDENT] [--seed S] [--samples N]
                  [--json] [--report PATH] [--tol TOL]
    mu-lab list [--suite NAME] [--json]

Exit codes: 0 success / all pass, 1 verification failures, 2 usage errors,
3 evaluation errors (poles, divergence).
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys

import numpy as np

from . import borel, completion, mu, qcore
from .errors import MuLabError
from .identities import (
    REGISTRY,
    SUITES,
    TOL_CLASSES,
    adjudications,
    run_identity,
    run_suite,
    suite_members,
)

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?P<im>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?[ij])?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' literals ('0.2+0.1i', '1i', '-0.3', '1e-2-2.5e-1i')."""
    s = text.strip().replace(" ", "")
    m = _COMPLEX_RE.match(s)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"cannot parse complex literal {text!r}")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    im_text = m.group("im")
    if im_text is None:
        im_part = 0.0
    else:
        body = im_text[:-1]
        if body in ("", "+"):
            im_part = 1.0
        elif body == "-":
            im_part = -1.0
        else:
            im_part = float(body)
    return complex(re_part, im_part)


def format_complex(z: complex) -> str:
    """15 significant digits, round-trip safe at double precision."""
    return f"{z.real:.15g}{z.imag:+.15g}i"


# registered functions: name -> (argument names, callable(args, ctx))
EVAL_FUNCTIONS = {
    "eta": ((), lambda a, ctx: qcore.dedekind_eta(ctx)),
    "theta": (("u",), lambda a, ctx: qcore.jacobi_theta(a["u"], ctx)),
    "theta_q": (("x",), lambda a, ctx: qcore.theta_q(a["x"], ctx)),
    "qpoch": (("x",), lambda a, ctx: qcore.qpoch_inf(a["x"], ctx)),
    "qpoch_order": (
        ("x", "alpha"),
        lambda a, ctx: qcore.qpoch_order(a["x"], a["alpha"], ctx),
    ),
    "mu": (("u", "v"), lambda a, ctx: mu.mu_zwegers(a["u"], a["v"], ctx)),
    "mu_gen": (
        ("u", "v", "alpha"),
        lambda a, ctx: mu.mu_generalized(a["u"], a["v"], a["alpha"], ctx),
    ),
    "mu_tilde": (
        ("u", "v"),
        lambda a, ctx: completion.mu_completed(a["u"], a["v"], ctx),
    ),
    "muN": (("u*",), lambda a, ctx: mu.muN_eval(a["u*"], ctx)),
    "hat_muN": (
        ("u*", "alpha"),
        lambda a, ctx: mu.hat_muN_eval(a["u*"], a["alpha"], ctx),
    ),
    "muN_tilde": (
        ("u*",),
        lambda a, ctx: completion.muN_completed(a["u*"], ctx),
    ),
    "f1": (
        ("x", "x1", "alpha"),
        lambda a, ctx: mu.f1_eval(a["x"], a["x1"], ctx.q_pow(a["alpha"]), ctx),
    ),
    "MN": (("u*",), lambda a, ctx: mu.MN_vector(a["u*"], ctx)),
    "h": (("u",), lambda a, ctx: completion.mordell_h(a["u"], ctx)),
    "R": (("u",), lambda a, ctx: completion.r_function(a["u"], ctx)),
    "E": (("x",), lambda a, ctx: completion.gauss_E(a["x"].real)),
}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mu-lab",
        description="Evaluate special functions and verify their identities.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate a registered function")
    ev.add_argument("function", help=f"one of: {', '.join(EVAL_FUNCTIONS)}")
    ev.add_argument("--tau", help='modular parameter, e.g. "0.1+1.05i"')
    ev.add_argument("--tau-re", type=float, default=None)
    ev.add_argument("--tau-im", type=float, default=None)
    ev.add_argument("--u", action="append", default=[],
                    help="u argument (repeat for u_0..u_N)")
    ev.add_argument("--v", default=None)
    ev.add_argument("--x", default=None)
    ev.add_argument("--x1", default=None)
    ev.add_argument("--alpha", default=None)
    ev.add_argument("--json", action="store_true")

    vf = sub.add_parser("verify", help="run identity verification")
    vf.add_argument("--suite", default=None, help=f"one of: {', '.join(SUITES)}")
    vf.add_argument("--id", dest="ident", default=None,
                    help="verify a single identity id")
    vf.add_argument("--seed", type=int, default=1)
    vf.add_argument("--samples", type=int, default=20)
    vf.add_argument("--tol", type=float, default=None,
                    help="override every tolerance")
    vf.add_argument("--json", action="store_true")
    vf.add_argument("--report", default=None, help="write JSON report here")

    ls = sub.add_parser("list", help="list registered identities")
    ls.add_argument("--suite", default=None)
    ls.add_argument("--json", action="store_true")
    return ap


def cmd_eval(args) -> int:
    if args.function not in EVAL_FUNCTIONS:
        print(f"unknown function {args.function!r}; "
              f"choose from: {', '.join(EVAL_FUNCTIONS)}", file=sys.stderr)
        return 2
    try:
        if args.tau is not None:
            tau = parse_complex(args.tau)
        elif args.tau_im is not None:
            tau = complex(args.tau_re or 0.0, args.tau_im)
        else:
            print("--tau (or --tau-re/--tau-im) is required", file=sys.stderr)
            return 2
        arg_names, fn = EVAL_FUNCTIONS[args.function]
        got = {}
        for name in arg_names:
            if name == "u*":
                if not args.u:
                    raise ValueError("needs at least one --u")
                got["u*"] = [parse_complex(t) for t in args.u]
            else:
                raw = {"u": args.u[0] if args.u else None,
                       "v": args.v, "x": args.x, "x1": args.x1,
                       "alpha": args.alpha}[name]
                if raw is None:
                    raise ValueError(f"missing --{name}")
                got[name] = parse_complex(raw)
        ctx = qcore.QContext(tau)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        value = fn(got, ctx)
    except MuLabError as exc:
        print(f"evaluation error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    if isinstance(value, np.ndarray):
        out = [format_complex(complex(v)) for v in value]
        print(json.dumps(out) if args.json else "\n".join(out))
    elif isinstance(value, float):
        print(f"{value:.15g}")
    else:
        print(format_complex(complex(value)))
    return 0


def _report_payload(suite, seed, samples, reports) -> dict:
    return {
        "suite": suite,
        "seed": seed,
        "samples": samples,
        "results": [r.to_json() for r in reports],
        "all_pass": all(r.passed for r in reports if r.gating),
        "adjudications": adjudications(reports),
        "defaults": {
            "seed": 1,
            "samples": 20,
            "tolerance_classes": TOL_CLASSES,
        },
    }


def cmd_verify(args) -> int:
    if (args.suite is None) == (args.ident is None):
        print("give exactly one of --suite or --id", file=sys.stderr)
        return 2
    seed, samples = args.seed, args.samples
    if args.ident is not None:
        spec = REGISTRY.get(args.ident)
        if spec is None:
            print(f"unknown identity id {args.ident!r}", file=sys.stderr)
            return 2
        reports = [run_identity(spec, seed, samples, args.tol)]
        label = args.ident
    else:
        if args.suite not in SUITES:
            print(f"unknown suite {args.suite!r}; "
                  f"choose from: {', '.join(SUITES)}", file=sys.stderr)
            return 2
        reports = run_suite(args.suite, seed, samples, args.tol)
        label = args.suite
    payload = _report_payload(label, seed, samples, reports)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(payload, fh, indent=2)
    if args.json:
        json.dump(payload, sys.stdout, indent=2)
        print()
    else:
        for r in reports:
            mark = "PASS" if r.passed else "FAIL"
            kind = "" if r.gating else "  [reading]"
            note = f"  ({r.note})" if r.note else ""
            print(f"{mark}  {r.id:18s} max {r.max_rel_residual:.3e}  "
                  f"tol {r.tol:.0e}  {r.wall_time:6.2f}s{kind}{note}")
        groups = payload["adjudications"]
        if groups:
            print("\nadjudications (ambiguous displays, one passing reading "
                  "expected):")
            for name, g in sorted(groups.items()):
                status = "resolved" if g["resolved"] else "UNRESOLVED"
                print(f"  {name}: {status}; passing = "
                      f"{', '.join(g['passing']) or 'none'}")
        print(f"\nall gating identities pass: {payload['all_pass']}")
    return 0 if payload["all_pass"] else 1


def cmd_list(args) -> int:
    if args.suite is not None:
        if args.suite not in SUITES:
            print(f"unknown suite {args.suite!r}", file=sys.stderr)
            return 2
        members = suite_members(args.suite)
    else:
        members = list(REGISTRY.values())
    members = sorted(members, key=lambda s: (s.suite, s.id))
    if args.json:
        payload = [
            {"id": s.id, "paper_tag": s.tag, "suite": s.suite,
             "tol_class": s.tol_class, "tol": s.tol, "gating": s.gating}
            for s in members
        ]
        json.dump(payload, sys.stdout, indent=2)
        print()
        return 0
    for s in members:
        kind = "" if s.gating else "  [reading]"
        print(f"{s.id:18s} {s.suite:10s} {s.tol_class:10s} "
              f"tol {s.tol:.0e}  {s.tag}{kind}")
    print(f"\n{len(members)} identities")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "eval":
        return cmd_eval(args)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_list(args)


if __name__ == "__main__":
    sys.exit(main())
