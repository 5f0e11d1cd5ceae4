"""Command-line interface.

Exit codes: 0 success, 1 a verification suite missed its tolerance, 2 bad
arguments or configuration.
"""
from __future__ import annotations

import argparse
import inspect
import json
import math
import sys
from itertools import combinations

from . import config as cfgmod
from .dpp import correlation, reduce, sample_many
from .equivalence import jacobi_asymptotic_ratio, jacobi_hs_uniformity, verdict
from .errors import QuasifreeError
from .kernels import KernelFunction, charlier_sine_error
from .policy import DEFAULT_POLICY
from .reporting import csv_text, json_text, write_text
from . import suites

CLOSED_FORMS = ("sine", "discrete_hermite", "discrete_laguerre", "discrete_jacobi_symmetric")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _tol(text):
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"--tol expects key=value, got {text!r}")
    try:
        return key.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--tol value for {key!r} is not a number")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_tol, action="append", default=[], metavar="KEY=VALUE",
                        help="override one tolerance from the central policy")
    common.add_argument("--out", help="write the result here instead of stdout")

    p = _Parser(prog="quasifree", description="Determinantal measures and quasifree states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", parents=[common], help="materialize a kernel as CSV")
    k.add_argument("--kernel", required=True, help="JSON experiment config")

    c = sub.add_parser("correlations", parents=[common], help="correlation functions")
    c.add_argument("--kernel", help="JSON experiment config (default: sine kernel, phi=pi/2)")
    c.add_argument("--points", type=_ints, required=True)

    s = sub.add_parser("sample", parents=[common], help="sample a projection DPP")
    s.add_argument("--kernel", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int)

    r = sub.add_parser("reduce", parents=[common], help="(X, X')-reduction of a kernel")
    r.add_argument("--kernel", required=True)
    r.add_argument("--occupied", type=_ints, default=[])
    r.add_argument("--vacant", type=_ints, default=[])
    r.add_argument("--order", type=_ints)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=sorted(suites.SUITES))
    v.add_argument("--max-sites", type=int)
    v.add_argument("--max-n", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--instances", type=int)

    e = sub.add_parser("equivalence", parents=[common], help="equivalence or disjointness verdict")
    e.add_argument("--k1", required=True)
    e.add_argument("--k2", required=True)
    e.add_argument("--cutoffs", type=_ints, default=[256, 1024, 4096])

    lim = sub.add_parser("limits", help="limit-kernel studies")
    lsub = lim.add_subparsers(dest="study", required=True, parser_class=_Parser)
    cs = lsub.add_parser("charlier-to-sine", parents=[common])
    cs.add_argument("--phi", type=float, default=math.pi / 2)
    cs.add_argument("--N", type=_ints, default=[100, 200, 400, 800])
    cs.add_argument("--half-width", type=int, default=5)
    jr = lsub.add_parser("jacobi-ratio", parents=[common])
    jr.add_argument("--n", type=_ints, default=[100])
    jr.add_argument("--m", type=_ints, default=[100])
    jr.add_argument("--a", type=_floats, default=[0.0])
    ju = lsub.add_parser("jacobi-uniformity", parents=[common])
    ju.add_argument("--a", type=_floats, default=[0.0, 0.5, 1.0])
    ju.add_argument("--cutoff", type=int, default=256)
    ju.add_argument("--delta", type=float, default=0.01)
    return p


def _policy(args, cfg=None):
    pol = cfgmod.policy_of(cfg) if cfg else DEFAULT_POLICY
    tol = dict(args.tol)
    if "full_measure_max_sites" in tol:
        tol["full_measure_max_sites"] = int(tol["full_measure_max_sites"])
    try:
        return pol.override(**tol)
    except KeyError as exc:
        raise cfgmod.ConfigError(str(exc.args[0])) from None


def _emit(args, text):
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _kernel_for_equivalence(cfg, policy):
    if cfg["kernel"]["family"] in CLOSED_FORMS:
        return cfgmod.kernel_function(cfg, policy)
    return cfgmod.kernel_matrix(cfg, policy)


def cmd_kernel(args):
    cfg = cfgmod.load(args.kernel)
    pol = _policy(args, cfg)
    K = cfgmod.kernel_matrix(cfg, pol)
    _emit(args, K.to_csv(cfgmod.hash_of(cfg)))
    return 0


def cmd_correlations(args):
    cfg = cfgmod.load(args.kernel) if args.kernel else cfgmod.default_config()
    pol = _policy(args, cfg)
    K = cfgmod.kernel_matrix(cfg, pol)
    pts = args.points
    if len(set(pts)) != len(pts):
        raise cfgmod.ConfigError("--points must be distinct")
    rows = []
    for n in range(1, len(pts) + 1):
        for S in combinations(pts, n):
            rows.append((";".join(str(x) for x in S), n, correlation(K, S)))
    _emit(args, csv_text(("points", "n", "rho"), rows, cfgmod.hash_of(cfg), pol))
    return 0


def cmd_sample(args):
    cfg = cfgmod.load(args.kernel)
    pol = _policy(args, cfg)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if args.n < 0:
        raise cfgmod.ConfigError("--n must be non-negative")
    K = cfgmod.kernel_matrix(cfg, pol)
    masks = sample_many(K, args.n, seed)
    rows = [(i, int(m), ";".join(str(x) for x in K.window.sites_of(int(m))))
            for i, m in enumerate(masks)]
    _emit(args, csv_text(("index", "mask", "sites"), rows, cfgmod.hash_of(cfg), pol,
                         {"seed": seed}))
    return 0


def cmd_reduce(args):
    cfg = cfgmod.load(args.kernel)
    pol = _policy(args, cfg)
    K = cfgmod.kernel_matrix(cfg, pol)
    R, trace = reduce(K, args.occupied, args.vacant, order=args.order, policy=pol)
    extra = {"trace": json.dumps(trace.as_list(), sort_keys=True)}
    _emit(args, R.to_csv(cfgmod.hash_of(cfg), extra))
    return 0


def cmd_verify(args):
    pol = _policy(args)
    name = args.suite
    kw = {}
    opts = {"max_sites": args.max_sites, "max_n": args.max_n, "seed": args.seed,
            "instances": args.instances}
    accepted = inspect.signature(suites.SUITES[name]).parameters
    for key, val in opts.items():
        if val is None:
            continue
        if key not in accepted:
            raise cfgmod.ConfigError(f"suite {name!r} does not take --{key.replace('_', '-')}")
        kw[key] = val
    rep = suites.SUITES[name](**kw)
    rep["policy"] = pol.as_dict()
    rep["options"] = kw
    _emit(args, json_text(rep))
    return 0 if rep["passed"] else 1


def cmd_equivalence(args):
    c1, c2 = cfgmod.load(args.k1), cfgmod.load(args.k2)
    pol = _policy(args, c1)
    K1 = _kernel_for_equivalence(c1, pol)
    K2 = _kernel_for_equivalence(c2, pol)
    if isinstance(K1, KernelFunction) != isinstance(K2, KernelFunction):
        raise cfgmod.ConfigError("compare two lattice kernels or two finite kernels, not a mix")
    cutoffs = sorted(set(args.cutoffs))
    v = verdict(K1, K2, cutoffs, pol)
    out = v.to_json()
    out["config_sha256"] = [cfgmod.hash_of(c1), cfgmod.hash_of(c2)]
    _emit(args, json_text(out))
    return 0


def cmd_limits(args):
    pol = _policy(args)
    chash = cfgmod.hash_of({k: v for k, v in vars(args).items() if k not in ("out", "tol")})
    if args.study == "charlier-to-sine":
        rows = []
        prev = None
        for N in args.N:
            err = charlier_sine_error(N, args.phi, args.half_width)
            dec = "" if prev is None else int(err <= prev * 1.1)
            rows.append((N, err, dec))
            prev = err
        _emit(args, csv_text(("N", "max_entry_error", "decreasing_within_10pct"), rows,
                             chash, pol, {"phi": format(args.phi, ".17g"),
                                          "block": f"{2 * args.half_width + 1}x{2 * args.half_width + 1}"}))
        return 0
    if args.study == "jacobi-ratio":
        rows = []
        for a in args.a:
            for n in args.n:
                for m in args.m:
                    r = jacobi_asymptotic_ratio(n, m, a)
                    rows.append((n, m, a, r["lhs"], r["corrected"], r["literal"]))
        _emit(args, csv_text(("n", "m", "a", "lhs", "ratio_corrected", "ratio_literal"), rows,
                             chash, pol))
        return 0
    rep = jacobi_hs_uniformity(args.a, args.cutoff, args.delta)
    rep["policy"] = pol.as_dict()
    _emit(args, json_text(rep))
    return 0


COMMANDS = {
    "kernel": cmd_kernel,
    "correlations": cmd_correlations,
    "sample": cmd_sample,
    "reduce": cmd_reduce,
    "verify": cmd_verify,
    "equivalence": cmd_equivalence,
    "limits": cmd_limits,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"quasifree: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (QuasifreeError, OSError) as exc:
        print(f"quasifree: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
