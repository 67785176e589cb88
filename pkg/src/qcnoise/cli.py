"""Command-line entry point: ``qcnoise <subcommand> [flags]``.

Exit codes: 0 success (or informational), 1 usage / parse / precondition
error, 2 enumeration cap exceeded, 3 sandwich inequality violated.

Every shared flag can also be set through an environment variable named
``QCNOISE_<FLAG>`` (e.g. ``QCNOISE_SEED``, ``QCNOISE_CAP_N``); an explicit
flag wins.  ``QCNOISE_T`` takes ``;``-separated support lists.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import _jsonio
from .bernoulli import parse_omega
from .bounds import closed_form_report, divergence_report
from .exact import (
    DEFAULT_CAP_N,
    NoiseSpec,
    PreconditionError,
    ResourceError,
    check_ap_preconditions,
    dist_sum,
    lambda_profile,
    pair_table,
    to_bytes,
    to_csv,
)
from .experiments import DEFAULT_SEED, weight_experiment
from .ring import parse_dense, parse_support

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_VIOLATION = 0, 1, 2, 3
ENV_PREFIX = "QCNOISE_"

_DEFAULTS = {
    "format": "json",
    "seed": DEFAULT_SEED,
    "cap_n": DEFAULT_CAP_N,
    "trials": 10_000,
    "threads": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _shared() -> argparse.ArgumentParser:
    sh = argparse.ArgumentParser(add_help=False)
    sh.add_argument("--n", type=int, help="ring length")
    sh.add_argument("--omega", help="bias exponent (decimal or 'inf')")
    sh.add_argument("--t", action="append", metavar="SUPPORT",
                    help="comma-separated support of one t_i (repeat for t_1..t_s)")
    sh.add_argument("--dense", action="store_true", help="read --t values as hex coefficient words")
    sh.add_argument("--s", type=int, help="number of products (inferred from --t)")
    sh.add_argument("--trials", type=int)
    sh.add_argument("--seed", type=int)
    sh.add_argument("--format", choices=["json", "csv"])
    sh.add_argument("--out", help="output file (default: stdout)")
    sh.add_argument("--cap-n", dest="cap_n", type=int, help="largest n for 2^n tables")
    sh.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    return sh


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcnoise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sh = _shared()

    p = sub.add_parser("exact", parents=[sh], help="exact KL / TV against the product model")
    p.add_argument("--table-out", help="also write the exact law of the noise here")
    p.add_argument("--table-format", choices=["csv", "bin"], default="csv")

    p = sub.add_parser("bounds", parents=[sh], help="closed-form divergence and envelopes at any n")
    p.add_argument("--tau", type=int, help="total weight (when no --t is given)")
    p.add_argument("--ap", action="store_true", help="also report the arithmetic-progression lower bound")
    p.add_argument("--a", type=int, default=1, help="common difference for --ap")

    sub.add_parser("lambda", parents=[sh], help="support self-overlap profile")

    p = sub.add_parser("pair", parents=[sh], help="closed-form joint law of (C_i, C_j)")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)

    sub.add_parser("weights", parents=[sh], help="Monte-Carlo weight statistics")
    sub.add_parser("sandwich", parents=[sh], help="check reverse Pinsker <= TV <= Pinsker exactly")
    return parser


def _apply_env(args: argparse.Namespace) -> None:
    for key in ("n", "omega", "s", "trials", "seed", "format", "out", "cap_n", "threads"):
        if getattr(args, key, None) is None:
            env = os.environ.get(ENV_PREFIX + key.upper())
            if env is not None:
                setattr(args, key, env)
            elif key in _DEFAULTS:
                setattr(args, key, _DEFAULTS[key])
    if not args.t and os.environ.get(ENV_PREFIX + "T"):
        args.t = os.environ[ENV_PREFIX + "T"].split(";")
    for key in ("n", "s", "trials", "seed", "cap_n", "threads"):
        val = getattr(args, key, None)
        if isinstance(val, str):
            try:
                setattr(args, key, int(val))
            except ValueError:
                raise UsageError(f"{ENV_PREFIX}{key.upper()} must be an integer, got {val!r}")
    if args.format not in ("json", "csv"):
        raise UsageError(f"unknown format {args.format!r}")


def _need(args, *keys):
    for key in keys:
        if getattr(args, key, None) is None:
            raise UsageError(f"--{key.replace('_', '-')} is required")


def _omega(args) -> float:
    _need(args, "omega")
    try:
        return parse_omega(str(args.omega))
    except ValueError as exc:
        raise UsageError(f"bad --omega: {exc}")


def _spec(args) -> NoiseSpec:
    _need(args, "n", "t")
    if args.n < 1:
        raise UsageError("--n must be positive")
    parse = parse_dense if args.dense else parse_support
    try:
        ts = tuple(parse(text, args.n) for text in args.t)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.s is not None and args.s != len(ts):
        raise UsageError(f"--s {args.s} disagrees with {len(ts)} --t values")
    return NoiseSpec(args.n, ts, _omega(args))


def _csv_fields(d: dict, prefix: str = "") -> list[str]:
    rows = []
    for key, val in d.items():
        if isinstance(val, dict):
            rows.extend(_csv_fields(val, f"{prefix}{key}."))
        else:
            if isinstance(val, bool):
                val = "true" if val else "false"
            elif isinstance(val, float):
                val = "inf" if math.isinf(val) else format(val, ".17g")
            elif val is None:
                val = ""
            rows.append(f"{prefix}{key},{val}")
    return rows


def _render(args, payload: dict) -> str:
    if args.format == "csv":
        return "field,value\n" + "\n".join(_csv_fields(payload)) + "\n"
    return _jsonio.dumps(payload) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------

def cmd_exact(args) -> int:
    spec = _spec(args)
    report = divergence_report(spec, exact=True, cap_n=args.cap_n)
    if args.table_out:
        table = dist_sum(spec, cap_n=args.cap_n)
        if args.table_format == "bin":
            with open(args.table_out, "wb") as fh:
                fh.write(to_bytes(table))
        else:
            with open(args.table_out, "w", newline="") as fh:
                fh.write(to_csv(table))
    _emit(args, _render(args, report.to_dict()))
    return EXIT_OK


def cmd_bounds(args) -> int:
    _need(args, "n")
    omega = _omega(args)
    spanning = None
    if args.t:
        spec = _spec(args)
        if args.tau is not None and args.tau != spec.tau:
            raise UsageError(f"--tau {args.tau} disagrees with the total weight {spec.tau} of --t")
        tau, s, spanning = spec.tau, spec.s, spec.spanning()
        if args.ap:
            try:
                check_ap_preconditions(spec, args.a)
            except PreconditionError as exc:
                raise UsageError(f"--ap: {exc}")
    else:
        _need(args, "tau")
        tau, s = args.tau, args.s or 1
        if args.ap:
            if args.n % 2 == 0:
                raise UsageError("--ap needs odd n")
            if math.gcd(args.a, args.n) != 1:
                raise UsageError(f"--ap: a = {args.a} is not coprime to n = {args.n}")
            if tau < s:
                raise UsageError(f"--ap: tau = {tau} is smaller than s = {s}")
    if tau < 1:
        raise UsageError("--tau must be >= 1")
    report = closed_form_report(args.n, tau, omega, s=s, spanning=spanning, ap=args.ap)
    _emit(args, _render(args, report.to_dict()))
    return EXIT_OK


def cmd_lambda(args) -> int:
    spec = _spec(args) if args.omega is not None else _spec_no_omega(args)
    prof = lambda_profile(spec)
    if args.format == "csv":
        text = "d,lambda\n" + "".join(f"{d},{v}\n" for d, v in enumerate(prof.values))
    else:
        text = _jsonio.dumps({"n": prof.n, "tau": spec.tau, "lambda": list(prof.values)}) + "\n"
    _emit(args, text)
    return EXIT_OK


def _spec_no_omega(args) -> NoiseSpec:
    args.omega = "0"
    return _spec(args)


def cmd_pair(args) -> int:
    spec = _spec(args)
    if args.i % spec.n == args.j % spec.n:
        raise UsageError("--i and --j must differ mod n")
    table = pair_table(spec, args.i, args.j)
    rows, cols = table.marginals()
    residual = None
    if spec.n <= args.cap_n:
        exact = dist_sum(spec, cap_n=args.cap_n).pair_marginal(table.i, table.j)
        residual = float(np.abs(exact - table.probs).max())
    payload = {
        "n": spec.n, "s": spec.s, "tau": spec.tau, "omega": spec.omega,
        "i": table.i, "j": table.j, "lambda": table.lam,
        "table": [[float(v) for v in row] for row in table.probs],
        "marginal_i": [float(v) for v in rows],
        "marginal_j": [float(v) for v in cols],
        "residual": residual,
    }
    if args.format == "csv":
        text = "ci,cj,probability\n" + "".join(
            f"{a},{b},{format(float(table.probs[a, b]), '.17g')}\n" for a in (0, 1) for b in (0, 1)
        )
        if residual is not None:
            text += f"# residual={format(residual, '.17g')}\n"
        _emit(args, text)
    else:
        _emit(args, _jsonio.dumps(payload) + "\n")
    return EXIT_OK


def cmd_weights(args) -> int:
    spec = _spec(args)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    stats = weight_experiment(spec, args.trials, args.seed, threads=args.threads)
    _emit(args, stats.to_csv() if args.format == "csv" else stats.to_json() + "\n")
    return EXIT_OK


def cmd_sandwich(args) -> int:
    spec = _spec(args)
    report = divergence_report(spec, exact=True, cap_n=args.cap_n)
    checked = report.preconditions_met
    passed = report.sandwich_holds() if checked else None
    payload = report.to_dict()
    payload["checked"] = checked
    payload["pass"] = passed
    _emit(args, _render(args, payload))
    if checked and not passed:
        return EXIT_VIOLATION
    return EXIT_OK


COMMANDS = {
    "exact": cmd_exact,
    "bounds": cmd_bounds,
    "lambda": cmd_lambda,
    "pair": cmd_pair,
    "weights": cmd_weights,
    "sandwich": cmd_sandwich,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_env(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qcnoise {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"qcnoise {args.command}: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
