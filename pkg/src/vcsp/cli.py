"""Command-line entry point: ``vcsp solve|blp|lp|reduce|classify``.

Exit status: 0 on success, 1 on malformed input or failed validation, 2 when
an exhaustive step would exceed its size limit, 64 on usage errors.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import formats
from .blp import blp_optimum, build_blp
from .classify import SEARCH_BUDGET, empirical_dichotomy
from .core import DEFAULT_LIMIT, brute_optimum, gamma_c
from .errors import FormatError, SizeLimitError, ValidationError, VcspError
from .exactlp import Status, check_certificate, simplex_solve
from .reductions import (
    ScaleMap,
    apply_scale_map,
    expand_expressible,
    lift_gammac,
    maxcut_to_vcsp,
    nae3_to_maxcut,
    nae4_to_nae3,
    restrict_to_core_instance,
    sat3_to_nae4,
)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_LIMIT = 2
EXIT_USAGE = 64

STEPS = ("3sat-4nae", "4nae-3nae", "3nae-maxcut", "maxcut-vcsp", "express", "scale", "core", "gammac")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _read(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read: {exc.strerror}", None, path) from None


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _instance(path):
    return formats.parse_instance(_read(path), file=path, base_dir=os.path.dirname(path) or ".")


def _language(path):
    return formats.parse_language(_read(path), file=path)


def _need(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise _UsageError(f"--step {args.step} needs --{name}")


def _labels(text):
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise _UsageError("--xor-labels expects two labels like 0,1") from None
    return a, b


# ----------------------------------------------------------------------------
# subcommands


def cmd_solve(args):
    inst = _instance(args.file)
    out = []
    relaxed = brute = None
    if args.method in ("blp", "both"):
        relaxed = blp_optimum(inst)
        out.append(f"optimum/blp {relaxed}")
    if args.method in ("brute", "both"):
        brute, h = brute_optimum(inst, args.limit)
        out.append(f"optimum/brute {brute}")
        if args.assignment:
            out.append("assignment/brute " + " ".join(map(str, h)))
    if args.decide:
        if inst.threshold is None:
            raise ValidationError("--decide needs an instance with a threshold")
        value = brute if brute is not None else relaxed
        out.append(f"decision {'yes' if value <= inst.threshold else 'no'}")
    print("\n".join(out))


def cmd_blp(args):
    lp, _ = build_blp(_instance(args.file))
    sys.stdout.write(formats.serialize_lp(lp))


def cmd_lp(args):
    lp = formats.parse_lp(_read(args.file), file=args.file)
    outcome = simplex_solve(lp)
    out = [f"status {outcome.status.value}"]
    if outcome.status is Status.OPTIMAL:
        out.append(f"value {outcome.value}")
        out += [f"x {c} {outcome.point[c]}" for c in lp.columns]
    if args.certificate:
        out += [f"y {k} {v}" for k, v in (outcome.duals or {}).items()]
        out += [f"ray {k} {v}" for k, v in (outcome.ray or {}).items()]
        out.append(f"certificate {'ok' if check_certificate(lp, outcome) else 'FAILED'}")
    print("\n".join(out))


def cmd_reduce(args):
    step = args.step
    text = _read(args.input)
    if step == "3sat-4nae":
        cnf = formats.parse_dimacs_cnf(text, pad=args.pad, file=args.input)
        result = formats.serialize_nae(sat3_to_nae4(cnf))
    elif step == "4nae-3nae":
        result = formats.serialize_nae(nae4_to_nae3(formats.parse_nae(text, args.input)))
    elif step == "3nae-maxcut":
        result = formats.serialize_maxcut(nae3_to_maxcut(formats.parse_nae(text, args.input)))
    elif step == "maxcut-vcsp":
        _need(args, "language", "xor-fn", "xor-labels")
        cut = formats.parse_maxcut(text, args.input)
        inst = maxcut_to_vcsp(cut, _language(args.language), args.xor_fn, _labels(args.xor_labels))
        result = formats.serialize_instance(inst)
    else:
        inst = _instance(args.input)
        if step == "express":
            _need(args, "language", "gadgets")
            target = _language(args.language)
            gadgets = formats.parse_gadgets(_read(args.gadgets), target, file=args.gadgets)
            out = expand_expressible(inst, gadgets, target, args.limit)
        elif step == "scale":
            _need(args, "language", "scale-map")
            entries = formats.parse_scale_entries(_read(args.scale_map), file=args.scale_map)
            out = apply_scale_map(inst, ScaleMap(inst.language, _language(args.language), entries))
        elif step == "core":
            _need(args, "language")
            sub = None
            if args.subdomain is not None:
                try:
                    sub = tuple(int(x) for x in args.subdomain.split(","))
                except ValueError:
                    raise _UsageError("--subdomain expects labels like 0,1") from None
            out = restrict_to_core_instance(inst, _language(args.language), sub)
        else:
            _need(args, "language", "perm-instance")
            base = _language(args.language)
            perm = _instance(args.perm_instance)
            if perm.language != base:
                raise ValidationError("permutation instance is not over --language")
            _, pinnings = gamma_c(base)
            out = lift_gammac(inst, perm, pinnings, args.limit)
        result = formats.serialize_instance(out)
    _write(args.output, result)


def cmd_classify(args):
    report = empirical_dichotomy(
        _language(args.language),
        trials=args.trials,
        max_vars=args.max_vars,
        max_cons=args.max_cons,
        seed=args.seed,
        workers=args.workers,
        budget=args.budget,
    )
    sys.stdout.write(report.render())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vcsp", description="Exact tools for finite valued CSPs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="optimum of a vci instance")
    s.add_argument("--method", choices=("brute", "blp", "both"), default="both")
    s.add_argument("--decide", action="store_true", help="compare against the instance threshold")
    s.add_argument("--assignment", action="store_true", help="also print the brute-force minimizer")
    s.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    s.add_argument("file")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("blp", help="BLP relaxation tools")
    bsub = b.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = bsub.add_parser("emit", help="print the relaxation in lp format")
    e.add_argument("file")
    e.set_defaults(func=cmd_blp)

    lp = sub.add_parser("lp", help="exact LP tools")
    lsub = lp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ls = lsub.add_parser("solve", help="solve an lp file exactly")
    ls.add_argument("--certificate", action="store_true", help="print and check the certificate")
    ls.add_argument("file")
    ls.set_defaults(func=cmd_lp)

    r = sub.add_parser("reduce", help="apply one reduction step")
    r.add_argument("--step", choices=STEPS, required=True)
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--out", dest="output", default="-")
    r.add_argument("--language")
    r.add_argument("--gadgets")
    r.add_argument("--xor-fn")
    r.add_argument("--xor-labels")
    r.add_argument("--perm-instance")
    r.add_argument("--scale-map")
    r.add_argument("--subdomain")
    r.add_argument("--pad", action="store_true", help="pad short DIMACS clauses to width 3")
    r.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("classify", help="bounded probe of the BLP / XOR dichotomy")
    c.add_argument("--language", required=True)
    c.add_argument("--max-vars", type=int, default=3)
    c.add_argument("--max-cons", type=int, default=3)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--budget", type=int, default=SEARCH_BUDGET)
    c.set_defaults(func=cmd_classify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0; everything else from argparse is a usage error
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        args.func(args)
    except _UsageError as exc:
        print(f"vcsp: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeLimitError as exc:
        print(f"vcsp: size limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (FormatError, ValidationError, VcspError) as exc:
        print(f"vcsp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
