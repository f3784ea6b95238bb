"""Command line interface.

Exit codes: 0 success / check passed, 1 check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .batch import sweep, sweep_csv, xcheck
from .curvature import Convention, CurvatureContext
from .errors import FlagCurvError, SpaceValidationError
from .flag import FORMS, THEOREMS, flag_curvature_closed, orthonormalize_flag
from .metrics import Family, profile, shen_criterion
from .natred import natred_check_finsler, natred_check_riemannian, parallel_X_check
from .space import dumps, load_space

log = logging.getLogger("flagcurv")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(FlagCurvError, ValueError):
    pass


def parse_vector(text: str, labels) -> np.ndarray:
    """``"0,2,0"`` (coordinates) or a label combination like ``"2e2"``,
    ``"e1 - 0.5*e3"``."""
    text = text.strip()
    n = len(labels)
    if "," in text or (n == 1 and re.fullmatch(r"[-+0-9.eE]+", text)):
        try:
            v = np.array([float(x) for x in text.split(",")])
        except ValueError:
            raise InputError(f"bad coordinate list {text!r}") from None
        if v.shape != (n,):
            raise InputError(f"expected {n} coordinates, got {v.size}")
        return v
    alts = "|".join(re.escape(l) for l in sorted(labels, key=len, reverse=True))
    term = re.compile(rf"\s*([+-]?)\s*(\d+\.?\d*|\.\d+)?\s*\*?\s*({alts})\s*")
    v = np.zeros(n)
    pos = 0
    while pos < len(text):
        m = term.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse vector {text!r} near {text[pos:]!r}")
        coef = float(m.group(2)) if m.group(2) else 1.0
        if m.group(1) == "-":
            coef = -coef
        v[list(labels).index(m.group(3))] += coef
        pos = m.end()
    return v


def parse_flag(text: str, labels):
    """``"U=e1,Y=e2"`` or ``"U=1,0,0;Y=0,1,0"``."""
    parts = {}
    chunks = text.split(";") if ";" in text else re.split(r",(?=\s*[UY]\s*=)", text)
    for chunk in chunks:
        if "=" not in chunk:
            raise InputError(f"bad flag spec {text!r}; use U=...,Y=...")
        k, v = chunk.split("=", 1)
        parts[k.strip()] = parse_vector(v, labels)
    if set(parts) != {"U", "Y"}:
        raise InputError("flag needs exactly U and Y")
    return parts["U"], parts["Y"]


def _emit(payload, args):
    text = dumps(payload)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)


def cmd_validate(args) -> int:
    try:
        desc = load_space(args.space)
    except SpaceValidationError as exc:
        _emit({"space": args.space, "valid": False, "failed": exc.invariants,
               "report": exc.report.as_dict()}, args)
        return EXIT_FAIL
    rep = desc.validate()
    for w in rep.warnings:
        log.warning("hypothesis not met: %s (residual %s)", w.name, w.residual)
    _emit({"space": desc.name, "valid": True, "report": rep.as_dict()}, args)
    return EXIT_OK


def cmd_shen(args) -> int:
    rep = shen_criterion(profile(args.family), args.b, args.samples)
    _emit(rep.as_dict(), args)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_curvature(args) -> int:
    desc = load_space(args.space)
    labels = desc.basis
    U, Y = parse_flag(args.flag, labels)
    X = parse_vector(args.X, labels) if args.X is not None else None
    metric = desc.metric(args.family, X)
    ctx = CurvatureContext(desc.algebra, desc.structure, Convention(args.mode))
    flag = orthonormalize_flag(U, Y, desc.structure)
    rep = flag_curvature_closed(metric, ctx, flag, args.theorem, args.form,
                                **({"override": True} if args.override and args.theorem != "theorem" else {}))
    payload = rep.as_dict()
    payload["flag_raw"] = {"U": list(U), "Y": list(Y)}
    payload["flag"] = flag.as_dict()
    _emit(payload, args)
    if args.strict and not rep.agrees:
        return EXIT_FAIL
    return EXIT_OK


def cmd_sweep(args) -> int:
    desc = load_space(args.space)
    X = parse_vector(args.X, desc.basis) if args.X is not None else None
    results = sweep(desc, args.samples, args.seed, Convention(args.mode), args.family, X,
                    args.theorem, args.form, args.threads)
    text = sweep_csv(desc, results)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_xcheck(args) -> int:
    desc = load_space(args.space)
    X = parse_vector(args.X, desc.basis) if args.X is not None else None
    ledger = xcheck(desc, args.samples, args.seed, args.tol, Convention(args.mode), args.family, X,
                    threads=args.threads)
    _emit(ledger.as_dict(), args)
    return EXIT_OK if not ledger.entries_for(kind="term-mismatch") and not ledger.mismatches else EXIT_FAIL


def cmd_natred(args) -> int:
    desc = load_space(args.space)
    X = parse_vector(args.X, desc.basis) if args.X is not None else desc.X_vector
    riem = natred_check_riemannian(desc.algebra, desc.structure)
    par = parallel_X_check(desc.algebra, desc.structure, X)
    reports = [riem, par]
    fam = Family.parse(args.family) if args.family else desc.family
    if fam is Family.INFINITE_SERIES and not np.any(X):
        log.warning("infinite-series metric needs X != 0; Finsler check skipped")
    else:
        reports.append(natred_check_finsler(desc.metric(fam, X), desc.algebra, desc.structure,
                                            args.samples, args.seed))
    berwald = desc.berwald if desc.berwald is not None else par.passed
    _emit({"space": desc.name, "berwald": berwald, "checks": [r.as_dict() for r in reports]}, args)
    natred = [r for r in reports if r.name.startswith("natred")]
    return EXIT_OK if all(r.passed for r in natred) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flagcurv", description="Flag curvature of homogeneous "
                                "(alpha, beta)-metric spaces with numeric cross-checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def space_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("space", help="descriptor JSON path or bundled space name")
        sp.add_argument("--out", help="also write the output to this file")
        return sp

    def metric_opts(sp):
        sp.add_argument("--family", choices=[f.value for f in Family], help="override the metric family")
        sp.add_argument("--X", help="override X: coordinates or a label combination (e.g. 2e2)")
        sp.add_argument("--mode", choices=[c.value for c in Convention], default="standard")

    sp = space_cmd("validate", "check a space descriptor")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("shen", help="grid check of the Shen positivity condition")
    sp.add_argument("family", choices=[f.value for f in Family])
    sp.add_argument("b", type=float)
    sp.add_argument("--samples", type=int, default=1001)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_shen)

    sp = space_cmd("curvature", "flag curvature of one flag, closed form and oracle")
    sp.add_argument("--flag", required=True, help='"U=e1,Y=e2" or "U=1,0,0;Y=0,1,0"')
    metric_opts(sp)
    sp.add_argument("--theorem", choices=sorted(THEOREMS), default="theorem")
    sp.add_argument("--form", choices=FORMS, default="literal")
    sp.add_argument("--override", action="store_true", help="evaluate despite failed hypotheses")
    sp.add_argument("--strict", action="store_true", help="exit 1 when closed form and oracle disagree")
    sp.set_defaults(func=cmd_curvature)

    sp = space_cmd("sweep", "CSV of closed form vs oracle over random flags")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    metric_opts(sp)
    sp.add_argument("--theorem", choices=sorted(THEOREMS), default="theorem")
    sp.add_argument("--form", choices=FORMS, default="literal")
    sp.add_argument("--threads", type=int, default=None, help="0 = auto (default: FLAGCURV_THREADS)")
    sp.set_defaults(func=cmd_sweep)

    sp = space_cmd("xcheck", "discrepancy ledger of every applicable closed form")
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-6)
    metric_opts(sp)
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(func=cmd_xcheck)

    sp = space_cmd("natred", "naturally reductive checks")
    sp.add_argument("--samples", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--family", choices=[f.value for f in Family])
    sp.add_argument("--X")
    sp.set_defaults(func=cmd_natred)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except SpaceValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL if args.command == "validate" else EXIT_INPUT
    except (FlagCurvError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
