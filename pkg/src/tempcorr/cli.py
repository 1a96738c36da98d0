"""Command-line entry point ``tempcorr``.

Subcommands::

    tempcorr sweep CONFIG [--out PREFIX] [--no-plots]
    tempcorr pdo STATE CHANNEL --dim D --gamma-t X [--construction pdo|wigner] [--out FILE]
    tempcorr measure {ter,er,tsr,tnr,tnr_lhv,g,f} STATE CHANNEL --dim D --gamma-t X [--settings S]
    tempcorr nsit STATE CHANNEL --dim D --gamma-t X [--settings S]
    tempcorr bases --dump [--dim D]

STATE is a named state (vacuum, balanced_superposition, maximally_mixed) or a
JSON matrix file.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure.  ``TEMPCORR_WORKERS`` sets the number of worker processes.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import qmat
from .bases import default_basis, gellmann_basis
from .config import load_config, resolve_state
from .dynamics import Channel
from .errors import ConfigError, DimensionError, SolverError
from .measurements import mub_pvms
from .robustness import evaluate, make_assemblage, make_behavior
from .sot import build, nsit_check
from .sweep import run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _setup(args):
    try:
        ch = Channel(args.channel, args.dim, args.gamma_t)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return resolve_state(args.state, args.dim), ch


def _point_args(p):
    p.add_argument("state")
    p.add_argument("channel")
    p.add_argument("--dim", type=int, required=True, choices=(2, 3))
    p.add_argument("--gamma-t", type=float, default=0.0)


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    for path in run_experiment(cfg, args.out, plots=not args.no_plots):
        print(path)
    return EXIT_OK


def cmd_pdo(args) -> int:
    rho, ch = _setup(args)
    try:
        r = build(rho, ch, args.construction)
    except DimensionError as exc:
        raise ConfigError(str(exc)) from exc
    if args.out:
        qmat.save_matrix(r.operator, args.out)
    summary = {
        "construction": r.construction,
        "eigenvalues": [float(v) for v in qmat.eigvalsh(r.operator)],
        "trace_norm": qmat.trace_norm(r.operator),
    }
    if not args.out:
        summary["operator"] = qmat.matrix_to_json(r.operator)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_measure(args) -> int:
    rho, ch = _setup(args)
    name = args.measure
    if name in ("tsr",):
        obj = make_assemblage(rho, ch, mub_pvms(args.dim, args.settings))
    elif name in ("tnr", "tnr_lhv"):
        pvms = mub_pvms(args.dim, args.settings)
        obj = make_behavior(rho, ch, pvms, pvms)
    else:
        obj = build(rho, ch, args.construction)
    try:
        res = evaluate(name, obj)
    except DimensionError as exc:
        raise ConfigError(str(exc)) from exc
    print(json.dumps({"measure": name, "value": res.value, "gap": res.gap, "exactness": res.exactness}))
    return EXIT_OK


def cmd_nsit(args) -> int:
    rho, ch = _setup(args)
    rep = nsit_check(rho, ch, mub_pvms(args.dim, args.settings))
    out = {"satisfied": rep.satisfied, "max_violation": rep.max_violation}
    if rep.note:
        out["note"] = rep.note
    print(json.dumps(out))
    return EXIT_OK


def cmd_bases(args) -> int:
    if not args.dump:
        raise ConfigError("bases: nothing to do (use --dump)")
    dims = [args.dim] if args.dim else [2, 3]
    doc = {}
    for d in dims:
        for basis in (default_basis(d), gellmann_basis(d)):
            doc[f"{basis.label}:{d}"] = [qmat.matrix_to_json(g) for g in basis.elements]
    print(json.dumps(doc, indent=1))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tempcorr", description="Temporal correlations of qubits and qutrits")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a time-grid sweep from a config file")
    p.add_argument("config")
    p.add_argument("--out", help="output path prefix (overrides the config)")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pdo", help="build a state over time")
    _point_args(p)
    p.add_argument("--construction", choices=("pdo", "wigner"), default="pdo")
    p.add_argument("--out", help="write the operator as a JSON matrix")
    p.set_defaults(func=cmd_pdo)

    p = sub.add_parser("measure", help="evaluate one robustness measure")
    p.add_argument("measure", choices=("ter", "ter_sdp", "er", "tsr", "tnr", "tnr_lhv", "g", "f"))
    _point_args(p)
    p.add_argument("--settings", type=int, default=2)
    p.add_argument("--construction", choices=("pdo", "wigner"), default="pdo")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("nsit", help="check no-signalling in time for MUB settings")
    _point_args(p)
    p.add_argument("--settings", type=int, default=2)
    p.set_defaults(func=cmd_nsit)

    p = sub.add_parser("bases", help="print operator bases")
    p.add_argument("--dump", action="store_true")
    p.add_argument("--dim", type=int, choices=(2, 3))
    p.set_defaults(func=cmd_bases)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
