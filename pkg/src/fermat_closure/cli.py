"""Command-line entry point: ``fermat-closure <subcommand> ...``.

Exit codes: 0 success, 1 an Undecided outcome under --strict, 2 invalid
input or configuration, 3 an internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import certificates as certs
from .closure import SearchBounds, VerdictKind, decide_tight_closure, in_frobenius_closure
from .errors import ConfigInvalid, ConsistencyFailure, FermatClosureError
from .hilbert_kunz import hk_compare, hk_sequence
from .linalg import DEFAULT_MAX_DENSE
from .membership import membership
from .ring import RingContext
from .scan import PRESETS, ExperimentConfig, emit_report, preset, run_experiment
from .semistability import detect_instability, lemma_syzygy_construction

EXIT_OK, EXIT_UNDECIDED, EXIT_CONFIG, EXIT_CONSISTENCY = 0, 1, 2, 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _gens(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermat-closure",
        description="Frobenius and tight closure experiments in GF(p)[x,y,z]/(x^d+y^d-z^d).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def ring_args(p: argparse.ArgumentParser, candidate: bool = True):
        p.add_argument("--d", type=int, required=True, help="Fermat degree")
        p.add_argument("--p", type=int, required=True, help="characteristic")
        p.add_argument("--gens", type=_gens, required=True, help="comma-separated generators, e.g. x4,y4,z4")
        if candidate:
            p.add_argument("--candidate", required=True, help="candidate element, e.g. x3y3")

    def common(p: argparse.ArgumentParser):
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")
        p.add_argument("--out", help="write the result to this file")
        p.add_argument("--strict", action="store_true", help="exit 1 on Undecided outcomes")
        p.add_argument("--max-dense", type=int, default=DEFAULT_MAX_DENSE, help="dense elimination budget")

    m = sub.add_parser("membership", help="plain ideal membership with a witness")
    ring_args(m)
    common(m)

    fr = sub.add_parser("frobenius", help="Frobenius-closure search up to e_max")
    ring_args(fr)
    fr.add_argument("--e-max", type=int, default=2)
    common(fr)

    t = sub.add_parser("tight", help="tight-closure decision for three generators")
    ring_args(t)
    t.add_argument("--e-max", type=int, default=2, help="instability search depth")
    t.add_argument("--route", choices=("auto", "generic", "certificate"), default="auto")
    common(t)

    c = sub.add_parser("certificate", help="binomial certificate for x^3y^3 vs (x^4,y^4,z^4), d=7")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--d", type=int, default=7)
    common(c)

    ins = sub.add_parser("instability", help="destabilizing syzygy of the Frobenius pull-back")
    ring_args(ins, candidate=False)
    ins.add_argument("--e-max", type=int, default=2)
    ins.add_argument("--lemma", action="store_true", help="use the explicit construction for (x^4p, y^4p, z^4p)")
    common(ins)

    hk = sub.add_parser("hk", help="colengths of Frobenius powers")
    ring_args(hk, candidate=False)
    hk.add_argument("--candidate", help="also compare with (I + (candidate))")
    hk.add_argument("--e-max", type=int, default=2)
    common(hk)

    s = sub.add_parser("scan", help="sweep primes over a preset or config")
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--config", help="JSON file with ExperimentConfig fields")
    s.add_argument("--d", type=int)
    s.add_argument("--p", type=_int_list, help="explicit primes, comma-separated")
    s.add_argument("--primes-up-to", type=int)
    s.add_argument("--residues", type=_int_list)
    s.add_argument("--gens", type=_gens)
    s.add_argument("--candidate")
    s.add_argument("--tests", type=_gens)
    s.add_argument("--e-max", type=int)
    s.add_argument("--max-dense", type=int)
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--out")
    s.add_argument("--deterministic", action="store_true", default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--strict", action="store_true")
    return parser


def _ring(args):
    ctx = RingContext(args.d, args.p)
    gens = [ctx.parse(g) for g in args.gens]
    return ctx, gens


def _emit(args, text_value: str, json_value) -> None:
    if args.format == "json":
        out = json.dumps(json_value, indent=2, sort_keys=True) + "\n"
    else:
        out = text_value + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _cmd_membership(args) -> int:
    ctx, gens = _ring(args)
    res = membership(ctx.parse(args.candidate), gens, ctx, max_dense=args.max_dense)
    _emit(args, res.verdict, res.to_json())
    return EXIT_OK


def _cmd_frobenius(args) -> int:
    ctx, gens = _ring(args)
    v = in_frobenius_closure(ctx.parse(args.candidate), gens, args.e_max, ctx, args.max_dense)
    _emit(args, str(v), v.to_json())
    return EXIT_OK


def _cmd_tight(args) -> int:
    ctx, gens = _ring(args)
    bounds = SearchBounds(instability_e_max=args.e_max, max_dense=args.max_dense, route=args.route)
    v = decide_tight_closure(ctx.parse(args.candidate), gens, ctx, bounds)
    _emit(args, f"{v} route={v.route}", v.to_json())
    return EXIT_UNDECIDED if args.strict and v.kind == VerdictKind.UNDECIDED else EXIT_OK


def _cmd_certificate(args) -> int:
    if args.d != certs.FAMILY_DEGREE:
        raise ConfigInvalid("d", "certificates exist only for d=7")
    cert = certs.build_certificate(args.p)
    if cert is None:
        _emit(args, f"no certificate for p={args.p} (p mod 7 = {args.p % 7})", {"kind": None, "p": args.p})
        return EXIT_UNDECIDED if args.strict else EXIT_OK
    if not certs.verify_certificate(cert):
        raise ConsistencyFailure(f"certificate for p={args.p} failed verification", cert.to_json())
    _emit(args, f"{cert.kind} certificate at level {cert.level}: verified", cert.to_json())
    return EXIT_OK


def _cmd_instability(args) -> int:
    ctx, gens = _ring(args)
    if args.lemma:
        w = lemma_syzygy_construction(args.d, args.p)
    else:
        w = detect_instability(gens, args.e_max, ctx, args.max_dense)
    if w is None:
        _emit(args, "NotFound", {"found": False})
        return EXIT_UNDECIDED if args.strict else EXIT_OK
    _emit(args, f"Unstable e={w.e} twist={w.twist} twisted_degree={w.twisted_degree}", w.to_json())
    return EXIT_OK


def _cmd_hk(args) -> int:
    ctx, gens = _ring(args)
    e_range = range(1, args.e_max + 1)
    if args.candidate:
        rows = hk_compare(gens, ctx.parse(args.candidate), e_range, ctx, args.max_dense)
        header = "e,q,colength_I,colength_I_f,equal"
        lines = [f"{r.e},{r.q},{r.colength_i},{r.colength_if},{r.equal}" for r in rows]
        payload = [vars(r) | {"equal": r.equal} for r in rows]
    else:
        seq = hk_sequence(gens, e_range, ctx, args.max_dense)
        header = ",".join(seq.CSV_HEADER)
        lines = [",".join(str(v) for v in row) for row in seq.csv_rows()]
        payload = seq.to_json()
    _emit(args, "\n".join([header, *lines]), payload)
    return EXIT_OK


def _scan_config(args) -> ExperimentConfig:
    overrides = {
        "d": args.d,
        "primes": tuple(args.p) if args.p else None,
        "primes_up_to": args.primes_up_to,
        "residues": tuple(args.residues) if args.residues else None,
        "gens": tuple(args.gens) if args.gens else None,
        "candidate": args.candidate,
        "tests": tuple(args.tests) if args.tests else None,
        "e_max": args.e_max,
        "max_dense": args.max_dense,
        "format": args.format,
        "deterministic": args.deterministic,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.p and args.primes_up_to is None:
        overrides["primes_up_to"] = None
    base = preset(args.preset) if args.preset else None
    if args.config:
        base = ExperimentConfig.from_json(args.config, base)
    if base is None:
        return ExperimentConfig.from_dict(overrides)
    return ExperimentConfig.from_dict(overrides, base) if overrides else base


def _cmd_scan(args) -> int:
    if args.jobs < 1:
        raise ConfigInvalid("jobs", "must be at least 1")
    config = _scan_config(args)
    records = run_experiment(config, jobs=args.jobs)
    if not records:
        raise ConfigInvalid("primes", "the prime selection is empty")
    text = emit_report(records, config.format, args.out)
    if not args.out:
        sys.stdout.write(text)
    undecided = any(o.verdict == "Undecided" for r in records for o in r.outcomes)
    return EXIT_UNDECIDED if args.strict and undecided else EXIT_OK


COMMANDS = {
    "membership": _cmd_membership,
    "frobenius": _cmd_frobenius,
    "tight": _cmd_tight,
    "certificate": _cmd_certificate,
    "instability": _cmd_instability,
    "hk": _cmd_hk,
    "scan": _cmd_scan,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConsistencyFailure, AssertionError) as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        if getattr(exc, "dump", None):
            print(json.dumps(exc.dump, indent=2, sort_keys=True, default=str), file=sys.stderr)
        return EXIT_CONSISTENCY
    except (FermatClosureError, ValueError) as exc:
        label = f"{type(exc).__name__}"
        print(f"error ({label}): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
