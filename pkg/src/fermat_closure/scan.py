"""Prime sweeps over experiment presets and their CSV/JSON reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Sequence

from sympy import isprime, primerange

from . import certificates as certs
from .closure import (
    SearchBounds,
    VerdictKind,
    decide_tight_closure,
    in_frobenius_closure,
    is_certificate_family,
)
from .errors import ConfigInvalid, ConsistencyFailure, ExponentOverflow
from .hilbert_kunz import hk_sequence
from .linalg import DEFAULT_MAX_DENSE
from .membership import membership
from .ring import RingContext
from .semistability import detect_instability

log = logging.getLogger(__name__)

TESTS = ("certificate", "frobenius", "hk", "instability", "membership", "tight")
CSV_HEADER = ("p", "residue", "test", "exponent", "verdict", "certificate", "detail")
PROVED = "proved-route"
EVIDENCE = "search-evidence"

CUBIC_NOTE = "candidate z^2; the literal statement names y^2, which already lies in (x,y)"


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    gens: tuple[str, ...]
    candidate: str
    primes: tuple[int, ...] | None = None
    primes_up_to: int | None = None
    residues: tuple[int, ...] | None = None
    tests: tuple[str, ...] = ("frobenius",)
    e_max: int = 2
    instability_e_max: int = 1
    max_dense: int = DEFAULT_MAX_DENSE
    format: str = "csv"
    deterministic: bool = False
    proved_residues: dict[str, tuple[int, ...]] = field(default_factory=dict)
    note: str | None = None
    preset: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.d, int) or self.d < 3:
            raise ConfigInvalid("d", "must be an integer >= 3")
        if len(self.gens) == 0:
            raise ConfigInvalid("gens", "at least one generator is required")
        for name in self.tests:
            if name not in TESTS:
                raise ConfigInvalid("tests", f"unknown test {name!r}; choose from {', '.join(TESTS)}")
        if self.primes is None and self.primes_up_to is None:
            raise ConfigInvalid("primes", "give an explicit prime list or primes_up_to")
        for p in self.primes or ():
            if not isinstance(p, int) or not isprime(p):
                raise ConfigInvalid("primes", f"{p!r} is not prime")
        if self.primes_up_to is not None and self.primes_up_to < 2:
            raise ConfigInvalid("primes_up_to", "must be at least 2")
        if self.e_max < 1:
            raise ConfigInvalid("e_max", "must be at least 1")
        if self.instability_e_max < 1:
            raise ConfigInvalid("instability_e_max", "must be at least 1")
        if self.max_dense < 1:
            raise ConfigInvalid("max_dense", "must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigInvalid("format", "must be csv or json")
        if "tight" in self.tests and len(self.gens) != 3:
            raise ConfigInvalid("gens", "the tight test needs exactly three generators")

    def select_primes(self) -> list[int]:
        if self.primes is not None:
            candidates = sorted(set(self.primes))
        else:
            candidates = list(primerange(2, self.primes_up_to))
        if self.residues is not None:
            candidates = [p for p in candidates if p % self.d in self.residues]
        kept = []
        for p in candidates:
            if self.d % p == 0:
                log.info("skipping p=%d: it divides d=%d", p, self.d)
                continue
            kept.append(p)
        return kept

    @classmethod
    def from_dict(cls, data: dict[str, Any], base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigInvalid(key, "unknown config field")
        values = asdict(base) if base is not None else {}
        values.update(data)
        try:
            for key in ("gens", "primes", "residues", "tests"):
                if values.get(key) is not None:
                    values[key] = tuple(_gen_text(g) if key == "gens" else g for g in values[key])
            if "candidate" in values:
                values["candidate"] = _gen_text(values["candidate"])
            if "proved_residues" in values:
                values["proved_residues"] = {k: tuple(v) for k, v in values["proved_residues"].items()}
        except (TypeError, AttributeError) as exc:
            raise ConfigInvalid("config", f"malformed value: {exc}") from exc
        for required in ("d", "gens", "candidate"):
            if required not in values:
                raise ConfigInvalid(required, "missing")
        return cls(**values)

    @classmethod
    def from_json(cls, path: "str | Path", base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigInvalid("config", f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigInvalid("config", "top level must be an object")
        return cls.from_dict(data, base)

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("gens", "primes", "residues", "tests"):
            if out[key] is not None:
                out[key] = list(out[key])
        out["proved_residues"] = {k: list(v) for k, v in out["proved_residues"].items()}
        return out


def _gen_text(g) -> str:
    """Accept "x4", "x^4*y" or an exponent triple [a, b, c]."""
    if isinstance(g, str):
        return g
    a, b, c = (int(v) for v in g)
    return f"x^{a}*y^{b}*z^{c}"


PRESETS: dict[str, ExperimentConfig] = {
    "fermat7": ExperimentConfig(
        d=7,
        gens=("x^4", "y^4", "z^4"),
        candidate="x^3*y^3",
        primes_up_to=40,
        tests=("certificate", "frobenius", "tight"),
        e_max=1,
        proved_residues={"certificate": (2, 3), "tight": (2, 3), "frobenius": (3,)},
        preset="fermat7",
    ),
    "fermat5": ExperimentConfig(
        d=5,
        gens=("x^2", "y^2", "z^2"),
        candidate="x*y*z",
        primes_up_to=40,
        tests=("frobenius",),
        e_max=3,
        proved_residues={"frobenius": (2,)},
        preset="fermat5",
    ),
    "fermat3": ExperimentConfig(
        d=3,
        gens=("x", "y"),
        candidate="z^2",
        primes_up_to=40,
        tests=("frobenius",),
        e_max=3,
        proved_residues={"frobenius": (1, 2)},
        note=CUBIC_NOTE,
        preset="fermat3",
    ),
}


def preset(name: str, **overrides) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigInvalid("preset", f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    return replace(PRESETS[name], **overrides) if overrides else PRESETS[name]


@dataclass
class TestOutcome:
    __test__ = False  # not a pytest class

    test: str
    exponent: int | None
    verdict: str
    evidence: str
    certificate: str
    detail: str


@dataclass
class ScanRecord:
    p: int
    residue: int
    outcomes: list[TestOutcome]
    wall_time: float | None = None

    def verdict(self, test: str) -> str | None:
        for o in self.outcomes:
            if o.test == test:
                return o.verdict
        return None

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "residue": self.residue,
            "wall_time": self.wall_time,
            "tests": [asdict(o) for o in sorted(self.outcomes, key=lambda o: o.test)],
        }


def _evidence(config: ExperimentConfig, test: str, p: int) -> str:
    return PROVED if p % config.d in config.proved_residues.get(test, ()) else EVIDENCE


def _run_test(test: str, config: ExperimentConfig, ctx: RingContext, gens, f) -> TestOutcome:
    p = ctx.p
    evidence = _evidence(config, test, p)
    bounds = SearchBounds(
        instability_e_max=config.instability_e_max,
        frobenius_e_max=config.e_max,
        max_dense=config.max_dense,
    )
    try:
        if test == "membership":
            res = membership(f, gens, ctx, max_dense=config.max_dense)
            kind = "combination" if res.member else "functional"
            return TestOutcome(test, 1, res.verdict, evidence, kind, "")
        if test == "frobenius":
            v = in_frobenius_closure(f, gens, config.e_max, ctx, config.max_dense)
            detail = " ".join(f"e={e}:{r}" for e, r in v.levels)
            if v.reason:
                detail += f"; {v.reason}"
            return TestOutcome(test, v.q, str(v), evidence, "combination" if v.is_in else "functional", detail)
        if test == "tight":
            return _tight(config, ctx, gens, f, bounds, evidence)
        if test == "certificate":
            return _certificate(config, ctx, gens, f, evidence)
        if test == "instability":
            w = detect_instability(gens, config.instability_e_max, ctx, config.max_dense)
            if w is None:
                return TestOutcome(test, None, "NotFound", EVIDENCE, "", f"e<={config.instability_e_max}")
            return TestOutcome(
                test, w.q, "Unstable", EVIDENCE, "syzygy",
                f"e={w.e} twist={w.twist} twisted_degree={w.twisted_degree}",
            )
        if test == "hk":
            seq = hk_sequence(gens, range(1, config.e_max + 1), ctx, config.max_dense)
            detail = " ".join(f"e={r.e}:{r.colength}/{r.q}^2={float(r.normalized):.6f}" for r in seq.rows)
            return TestOutcome(test, seq.rows[-1].q, "Computed", EVIDENCE, "", detail)
    except ExponentOverflow as exc:
        return TestOutcome(test, None, "Undecided", EVIDENCE, "", f"budget: {exc}")
    raise ConfigInvalid("tests", f"unknown test {test!r}")


def _tight(config, ctx, gens, f, bounds, evidence) -> TestOutcome:
    v = decide_tight_closure(f, gens, ctx, bounds)
    detail = [f"route={v.route}"]
    if v.witness is not None:
        detail.append(f"witness e={v.witness.e} twist={v.witness.twist}")
    if v.reason and v.kind == VerdictKind.UNDECIDED:
        detail.append(v.reason)
    if v.route == "certificate":
        oracle = _generic_cross_check(ctx, gens, f, bounds, v)
        detail.append(oracle)
    kind = v.certificate.kind if v.certificate is not None else ("witness" if v.witness else "")
    if v.kind == VerdictKind.UNDECIDED:
        evidence = EVIDENCE
    return TestOutcome("tight", v.q, str(v.kind), evidence, kind, "; ".join(detail))


def _generic_cross_check(ctx, gens, f, bounds, certified) -> str:
    try:
        generic = decide_tight_closure(f, gens, ctx, replace(bounds, route="generic"))
    except ExponentOverflow:
        return "generic oracle over budget"
    if generic.kind != certified.kind:
        raise ConsistencyFailure(
            f"certificate route says {certified.kind}, generic route says {generic.kind} at p={ctx.p}",
            {"p": ctx.p, "certificate": certified.to_json(), "generic": generic.to_json()},
        )
    return f"generic oracle agrees ({generic})"


def _certificate(config, ctx, gens, f, evidence) -> TestOutcome:
    p = ctx.p
    if not (is_certificate_family(f, gens, ctx) and p % certs.FAMILY_DEGREE in (2, 3)):
        return TestOutcome("certificate", None, "NotApplicable", EVIDENCE, "", "")
    cert = certs.build_certificate(p)
    if not certs.verify_certificate(cert, ctx):
        raise ConsistencyFailure(f"certificate for p={p} failed verification", {"p": p, "certificate": cert.to_json()})
    if cert.kind == "membership":
        detail = f"a_0={cert.coefficients[0]} size={len(cert.coefficients)}"
        verdict = "IN"
    else:
        detail = f"det_M5={cert.det_m5} k={cert.k}"
        verdict = "OUT"
    if p <= certs.DEFAULT_ORACLE_BOUND:
        detail += "; oracle checked"
    return TestOutcome("certificate", cert.level, verdict, evidence, cert.kind, detail)


def _run_prime(args) -> ScanRecord:
    config, p = args
    start = time.perf_counter()
    ctx = RingContext(config.d, p)
    gens = [ctx.parse(g) for g in config.gens]
    f = ctx.parse(config.candidate)
    outcomes = [_run_test(t, config, ctx, gens, f) for t in sorted(config.tests)]
    if config.note:
        for o in outcomes:
            o.detail = f"{o.detail}; {config.note}" if o.detail else config.note
    wall = None if config.deterministic else round(time.perf_counter() - start, 3)
    return ScanRecord(p, p % config.d, outcomes, wall)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list[ScanRecord]:
    """One record per selected prime, in ascending order of p."""
    primes = config.select_primes()
    work = [(config, p) for p in primes]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_prime, work))
    else:
        records = [_run_prime(w) for w in work]
    return sorted(records, key=lambda r: r.p)


def render_report(records: Sequence[ScanRecord], fmt: str = "csv") -> str:
    if not records:
        raise ValueError("no records to report")
    records = sorted(records, key=lambda r: r.p)
    if fmt == "json":
        return json.dumps([r.to_json() for r in records], indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ConfigInvalid("format", "must be csv or json")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        for o in sorted(r.outcomes, key=lambda o: o.test):
            detail = o.detail
            if r.wall_time is not None:
                detail = f"{detail}; time={r.wall_time}s" if detail else f"time={r.wall_time}s"
            writer.writerow(
                (r.p, r.residue, o.test, "" if o.exponent is None else o.exponent,
                 f"{o.verdict} ({o.evidence})", o.certificate, detail)
            )
    return buf.getvalue()


def emit_report(records: Sequence[ScanRecord], fmt: str = "csv", path: "str | Path | None" = None) -> str:
    """Render the report and, when ``path`` is given, write it there."""
    text = render_report(records, fmt)
    if path is not None:
        Path(path).write_text(text)
    return text
