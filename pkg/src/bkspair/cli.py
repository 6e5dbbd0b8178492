"""Command-line interface: ``bkspair {rootsys,weyl,pairing,verify}``.

Every command prints one JSON report (or CSV for the pairing table).  The
report digest hashes everything except timings and ``meta``, so two runs with
the same configuration can be compared by digest alone.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .alcove import AdmissibleLimitExceeded, enumerate_admissible, from_weight_coords
from .linalg import fraction_str, to_fraction
from .oracle import classical_weyl_order
from .pairing import HAAR_CONVENTIONS, K_POWERS, AdmissibilityError, Conventions, PairingResult, bks_pairing
from .rootsys import InvalidTypeError, RootSystem, build_root_system, parse_type
from .suites import SUITES, run_suite
from .weyl import DEFAULT_MAX_SIZE, WeylGroupTooLarge, cache_filename, load_or_enumerate

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CHECK_FAILED = 3
EXIT_RESOURCE = 4

CACHE_ENV = "BKS_CACHE_DIR"
DEFAULT_CACHE_DIR = Path.home() / ".cache" / "bkspair"


class ValidationError(ValueError):
    pass


class ResourceCapError(RuntimeError):
    pass


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    type_letter: str = "A"
    rank: int = 1
    k: int = 2
    haar: str = "probability"
    phase_k: bool = False
    k_power: str = "n-r"
    seed: int = 0
    trials: int = 200
    weyl_cache_dir: str | None = None
    output: str = "json"
    max_weyl: int = DEFAULT_MAX_SIZE

    def validate(self) -> None:
        try:
            build_root_system(self.type_letter, self.rank)
        except InvalidTypeError as exc:
            raise ValidationError(str(exc)) from None
        if self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k}")
        if self.haar not in HAAR_CONVENTIONS:
            raise ValidationError(f"haar must be one of {HAAR_CONVENTIONS}")
        if self.k_power not in K_POWERS:
            raise ValidationError(f"k-power must be one of {K_POWERS}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.output not in ("json", "csv"):
            raise ValidationError(f"format must be json or csv, got {self.output!r}")
        if self.max_weyl < 1:
            raise ValidationError(f"max-weyl must be >= 1, got {self.max_weyl}")

    @property
    def conventions(self) -> Conventions:
        return Conventions(self.haar, self.phase_k, self.k_power)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("weyl_cache_dir")
        return d


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}

# config-file key -> (RunConfig field, parser)
_CONFIG_KEYS = {
    "type": ("type_letter", str),
    "rank": ("rank", int),
    "k": ("k", int),
    "haar": ("haar", str),
    "phase_k": ("phase_k", lambda s: _BOOL[s.lower()]),
    "k_power": ("k_power", str),
    "seed": ("seed", int),
    "trials": ("trials", int),
    "cache_dir": ("weyl_cache_dir", str),
    "format": ("output", str),
    "max_weyl": ("max_weyl", int),
}


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        name, parse = _CONFIG_KEYS[key]
        try:
            out[name] = parse(value)
        except (ValueError, KeyError):
            raise ValidationError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    if os.environ.get(CACHE_ENV):
        values["weyl_cache_dir"] = os.environ[CACHE_ENV]
    if getattr(args, "type", None):
        letter = args.type
        if len(letter) > 1:
            try:
                letter, rank = parse_type(letter)
            except InvalidTypeError as exc:
                raise ValidationError(str(exc)) from None
            values["rank"] = rank
        values["type_letter"] = letter.upper()
    flag_map = {
        "rank": "rank", "k": "k", "haar": "haar", "phase_k": "phase_k", "k_power": "k_power",
        "seed": "seed", "trials": "trials", "cache_dir": "weyl_cache_dir", "format": "output",
        "max_weyl": "max_weyl",
    }
    for flag, name in flag_map.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[name] = v
    cfg = RunConfig(**values)
    if cfg.weyl_cache_dir is None:
        cfg.weyl_cache_dir = str(DEFAULT_CACHE_DIR)
    cfg.validate()
    return cfg


# -- serialization -------------------------------------------------------------


def to_jsonable(x: Any) -> Any:
    """Fractions -> "p/q", complex -> {"re", "im"}, tuples -> lists."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, int):
        return int(x)
    if isinstance(x, complex):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return to_jsonable(x.item())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _float_str(v: float) -> str:
    if math.isnan(v) or math.isinf(v):
        return json.dumps(repr(v))
    s = format(v, ".17g")
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def dumps(x: Any, indent: int | None = 2, _level: int = 0) -> str:
    """JSON with sorted keys and every float at 17 significant digits."""
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = "," if indent is None else ","
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(x[k], indent, _level + 1)}" for k in sorted(x)]
        return "{" + sep.join(items) + end + "}"
    if isinstance(x, list):
        if not x:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in x]
        return "[" + sep.join(items) + end + "]"
    if isinstance(x, float):
        return _float_str(x)
    return json.dumps(x)


@dataclass
class ReportRecord:
    command: list[str]
    config: dict
    results: Any
    checks: list[dict] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    version: str = __version__

    def body(self) -> dict:
        return to_jsonable({
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "checks": self.checks,
        })

    @property
    def digest(self) -> str:
        return hashlib.sha256(dumps(self.body(), indent=None).encode()).hexdigest()

    def to_json(self) -> str:
        doc = self.body()
        doc["timings"] = to_jsonable(self.timings)
        doc["meta"] = to_jsonable(self.meta)
        doc["digest"] = self.digest
        return dumps(doc) + "\n"

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)


# -- commands ------------------------------------------------------------------


def _root_system(cfg: RunConfig) -> RootSystem:
    return build_root_system(cfg.type_letter, cfg.rank)


def _weyl(cfg: RunConfig, rs: RootSystem, meta: dict):
    order = classical_weyl_order(rs)
    if order > cfg.max_weyl:
        raise ResourceCapError(
            f"W({rs.name}) has {order} elements, above max-weyl = {cfg.max_weyl}; "
            "pass --max-weyl to raise the cap"
        )
    try:
        elements, hit = load_or_enumerate(rs, cfg.weyl_cache_dir, cfg.max_weyl)
    except WeylGroupTooLarge as exc:
        raise ResourceCapError(str(exc)) from None
    meta["cache_hit"] = hit
    meta["cache_file"] = str(Path(cfg.weyl_cache_dir) / cache_filename(rs))
    return elements


def cmd_rootsys_info(cfg: RunConfig, argv: list[str]) -> ReportRecord:
    rs = _root_system(cfg)
    results = {
        "type": rs.name,
        "r": rs.rank,
        "m": rs.m,
        "n": rs.n,
        "gram": [list(row) for row in rs.gram],
        "cartan": [list(row) for row in rs.cartan],
        "positive_roots": [[Fraction(c) for c in a] for a in rs.positive_roots],
        "highest_root": [Fraction(c) for c in rs.highest_root],
        "rho": list(rs.rho),
        "fundamental_weights": [list(w) for w in rs.fundamental_weights],
    }
    return ReportRecord(argv, cfg.echo(), results)


def cmd_weyl_enumerate(cfg: RunConfig, argv: list[str]) -> ReportRecord:
    rs = _root_system(cfg)
    meta: dict = {}
    t0 = time.perf_counter()
    elements = _weyl(cfg, rs, meta)
    elapsed = time.perf_counter() - t0
    hist = Counter(e.length for e in elements)
    order = classical_weyl_order(rs)
    results = {
        "type": rs.name,
        "order": len(elements),
        "length_histogram": [hist[i] for i in range(max(hist) + 1)],
        "longest_word": list(elements[-1].word),
    }
    checks = [{"name": "classical order", "passed": len(elements) == order, "max_deviation": 0.0}]
    return ReportRecord(argv, cfg.echo(), results, checks, {"enumerate_s": elapsed}, meta)


def parse_coords(text: str, what: str) -> tuple[Fraction, ...]:
    try:
        return tuple(to_fraction(s.strip()) for s in text.split(","))
    except (ValueError, ZeroDivisionError, TypeError):
        raise ValidationError(f"cannot parse {what} {text!r}; expected comma-separated p/q values") from None


def pairing_row(res: PairingResult, terms: bool = True) -> dict:
    row = {
        "type": res.rs_name,
        "k": res.k,
        "beta": list(res.beta),
        "beta_prime": list(res.beta_prime),
        "conventions": asdict(res.conventions),
        "k_exponent": res.k_exponent,
        "constant": res.constant,
        "constant_sq": res.constant_sq,
        "prefactor": res.prefactor,
        "product_term": res.product_term,
        "product_sq": res.product_sq,
        "weyl_sum": res.weyl_sum,
        "total": res.total,
    }
    if terms:
        row["weyl_terms"] = [
            {"word": list(t.word), "length": t.length, "norm_sq": t.norm_sq, "phase": t.phase}
            for t in res.weyl_terms
        ]
    return row


CSV_COLUMNS = ["beta", "beta_prime", "k", "k_exponent", "prefactor", "product_term",
               "weyl_sum_re", "weyl_sum_im", "total_re", "total_im"]


def pairing_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            " ".join(fraction_str(x) for x in row["beta"]),
            " ".join(fraction_str(x) for x in row["beta_prime"]),
            row["k"],
            row["k_exponent"],
            _float_str(row["prefactor"]),
            _float_str(row["product_term"]),
            _float_str(row["weyl_sum"].real),
            _float_str(row["weyl_sum"].imag),
            _float_str(row["total"].real),
            _float_str(row["total"].imag),
        ])
    return buf.getvalue()


def _pairing_inputs(cfg: RunConfig, rs: RootSystem, args) -> tuple:
    if args.beta and args.lam:
        raise ValidationError("give --beta/--beta-prime or --lam/--lam-prime, not both")
    if args.beta:
        if not args.beta_prime:
            raise ValidationError("--beta needs --beta-prime")
        return parse_coords(args.beta, "beta"), parse_coords(args.beta_prime, "beta-prime")
    if args.lam:
        if not args.lam_prime:
            raise ValidationError("--lam needs --lam-prime")
        lam, lam2 = parse_coords(args.lam, "lam"), parse_coords(args.lam_prime, "lam-prime")
        for v in (lam, lam2):
            if len(v) != rs.rank:
                raise ValidationError(f"{rs.name}: weights need {rs.rank} coordinates")
        return (tuple(x / cfg.k for x in from_weight_coords(rs, lam)),
                tuple(x / cfg.k for x in from_weight_coords(rs, lam2)))
    raise ValidationError("pairing needs --table, --beta/--beta-prime or --lam/--lam-prime")


def cmd_pairing(cfg: RunConfig, argv: list[str], args) -> tuple[ReportRecord, list[dict]]:
    rs = _root_system(cfg)
    meta: dict = {}
    timings: dict = {}
    if args.table:
        pairs = None
    else:
        beta, beta_prime = _pairing_inputs(cfg, rs, args)
        for v in (beta, beta_prime):
            if len(v) != rs.rank:
                raise ValidationError(f"{rs.name}: beta needs {rs.rank} coordinates, got {len(v)}")
        pairs = [(beta, beta_prime)]
    t0 = time.perf_counter()
    elements = _weyl(cfg, rs, meta)
    timings["weyl_s"] = time.perf_counter() - t0
    if pairs is None:
        try:
            pts = enumerate_admissible(rs, cfg.k)
        except AdmissibleLimitExceeded as exc:
            raise ResourceCapError(str(exc)) from None
        pairs = [(p.beta, q.beta) for p in pts for q in pts]
    t0 = time.perf_counter()
    try:
        results = [bks_pairing(rs, elements, cfg.k, b, bp, cfg.conventions) for b, bp in pairs]
    except AdmissibilityError as exc:
        raise ValidationError(str(exc)) from None
    timings["pairing_s"] = time.perf_counter() - t0
    rows = [pairing_row(r, terms=not args.no_terms) for r in results]
    payload: Any = {"rows": rows, "count": len(rows)} if args.table else rows[0]
    return ReportRecord(argv, cfg.echo(), payload, [], timings, meta), rows


def cmd_verify(cfg: RunConfig, argv: list[str], suite: str) -> ReportRecord:
    t0 = time.perf_counter()
    results = run_suite(suite, cfg.seed, cfg.trials)
    elapsed = time.perf_counter() - t0
    checks = [
        {"name": r.name, "passed": r.passed, "trials": r.trials, "max_deviation": r.max_deviation,
         "failure": r.failure, "details": r.details}
        for r in results
    ]
    summary = {"suite": suite, "checks": len(checks), "failed": sum(not c["passed"] for c in checks)}
    return ReportRecord(argv, cfg.echo(), summary, checks, {"verify_s": elapsed})


# -- argument parsing ----------------------------------------------------------


def _common(p: argparse.ArgumentParser, group: bool = True) -> None:
    if group:
        p.add_argument("--type", help="type letter (A..G) or full name such as G2")
        p.add_argument("--rank", type=int)
    p.add_argument("--config", help="flat key=value file; flags take precedence")
    p.add_argument("--cache-dir", help=f"Weyl cache directory (env {CACHE_ENV} also works)")
    p.add_argument("--max-weyl", type=int, help=f"cap on |W| (default {DEFAULT_MAX_SIZE})")
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--output", "-o", dest="out_path", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bkspair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    rs = sub.add_parser("rootsys", help="root-system data").add_subparsers(dest="action", required=True)
    _common(rs.add_parser("info", help="positive roots, highest root, rho, Gram matrix"))

    wy = sub.add_parser("weyl", help="Weyl group").add_subparsers(dest="action", required=True)
    _common(wy.add_parser("enumerate", help="enumerate W (through the cache)"))

    pp = sub.add_parser("pairing", help="evaluate the Weyl-sum pairing")
    _common(pp)
    pp.add_argument("--k", type=int, help="level")
    pp.add_argument("--beta", help="beta in simple-root coordinates, e.g. 1/4,1/4")
    pp.add_argument("--beta-prime")
    pp.add_argument("--lam", help="k*beta in fundamental-weight coordinates, e.g. 1,2")
    pp.add_argument("--lam-prime")
    pp.add_argument("--table", action="store_true", help="all admissible pairs at level k")
    pp.add_argument("--no-terms", action="store_true", help="omit per-w terms")
    pp.add_argument("--haar", choices=HAAR_CONVENTIONS)
    pp.add_argument("--phase-k", dest="phase_k", action="store_const", const=True,
                    help="multiply the phase exponent by k")
    pp.add_argument("--k-power", dest="k_power", choices=K_POWERS)

    vp = sub.add_parser("verify", help="run the randomized and exhaustive verification suites")
    _common(vp, group=False)
    vp.add_argument("--suite", choices=SUITES, default="all")
    vp.add_argument("--trials", type=int)
    vp.add_argument("--seed", type=int)
    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


_UNRECORDED = ("-o", "--output", "--cache-dir")


def recorded_command(argv: list[str]) -> list[str]:
    """argv minus the flags that only say where things are stored."""
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
        elif tok in _UNRECORDED:
            skip = True
        elif not tok.startswith(tuple(f + "=" for f in _UNRECORDED if f.startswith("--"))):
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    argv = recorded_command(argv)
    try:
        cfg = build_config(args)
        if cfg.output == "csv" and not (args.command == "pairing" and args.table):
            raise ValidationError("csv output is only available for pairing --table")
        if args.command == "rootsys":
            report = cmd_rootsys_info(cfg, argv)
        elif args.command == "weyl":
            report = cmd_weyl_enumerate(cfg, argv)
        elif args.command == "pairing":
            report, rows = cmd_pairing(cfg, argv, args)
            if cfg.output == "csv":
                _emit(pairing_csv(rows), args.out_path)
                return EXIT_OK
        else:
            report = cmd_verify(cfg, argv, args.suite)
    except ValidationError as exc:
        print(f"bkspair: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceCapError as exc:
        print(f"bkspair: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    _emit(report.to_json(), args.out_path)
    if not report.passed:
        failed = [c["name"] for c in report.checks if not c["passed"]]
        print(f"bkspair: failed checks: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
