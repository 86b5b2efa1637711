"""Command-line front end.

    chentype analyze SPEC [--form II] [--field position] [--kmax 5] [--grid 6x6] ...
    chentype identities SPEC [--grid 5x5] [--no-exclude]
    chentype ruled-report SPEC [--kmax 3]

Exit codes: 0 success, 1 identity or cross-check failure, 2 spec parse error,
3 parabolic surface, 4 configuration error, 5 ruling not normalized.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import io
import json
import logging
import platform
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .beltrami import IDENTITY_TOL, identity_suite
from .errors import (
    ChentypeError,
    ConfigurationError,
    NormalizationError,
    ParabolicPointError,
    SpecParseError,
)
from .finitetype import (
    DEFAULT_KMAX,
    DEFAULT_TOL,
    MAX_ORDER,
    build_iterates,
    dependence_test,
    detector_grid,
    order_budget,
)
from .forms import PARABOLIC_RTOL, connections, fundamental_forms, values
from .ruledsym import (
    QUOTED_ORIENTATION,
    crosscheck_residual,
    degree_trace,
    forms_crosscheck_residual,
    p1_closed_form,
    p1_expansion_discrepancy,
    ruled_invariants,
    vanishing_analysis,
)
from .surfaces import SurfaceSpec, evaluate_chart, load_spec, ruled_curves, sample_grid, validate_ruled_normalization

__all__ = ["RunConfig", "Report", "run", "main", "cmd_analyze", "cmd_identities", "cmd_ruled_report", "EXIT"]

log = logging.getLogger("chentype")

EXIT = {"ok": 0, "failed": 1, "parse": 2, "parabolic": 3, "config": 4, "normalization": 5}
COMMANDS = ("analyze", "identities", "ruled-report")
FORMATS = ("json", "csv", "both")
DEFAULT_GRID = {"analyze": (6, 6), "identities": (5, 5), "ruled-report": (4, 5)}
DEFAULT_BAND = 1e-6
CROSSCHECK_TOL = 1e-9
IDENTITY_ORDER = 6


@dataclass
class RunConfig:
    command: str
    spec_path: str
    form: str = "II"
    field: str = "position"
    kmax: int = DEFAULT_KMAX
    grid: tuple = (6, 6)
    tol: float | None = None
    affine: bool = False
    out: str | None = None
    format: str = "both"
    orientation: int = 1
    exclude_parabolic: bool = True
    parabolic_band: float = DEFAULT_BAND
    s0: float | None = None
    timestamp: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}")
        if self.form not in ("I", "II", "III"):
            raise ConfigurationError(f"--form must be I, II or III, got {self.form!r}")
        if self.field not in ("position", "gauss"):
            raise ConfigurationError(f"--field must be position or gauss, got {self.field!r}")
        if self.kmax < 1:
            raise ConfigurationError("--kmax must be >= 1")
        if self.command == "analyze" and order_budget(self.kmax) > MAX_ORDER:
            raise ConfigurationError(f"--kmax {self.kmax} needs jet order {order_budget(self.kmax)} > {MAX_ORDER}")
        rows, cols = self.grid
        if rows < 2 or cols < 2:
            raise ConfigurationError(f"--grid must be at least 2x2, got {rows}x{cols}")
        if self.tol is not None and not self.tol > 0:
            raise ConfigurationError("--tol must be positive")
        if self.format not in FORMATS:
            raise ConfigurationError(f"--format must be one of {FORMATS}")
        if self.orientation not in (1, -1):
            raise ConfigurationError("--orientation must be 1 or -1")
        if not self.parabolic_band >= 0:
            raise ConfigurationError("--parabolic-band must be non-negative")

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d["grid"] = list(self.grid)
        del d["timestamp"]
        return d


def _encode(v):
    """JSON-safe copy; complex numbers become ``{"re", "im"}`` objects."""
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, dict):
        return {k: _encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


def _decode(v):
    if isinstance(v, dict):
        if set(v) == {"re", "im"}:
            return complex(v["re"], v["im"])
        return {k: _decode(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_decode(x) for x in v]
    return v


@dataclass
class Report:
    """Everything a run produces; ``to_json``/``from_json`` round-trip exactly."""

    command: str
    config: dict
    versions: dict
    spec: str = ""
    timestamp: str | None = None
    verdict: dict | None = None
    residuals: list = field(default_factory=list)
    identities: list | None = None
    symbolic: dict | None = None
    warnings: list = field(default_factory=list)
    exit_code: int = 0
    error: str | None = None

    def to_dict(self) -> dict:
        return _encode(dataclasses.asdict(self))

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(**_decode(d))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def csv_table(self) -> str:
        """The main table: one row per ``k`` (analyze), identity (identities) or trace step (ruled-report)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.command == "identities":
            w.writerow(["name", "residual", "worst_point_s", "worst_point_t", "points"])
            for row in self.identities or []:
                w.writerow([row["name"], repr(row["residual"]), repr(row["worst_point"][0]),
                            repr(row["worst_point"][1]), row["points"]])
        elif self.command == "ruled-report":
            w.writerow(["k", "degree", "exponent", "raw_degree", "raw_exponent", "degree_bound", "remainder"])
            for row in (self.symbolic or {}).get("trace", []):
                w.writerow([row["k"], row["degree"], row["exponent"], row["raw_degree"], row["raw_exponent"],
                            row["degree_bound"], repr(row["remainder"])])
        else:
            w.writerow(["k", "residual", "cumulative"])
            for row in self.residuals:
                w.writerow([row["k"], repr(row["residual"]), repr(row["cumulative"])])
        return buf.getvalue()


def _versions() -> dict:
    return {"chentype": __version__, "numpy": np.__version__, "python": platform.python_version()}


def _new_report(cfg: RunConfig) -> Report:
    ts = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if cfg.timestamp else None
    return Report(cfg.command, cfg.echo(), _versions(), timestamp=ts)


def _load(cfg: RunConfig) -> SurfaceSpec:
    try:
        text = Path(cfg.spec_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecParseError(f"cannot read spec file: {exc.strerror}", cfg.spec_path) from None
    return load_spec(text)


def cmd_analyze(cfg: RunConfig) -> tuple[Report, int]:
    """Finite-type verdict for the chosen form and field."""
    report = _new_report(cfg)
    spec = _load(cfg)
    report.spec = spec.label()
    grid = detector_grid(spec.domain, *cfg.grid)
    tol = DEFAULT_TOL if cfg.tol is None else cfg.tol
    table = build_iterates(spec, cfg.form, cfg.field, grid, cfg.kmax, orientation=cfg.orientation)
    verdict = dependence_test(table, tol=tol, affine=cfg.affine)
    report.residuals = [{"k": k, "residual": r, "cumulative": c}
                        for k, (r, c) in enumerate(zip(verdict.residuals, verdict.cumulative), start=1)]
    report.verdict = {
        "finite": verdict.finite,
        "k": verdict.k,
        "summary": verdict.summary(),
        "min_residual": verdict.min_residual,
        "coefficients": verdict.coefficients,
        "eigenvalues": verdict.eigenvalues,
        "null_type": verdict.null_type,
        "center": verdict.center,
        "samples": len(table.samples),
        "dropped": [list(p) for p in table.dropped],
    }
    report.warnings.extend(verdict.warnings)
    return report, EXIT["ok"]


def _band_excluded(fb_b, band) -> bool:
    B = values(fb_b)
    det = B[0, 0] * B[1, 1] - B[0, 1] ** 2
    return abs(det) < band * float(np.sum(B**2))


def cmd_identities(cfg: RunConfig) -> tuple[Report, int]:
    """Residuals of the identity suite on a grid; exit 0 iff every residual is below ``tol``."""
    report = _new_report(cfg)
    spec = _load(cfg)
    report.spec = spec.label()
    tol = IDENTITY_TOL if cfg.tol is None else cfg.tol
    worst: dict[str, tuple[float, tuple]] = {}
    used, excluded = 0, []
    for p in sample_grid(spec.domain, *cfg.grid):
        x = evaluate_chart(spec, p, IDENTITY_ORDER)
        try:
            fb = fundamental_forms(x, orientation=cfg.orientation)
        except ParabolicPointError:
            if not cfg.exclude_parabolic:
                raise
            excluded.append(list(p))
            continue
        if cfg.exclude_parabolic and _band_excluded(fb.b, max(cfg.parabolic_band, PARABOLIC_RTOL)):
            excluded.append(list(p))
            continue
        cb = connections(x, fb)
        used += 1
        for name, r in identity_suite(fb, cb, x).items():
            if name not in worst or r > worst[name][0]:
                worst[name] = (r, p)
    if excluded:
        report.warnings.append(f"excluded {len(excluded)} sample(s) in the parabolic band: {excluded}")
    if used == 0:
        raise ParabolicPointError("every sample lies in the parabolic band")
    report.identities = [{"name": k, "residual": v[0], "worst_point": list(v[1]), "points": used}
                         for k, v in worst.items()]
    failing = [row["name"] for row in report.identities if not row["residual"] <= tol]
    report.verdict = {"passed": not failing, "tol": tol, "failing": failing, "points": used}
    return report, EXIT["ok"] if not failing else EXIT["failed"]


def cmd_ruled_report(cfg: RunConfig) -> tuple[Report, int]:
    """Degree/exponent trace, P1, the symbolic-numeric cross-check and the non-vanishing witness."""
    report = _new_report(cfg)
    spec = _load(cfg)
    report.spec = spec.label()
    if spec.kind not in ("ruled", "helicoid", "cylinder"):
        raise ConfigurationError(f"ruled-report needs a ruled surface, got kind {spec.kind!r}")
    norm = validate_ruled_normalization(spec)
    if not norm.passed:
        report.symbolic = {"normalization": norm.to_dict()}
        raise NormalizationError(
            f"ruling not normalized: max violation {norm.max_violation:.3e} > {norm.tol:g} "
            f"(orthogonal {norm.orthogonal_violation:.3e}, unit {norm.unit_violation:.3e}, "
            f"speed {norm.speed_violation:.3e})",
            report,
        )
    (a, b), _ = spec.domain
    s0 = 0.5 * (a + b) if cfg.s0 is None else float(cfg.s0)
    gamma, rho = ruled_curves(spec)
    inv = ruled_invariants(gamma, rho, s0, cfg.kmax + 1)
    trace = degree_trace(inv, cfg.kmax, cfg.orientation)
    p1 = p1_closed_form(inv, cfg.orientation)
    grid = sample_grid(spec.domain, *cfg.grid)
    cross = crosscheck_residual(spec, grid, cfg.orientation)
    forms_cross = forms_crosscheck_residual(spec, grid, cfg.orientation)
    expansion = p1_expansion_discrepancy(inv)
    report.symbolic = {
        "s0": s0,
        "normalization": norm.to_dict(),
        "invariants": {k: getattr(inv, k).value for k in ("zeta", "eta", "mu", "nu", "xi", "A")},
        "trace": [{**e, "exponent": str(e["exponent"]), "raw_exponent": str(e["raw_exponent"])} for e in trace],
        "p1": {"degree": p1.degree(), "coefficients": p1.coefficient_table().tolist()},
        "crosscheck_residual": cross,
        "forms_crosscheck_residual": forms_cross,
        "vanishing": vanishing_analysis(inv, cfg.orientation),
        "p1_expansion": expansion,
    }
    report.warnings.append(
        f"Delta^II sign follows the normal orientation {cfg.orientation:+d} * (x_s x x_t); the commonly "
        f"quoted ruled-surface operator corresponds to orientation {QUOTED_ORIENTATION:+d}"
    )
    if not expansion["agree"]:
        report.warnings.append(
            "the expanded-polynomial P1 differs from the bracket form "
            f"(max relative gap {expansion['relative']:.3e}); the bracket form is used"
        )
    ok = cross <= CROSSCHECK_TOL and forms_cross <= CROSSCHECK_TOL
    report.verdict = {"crosscheck_passed": ok, "p1_nonzero": report.symbolic["vanishing"]["p1_nonzero"]}
    return report, EXIT["ok"] if ok else EXIT["failed"]


_HANDLERS = {"analyze": cmd_analyze, "identities": cmd_identities, "ruled-report": cmd_ruled_report}


def run(cfg: RunConfig) -> tuple[Report, int]:
    """Validate, dispatch and map errors onto the exit-code taxonomy."""
    try:
        cfg.validate()
        return _HANDLERS[cfg.command](cfg)
    except SpecParseError as exc:
        code = EXIT["parse"]
        report, msg = None, str(exc)
    except ParabolicPointError as exc:
        code, report, msg = EXIT["parabolic"], None, f"parabolic point: {exc}"
    except ConfigurationError as exc:
        code, report, msg = EXIT["config"], None, str(exc)
    except NormalizationError as exc:
        code, report, msg = EXIT["normalization"], exc.report, str(exc)
    except ChentypeError as exc:
        code, report, msg = EXIT["config"], None, str(exc)
    if report is None:
        report = Report(cfg.command, cfg.echo(), _versions())
    report.exit_code = code
    report.error = msg
    return report, code


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        r, c = text.lower().split("x")
        return int(r), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like RxC, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chentype", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"chentype {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("analyze", "finite-type detection"),
                           ("identities", "identity residual suite"),
                           ("ruled-report", "symbolic report for a ruled surface")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("spec", help="surface spec JSON file")
        p.add_argument("--form", default="II", choices=["I", "II", "III"])
        p.add_argument("--field", default="position", choices=["position", "gauss"])
        p.add_argument("--kmax", type=int, default=DEFAULT_KMAX if name != "ruled-report" else 3)
        p.add_argument("--grid", type=_parse_grid, default=DEFAULT_GRID[name], metavar="RxC")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--affine", action="store_true", help="fit x - x0 with a free centre")
        p.add_argument("--out", default=None, help="output path stem (.json/.csv appended)")
        p.add_argument("--format", default="both", choices=list(FORMATS))
        p.add_argument("--orientation", type=int, default=1, choices=[1, -1])
        p.add_argument("--no-exclude", dest="exclude_parabolic", action="store_false",
                       help="do not skip samples in the parabolic band")
        p.add_argument("--parabolic-band", type=float, default=DEFAULT_BAND)
        p.add_argument("--s0", type=float, default=None, help="base point for ruled-report")
        p.add_argument("--timestamp", action="store_true", help="record the wall-clock time in the report")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _write(report: Report, cfg: RunConfig):
    if cfg.out is None:
        if cfg.format == "csv":
            sys.stdout.write(report.csv_table())
        else:
            sys.stdout.write(report.to_json() + "\n")
        return
    stem = Path(cfg.out)
    if stem.suffix in (".json", ".csv"):
        stem = stem.with_suffix("")
    stem.parent.mkdir(parents=True, exist_ok=True)
    if cfg.format in ("json", "both"):
        stem.with_suffix(".json").write_text(report.to_json() + "\n", encoding="utf-8")
    if cfg.format in ("csv", "both"):
        stem.with_suffix(".csv").write_text(report.csv_table(), encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig(args.command, args.spec, args.form, args.field, args.kmax, tuple(args.grid), args.tol,
                    args.affine, args.out, args.format, args.orientation, args.exclude_parabolic,
                    args.parabolic_band, args.s0, args.timestamp)
    report, code = run(cfg)
    if report.error:
        print(f"error: {report.error}", file=sys.stderr)
    elif report.verdict and "summary" in report.verdict:
        print(report.verdict["summary"], file=sys.stderr)
    _write(report, cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
