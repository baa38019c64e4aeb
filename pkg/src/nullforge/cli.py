"""Command-line front end.

    nullforge examples
    nullforge curve    --example alpha5 --interval 0:1 --samples 3 --out a5.csv
    nullforge surface  --example f4 --grid 50x50 --out f4.obj
    nullforge verify   --example alpha2 --p 2 --q 1
    nullforge roundtrip --example alpha1 --k "2 + sin(x)"

Exit codes: 0 success, 1 verification failure, 2 usage/config/constraint
error, 3 numerical degeneracy.  Intervals starting with a minus sign need
the ``--interval=-1:1`` spelling.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import CATALOG, Example, build_example
from .errors import (
    ConfigError, ConstraintError, DegenerateMetricError, DegenerateWronskianError,
    EvaluationDomainError, HypothesisError, NullforgeError, ParseError, QuadratureError,
)
from .export import export_json, export_polyline_csv, export_surface_obj, render_polyline_csv
from .expr_dsl import as_fn
from .null_repr import (
    MODES, CurveFn, Repr31Curve, Repr42Curve, ReprData31, ReprData42, forward_e42_curve,
    inverse_e31_data, inverse_e42_data, lemma_residuals, lemma_scales,
)
from .pseudo_euclid import Signature, quadratic_form
from .surfaces import Grid, TranslationSurface, classify_points, verify_minimality

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3
FORMATS = ("csv", "obj", "json")
ROUTES = ("auto", "repr", "closed")
DEGENERACY = (DegenerateWronskianError, DegenerateMetricError, QuadratureError,
              EvaluationDomainError, HypothesisError)
PARAMS = ("p", "q", "r", "s")
PFUNCS = ("P11", "P12", "P21", "P22")


@dataclass
class SceneConfig:
    kind: str = "curve"
    example: str | None = None
    params: dict = field(default_factory=dict)
    P11: str | None = None
    P12: str | None = None
    P21: str | None = None
    P22: str | None = None
    k: str = "1"
    xi0: float = 0.0
    C: float = 0.0
    signature: str | None = None
    interval: list | None = None
    grid: list | None = None
    samples: int | None = None
    tol: float | None = None
    out: str | None = None
    format: str | None = None
    project_drop: int | None = None
    route: str = "auto"
    mode: str = "both"

    @classmethod
    def from_dict(cls, raw: dict) -> SceneConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - names
        if unknown:
            raise ConfigError("unknown config field(s): %s" % ", ".join(sorted(unknown)))
        cfg = cls(**raw)
        if isinstance(cfg.interval, str):
            cfg.interval = parse_intervals(cfg.interval)
        if isinstance(cfg.grid, str):
            cfg.grid = parse_grid(cfg.grid)
        return cfg

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> None:
        if self.samples is not None and self.samples < 2:
            raise ConfigError("--samples must be at least 2")
        if self.grid is not None and (len(self.grid) != 2 or min(self.grid) < 2):
            raise ConfigError("--grid needs two counts of at least 2")
        for lo, hi in self.interval or ():
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo == hi:
                raise ConfigError("degenerate interval %g:%g" % (lo, hi))
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError("unsupported format %r" % self.format)
        if self.route not in ROUTES:
            raise ConfigError("route must be one of %s" % ", ".join(ROUTES))
        if self.mode not in MODES + ("both",):
            raise ConfigError("mode must be standard, alternative or both")


# -- argument parsing ----------------------------------------------------------------

def _real(text: str) -> float:
    """A real number; ``pi`` is allowed, e.g. ``-pi`` or ``pi/2``."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        value = as_fn(text.replace("pi", repr(math.pi)))(0.0)
    except (ParseError, EvaluationDomainError) as exc:
        raise ConfigError("not a real number: %r" % text) from exc
    return float(value)


def parse_intervals(text: str) -> list:
    out = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 2:
            raise ConfigError("interval must look like A:B or A:B,C:D, got %r" % text)
        out.append([_real(bits[0]), _real(bits[1])])
    if len(out) > 2:
        raise ConfigError("at most two intervals")
    return out


def parse_grid(text: str) -> list:
    try:
        n1, n2 = (int(t) for t in text.lower().split("x"))
    except ValueError as exc:
        raise ConfigError("grid must look like NxM, got %r" % text) from exc
    return [n1, n2]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nullforge", description="Null curves and minimal timelike surfaces.")
    parser.add_argument("--version", action="version", version="nullforge " + __version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("examples", help="list catalog examples")
    for name, text in (("curve", "sample a null curve"), ("surface", "sample a translation surface"),
                       ("verify", "run the residual checks"),
                       ("roundtrip", "inverse-then-forward report")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--example", help="catalog name; a surface may also be NAME+NAME")
        for k in PARAMS:
            p.add_argument("--" + k, type=float, help="example parameter " + k)
        for k in PFUNCS:
            p.add_argument("--" + k, metavar="DSL", help="generating function " + k)
        p.add_argument("--k", metavar="DSL", help="nonvanishing factor for the inverse map")
        p.add_argument("--xi0", type=float, help="quadrature base point")
        p.add_argument("--C", type=float, help="integration constant")
        p.add_argument("--signature", choices=("e42", "e31"))
        p.add_argument("--interval", help="A:B or A:B,C:D (pi allowed)")
        p.add_argument("--grid", help="NxM")
        p.add_argument("--samples", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--out")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--project-drop", dest="project_drop", type=int, choices=(1, 2, 3, 4))
        p.add_argument("--route", choices=ROUTES,
                       help="representation formulas, closed form, or auto fallback")
        p.add_argument("--mode", choices=MODES + ("both",), help="inverse-map mode(s)")
        p.add_argument("--config", help="JSON scene config; flags override its fields")
    return parser


def config_from_args(ns: argparse.Namespace) -> SceneConfig:
    raw = {}
    if ns.config:
        try:
            raw = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("cannot read config %s: %s" % (ns.config, exc)) from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    cfg = SceneConfig.from_dict(raw)
    cfg.kind = "surface" if ns.command == "surface" else cfg.kind
    cfg.params = dict(cfg.params)
    for k in PARAMS:
        if getattr(ns, k) is not None:
            cfg.params[k] = getattr(ns, k)
    for name in ("example", "P11", "P12", "P21", "P22", "k", "xi0", "C", "signature",
                 "samples", "tol", "out", "format", "project_drop", "route", "mode"):
        value = getattr(ns, name)
        if value is not None:
            setattr(cfg, name, value)
    if ns.interval is not None:
        cfg.interval = parse_intervals(ns.interval)
    if ns.grid is not None:
        cfg.grid = parse_grid(ns.grid)
    cfg.validate()
    return cfg


# -- building the object -------------------------------------------------------------

@dataclass
class Source:
    """What a command operates on: a curve or a surface, both routes if known."""
    kind: str
    signature: Signature
    interval: tuple
    evaluator: object
    closed: object = None
    symbolic: CurveFn | None = None
    data: object = None
    example: Example | None = None


def _inline_source(cfg: SceneConfig) -> Source:
    sig = Signature.parse(cfg.signature or "e42")
    if sig is Signature.E42:
        missing = [k for k in PFUNCS if getattr(cfg, k) is None]
        if missing:
            raise ConfigError("E42 data needs %s (or --example)" % ", ".join(missing))
        data = ReprData42.from_functions(cfg.P11, cfg.P12, cfg.P21, cfg.P22)
        return Source("curve", sig, (-1.0, 1.0), Repr42Curve(data), symbolic=forward_e42_curve(data),
                      data=data)
    if cfg.P11 is not None:
        raise ConfigError("in e31 P11 comes from quadrature; omit --P11")
    missing = [k for k in PFUNCS[1:] if getattr(cfg, k) is None]
    if missing:
        raise ConfigError("E31 data needs %s (or --example)" % ", ".join(missing))
    data = ReprData31(cfg.P12, cfg.P21, cfg.P22, xi0=cfg.xi0, C=cfg.C)
    return Source("curve", sig, (-1.0, 1.0), Repr31Curve(data), data=data)


def _example_source(cfg: SceneConfig) -> Source:
    if any(getattr(cfg, k) is not None for k in PFUNCS):
        raise ConfigError("give either --example or inline P functions, not both")
    if "+" in cfg.example:
        first, second = cfg.example.split("+", 1)
        if cfg.params:
            raise ConfigError("parameters are not supported for NAME+NAME surfaces")
        g1, g2 = build_example(first.strip()), build_example(second.strip())
        if g1.kind != "curve" or g2.kind != "curve":
            raise ConfigError("NAME+NAME needs two curve examples")
        surface = TranslationSurface(g1.curve, g2.curve)
        closed = TranslationSurface(g1.closed_form, g2.closed_form)
        return Source("surface", surface.signature, g1.interval, surface, closed)
    ex = build_example(cfg.example, **cfg.params)
    if cfg.signature and Signature.parse(cfg.signature) is not ex.signature:
        raise ConfigError("%s lives in %s" % (ex.name, ex.signature.name))
    if ex.kind == "surface":
        return Source("surface", ex.signature, ex.interval, ex.surface, ex.closed_surface,
                      example=ex)
    return Source("curve", ex.signature, ex.interval, ex.curve, ex.closed_form,
                  symbolic=ex.closed_form, data=ex.data, example=ex)


def load_source(cfg: SceneConfig) -> Source:
    src = _example_source(cfg) if cfg.example else _inline_source(cfg)
    if cfg.route == "closed":
        if src.closed is None:
            raise ConfigError("no closed form for inline data")
        src.evaluator = src.closed
    return src


def _evaluate(src: Source, cfg: SceneConfig, fn):
    """Run ``fn(evaluator)``; in auto mode fall back to the closed form on degeneracy."""
    try:
        return fn(src.evaluator)
    except DEGENERACY as exc:
        if cfg.route != "auto" or src.closed is None or src.evaluator is src.closed:
            raise
        _note("representation route unavailable (%s); using the closed form" % exc)
        src.evaluator = src.closed
        return fn(src.evaluator)


def _note(message: str) -> None:
    print("nullforge: " + message, file=sys.stderr)


def _intervals(cfg: SceneConfig, src: Source) -> tuple:
    iv = cfg.interval or [list(src.interval)]
    first = tuple(iv[0])
    return first, tuple(iv[1]) if len(iv) > 1 else first


def _format_for(cfg: SceneConfig) -> str:
    if cfg.format:
        return cfg.format
    ext = Path(cfg.out).suffix.lower().lstrip(".")
    if ext not in FORMATS:
        raise ConfigError("cannot infer the format from %r; pass --format" % cfg.out)
    return ext


# -- commands -----------------------------------------------------------------------

def cmd_examples(cfg, out) -> int:
    for name, entry in CATALOG.items():
        params = " ".join("%s=%g" % kv for kv in entry.defaults.items())
        out.write("%-13s %-8s %s%s\n" % (name, entry.kind, entry.description,
                                         "  [%s]" % params if params else ""))
    return EXIT_OK


def cmd_curve(cfg, out) -> int:
    src = load_source(cfg)
    if src.kind != "curve":
        raise ConfigError("%s is a surface; use the surface command" % cfg.example)
    iv, _ = _intervals(cfg, src)
    xi = np.linspace(iv[0], iv[1], cfg.samples or 50)
    pts = _evaluate(src, cfg, lambda c: np.asarray(c.position(xi), dtype=float))
    if cfg.out is None:
        out.write(render_polyline_csv(xi, pts))
        return EXIT_OK
    fmt = _format_for(cfg)
    if fmt == "csv":
        export_polyline_csv(xi, pts, cfg.out)
    elif fmt == "json":
        export_json({"config": cfg.to_dict(), "kind": "curve", "signature": src.signature.name,
                     "xi": xi, "samples": pts}, cfg.out)
    else:
        raise ConfigError("a curve cannot be written as %s" % fmt)
    out.write("wrote %d samples to %s\n" % (len(xi), cfg.out))
    return EXIT_OK


def cmd_surface(cfg, out) -> int:
    src = load_source(cfg)
    if src.kind != "surface":
        raise ConfigError("%s is a curve; use the curve command" % cfg.example)
    iv1, iv2 = _intervals(cfg, src)
    n1, n2 = cfg.grid or (21, 21)
    grid = Grid.uniform(iv1, n1, iv2, n2)
    pts = _evaluate(src, cfg, lambda s: s.sample(grid))
    if cfg.out is None:
        lo, hi = pts.reshape(-1, pts.shape[-1]).min(axis=0), pts.reshape(-1, pts.shape[-1]).max(axis=0)
        out.write("%dx%d surface in %s, bounds %s .. %s\n"
                  % (n1, n2, src.signature.name, np.round(lo, 6), np.round(hi, 6)))
        return EXIT_OK
    fmt = _format_for(cfg)
    if fmt == "obj":
        export_surface_obj(pts, cfg.out, cfg.project_drop)
    elif fmt == "json":
        export_json({"config": cfg.to_dict(), "kind": "surface", "signature": src.signature.name,
                     "xi1": grid.xi1, "xi2": grid.xi2, "samples": pts}, cfg.out)
    else:
        raise ConfigError("a surface cannot be written as %s" % fmt)
    out.write("wrote %dx%d grid to %s\n" % (n1, n2, cfg.out))
    return EXIT_OK


def _check(out, label: str, value: float, tol: float) -> bool:
    ok = bool(value <= tol)
    out.write("%-28s %.3e  (tol %.1e)  %s\n" % (label, value, tol, "PASS" if ok else "FAIL"))
    return ok


def _verify_curve(cfg, src, out) -> bool:
    tol = cfg.tol if cfg.tol is not None else 1e-10
    iv, _ = _intervals(cfg, src)
    xi = np.linspace(iv[0], iv[1], cfg.samples or 50)
    d = _evaluate(src, cfg, lambda c: np.asarray(c.derivative(xi), dtype=float))
    q = np.abs(quadratic_form(d, src.signature))
    rel = q / np.maximum(1.0, np.sum(d * d, axis=-1))
    ok = _check(out, "max |<b',b'>|", float(q.max()), tol * float(np.maximum(1.0, np.sum(d * d, -1)).max()))
    ok &= _check(out, "max |<b',b'>| relative", float(rel.max()), tol)
    if isinstance(src.data, ReprData42):
        res = 0.0
        for n in (0, 1):
            r1, r2 = lemma_residuals(src.data.p1, src.data.p2, n, xi)
            s1, s2 = lemma_scales(src.data.p1, src.data.p2, n, xi)
            res = max(res, float(np.max(np.abs(r1) / np.maximum(1.0, s1))),
                      float(np.max(np.abs(r2) / np.maximum(1.0, s2))))
        ok &= _check(out, "lemma residual (relative)", res, tol)
    if src.closed is not None and src.evaluator is not src.closed:
        err = float(np.max(np.abs(src.evaluator.position(xi) - src.closed.position(xi))))
        ok &= _check(out, "max |repr - closed form|", err, max(tol, 1e-8))
    return ok


def _verify_surface(cfg, src, out) -> bool:
    tol = cfg.tol if cfg.tol is not None else 1e-8
    iv1, iv2 = _intervals(cfg, src)
    n1, n2 = cfg.grid or (21, 21)
    grid = Grid.uniform(iv1, n1, iv2, n2)
    report = _evaluate(src, cfg, lambda s: verify_minimality(s, grid, tol))
    ok = _check(out, "minimality max |<f_i,f_i>|", report.max_residual, tol)
    flags = classify_points(src.evaluator, grid)
    total = flags.immersed.size
    out.write("immersed points              %d/%d\n" % (int(flags.immersed.sum()), total))
    out.write("<g1, g2> != 0 points         %d/%d\n" % (int(flags.chen_ok.sum()), total))
    out.write("<g1', g2'> != 0 points       %d/%d\n" % (int(flags.tangent_pairing_ok.sum()), total))
    if src.closed is not None and src.evaluator is not src.closed:
        err = float(np.max(np.abs(src.evaluator.sample(grid) - src.closed.sample(grid))))
        ok &= _check(out, "max |repr - closed form|", err, 1e-8)
    return ok


def cmd_verify(cfg, out) -> int:
    src = load_source(cfg)
    ok = _verify_surface(cfg, src, out) if src.kind == "surface" else _verify_curve(cfg, src, out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_roundtrip(cfg, out) -> int:
    src = load_source(cfg)
    if src.kind != "curve":
        raise ConfigError("roundtrip works on curves")
    if src.symbolic is None:
        raise ConfigError("roundtrip needs a symbolic curve (E42 inline data or a catalog curve)")
    tol = cfg.tol if cfg.tol is not None else 1e-8
    iv, _ = _intervals(cfg, src)
    xi = np.linspace(iv[0], iv[1], cfg.samples or 20)
    target = src.symbolic.position(xi)
    ok, degenerate = True, False
    if src.signature is Signature.E31:
        runs = [("e31", lambda: Repr31Curve(inverse_e31_data(src.symbolic, cfg.k, cfg.xi0)))]
    else:
        modes = MODES if cfg.mode == "both" else (cfg.mode,)
        runs = [(m, lambda m=m: Repr42Curve(inverse_e42_data(src.symbolic, cfg.k, m)))
                for m in modes]
    for label, make in runs:
        try:
            err = float(np.max(np.abs(make().position(xi) - target)))
        except DEGENERACY as exc:
            out.write("%-28s degenerate: %s\n" % ("roundtrip " + label, exc))
            degenerate = True
            continue
        ok &= _check(out, "roundtrip " + label, err, tol)
    if not ok:
        return EXIT_FAIL
    return EXIT_DEGENERATE if degenerate else EXIT_OK


COMMANDS = {"examples": cmd_examples, "curve": cmd_curve, "surface": cmd_surface,
            "verify": cmd_verify, "roundtrip": cmd_roundtrip}


def run_command(argv=None, out=None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    out = out or sys.stdout
    try:
        ns = build_parser().parse_args(argv)
        cfg = SceneConfig() if ns.command == "examples" else config_from_args(ns)
        return COMMANDS[ns.command](cfg, out)
    except (ConfigError, ConstraintError, ParseError) as exc:
        _note("error: %s" % exc)
        return EXIT_USAGE
    except DEGENERACY as exc:
        _note("numerical degeneracy: %s" % exc)
        return EXIT_DEGENERATE
    except OSError as exc:
        _note("I/O error: %s" % exc)
        return EXIT_USAGE
    except NullforgeError as exc:
        _note("error: %s" % exc)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_command())
