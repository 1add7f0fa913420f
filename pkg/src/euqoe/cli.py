"""Command-line front end: ``euqoe efficiency|sweep|protocol|verify``.

Configuration is an INI file with dotted section names, for example::

    [engine]
    omega1 = 1.0
    omega2 = 2.0
    alpha_aH = 0.6

    [sweep]
    axis = alpha_aH
    lo = 0.55
    hi = 0.95
    count = 9

Extra sweep axes go in ``[sweep.2]`` and ``[sweep.3]``.  Any key can be
overridden with ``--set section.key=value``.  Exit codes: 0 success,
2 configuration, 3 numeric failure, 4 infeasible protocol, 5 verification.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import itertools
import json
import math
import os
import re
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .algebra import EntangledParity, InitialState
from .engine import (POSITIVITY_FACTOR, CycleConfig, Dimension, efficiency,
                     efficiency_closed_form, eta0, evaluate_cycle, general_trace, heat_in,
                     heat_out, i1_result, work_total, conservation_residual)
from .errors import ConvergenceError, DomainError, InvalidEngineError
from .protocol import build_protocol, parity_for

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 2, 3, 4, 5
ROW_SCHEMA = "row-v1"

_FLOAT_KEYS = {"omega1", "omega2", "alpha_aH", "aH2", "tau_a", "p"}
SWEEPABLE = ("omega1", "omega2", "alpha_aH", "aH2", "tau_a", "p")

# section -> key -> parser; sweep sections are matched by prefix
_SCHEMA = {
    "engine": {"omega1": float, "omega2": float, "alpha_aH": float, "aH2": float,
               "tau_a": float, "dimension": str},
    "state": {"p": float, "parity": str},
    "sweep": {"axis": str, "lo": float, "hi": float, "count": int, "spacing": str},
    "tol": {"rel": float, "abs": float},
    "cache": {"dir": str},
    "run": {"workers": int, "out": str},
    "verify": {"k_max": float, "panel_order": int},
}

RESULT_COLUMNS = ("I1", "I1_error", "trace_v", "trace_aH", "trace_aC", "trace_aH_error",
                  "W_total", "Q2", "Q4", "conservation_residual", "eta0", "eta_E",
                  "eta_E_closed_form", "eta_E_rel_deviation", "parity", "valid", "message")


class ConfigError(Exception):
    """Configuration problem; the message names the line or override at fault."""


@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    count: int
    spacing: str = "linear"

    def values(self) -> list[float]:
        if self.count == 0:
            return []
        if self.count == 1:
            return [self.lo]
        if self.spacing == "log":
            return [float(v) for v in np.geomspace(self.lo, self.hi, self.count)]
        return [float(v) for v in np.linspace(self.lo, self.hi, self.count)]


@dataclass(frozen=True)
class RunConfig:
    omega1: float = 1.0
    omega2: float = 2.0
    alpha_aH: float = 0.6
    aH2: float = 1.0
    tau_a: float = 1.0
    dimension: str = "1p1"
    p: float = 0.0
    parity: str = "auto"
    axes: tuple[SweepAxis, ...] = ()
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    cache_dir: str | None = None
    workers: int | None = None
    out: str | None = None
    verify_k_max: float | None = None
    verify_panel_order: int = 24

    def point(self, **overrides) -> dict:
        """Physics parameters of one grid point; this is also the cache-key subset."""
        base = {"omega1": self.omega1, "omega2": self.omega2, "alpha_aH": self.alpha_aH,
                "aH2": self.aH2, "tau_a": self.tau_a, "dimension": self.dimension,
                "p": self.p, "parity": self.parity, "rel_tol": self.rel_tol,
                "abs_tol": self.abs_tol}
        base.update(overrides)
        return base

    def grid(self) -> list[dict]:
        """Grid points in lexicographic order of the axes (first axis slowest)."""
        if not self.axes:
            return [self.point()]
        names = [a.name for a in self.axes]
        return [self.point(**dict(zip(names, combo)))
                for combo in itertools.product(*(a.values() for a in self.axes))]


# --- configuration loading -------------------------------------------------------

def _line_index(text: str) -> dict[tuple[str, str], int]:
    where, section = {}, None
    for n, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            continue
        m = re.match(r"\s*([^=:#;\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            where[(section, m.group(1).strip().lower())] = n
    return where


def _schema_for(section: str) -> dict | None:
    if section in _SCHEMA:
        return _SCHEMA[section]
    if re.fullmatch(r"sweep\.[23]", section):
        return _SCHEMA["sweep"]
    return None


def _canonical_key(schema: dict, key: str) -> str | None:
    for name in schema:
        if name.lower() == key.lower():
            return name
    return None


def _collect(sections: dict[str, dict[str, tuple[str, str]]]) -> RunConfig:
    """Turn ``section -> key -> (raw value, where)`` into a validated config."""
    values: dict = {}
    axes: dict[str, dict] = {}
    for section, entries in sections.items():
        schema = _schema_for(section)
        if schema is None:
            where = next(iter(entries.values()))[1] if entries else "config"
            raise ConfigError(f"{where}: unknown section [{section}]")
        for key, (raw, where) in entries.items():
            name = _canonical_key(schema, key)
            if name is None:
                raise ConfigError(f"{where}: unknown key {section}.{key}")
            try:
                val = schema[name](raw.strip())
            except ValueError:
                raise ConfigError(f"{where}: {section}.{name} = {raw!r} is not a valid "
                                  f"{schema[name].__name__}") from None
            if section.startswith("sweep"):
                axes.setdefault(section, {})[name] = (val, where)
            else:
                values[(section, name)] = (val, where)

    def get(section, name, default):
        return values.get((section, name), (default, None))[0]

    cfg = RunConfig(
        omega1=get("engine", "omega1", 1.0), omega2=get("engine", "omega2", 2.0),
        alpha_aH=get("engine", "alpha_aH", 0.6), aH2=get("engine", "aH2", 1.0),
        tau_a=get("engine", "tau_a", 1.0), dimension=get("engine", "dimension", "1p1"),
        p=get("state", "p", 0.0), parity=get("state", "parity", "auto"),
        rel_tol=get("tol", "rel", 1e-8), abs_tol=get("tol", "abs", 1e-12),
        cache_dir=get("cache", "dir", None), workers=get("run", "workers", None),
        out=get("run", "out", None), verify_k_max=get("verify", "k_max", None),
        verify_panel_order=get("verify", "panel_order", 24))
    sweep_axes = []
    for section in sorted(axes):
        spec = axes[section]
        where = next(iter(spec.values()))[1]
        missing = [k for k in ("axis", "lo", "hi", "count") if k not in spec]
        if missing:
            raise ConfigError(f"{where}: [{section}] is missing {', '.join(missing)}")
        name = _canonical_key({k: None for k in SWEEPABLE}, spec["axis"][0])
        if name is None:
            raise ConfigError(f"{spec['axis'][1]}: cannot sweep {spec['axis'][0]!r}; "
                              f"choose one of {', '.join(SWEEPABLE)}")
        spacing = spec.get("spacing", ("linear", None))[0].lower()
        if spacing not in ("linear", "log"):
            raise ConfigError(f"{spec['spacing'][1]}: spacing must be linear or log")
        count = spec["count"][0]
        if count < 0:
            raise ConfigError(f"{spec['count'][1]}: count must be non-negative")
        lo, hi = spec["lo"][0], spec["hi"][0]
        if spacing == "log" and count and not (lo > 0 and hi > 0):
            raise ConfigError(f"{spec['lo'][1]}: log spacing needs positive bounds")
        sweep_axes.append(SweepAxis(name, lo, hi, count, spacing))
    if len({a.name for a in sweep_axes}) != len(sweep_axes):
        raise ConfigError("sweep: the same parameter is swept twice")
    return replace(cfg, axes=tuple(sweep_axes))


def load_config(path: str | None = None, overrides=(), dimension: str | None = None,
                workers: int | None = None, out: str | None = None,
                environ=None) -> RunConfig:
    """Read, merge and validate the configuration; raises :class:`ConfigError`."""
    environ = os.environ if environ is None else environ
    sections: dict[str, dict[str, tuple[str, str]]] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
        parser = configparser.ConfigParser(interpolation=None, strict=True)
        parser.optionxform = str
        try:
            parser.read_string(text, source=str(path))
        except configparser.Error as exc:
            line = getattr(exc, "lineno", None)
            if line is None and getattr(exc, "errors", None):
                line = exc.errors[0][0]
            anchor = f"{path}:{line}" if line else str(path)
            first = str(exc).strip().splitlines()[0]
            raise ConfigError(f"{anchor}: {first}") from None
        lines = _line_index(text)
        for section in parser.sections():
            for key, raw in parser.items(section):
                n = lines.get((section, key.lower()))
                sections.setdefault(section, {})[key] = (raw, f"{path}:{n}" if n else str(path))
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"--set {item}: expected section.key=value")
        dotted, raw = item.split("=", 1)
        section, key = dotted.strip().rsplit(".", 1)
        sections.setdefault(section, {})[key] = (raw, f"--set {item}")
    if dimension is not None:
        sections.setdefault("engine", {})["dimension"] = (dimension, "--dimension")
    if workers is not None:
        sections.setdefault("run", {})["workers"] = (str(workers), "--workers")
    if out is not None:
        sections.setdefault("run", {})["out"] = (out, "--out")
    cfg = _collect(sections)
    if environ.get("EUQOE_CACHE_DIR"):
        cfg = replace(cfg, cache_dir=environ["EUQOE_CACHE_DIR"])
    if cfg.workers is not None and cfg.workers < 1:
        raise ConfigError("run.workers must be at least 1")
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    try:
        Dimension.parse(cfg.dimension)
        if cfg.parity.strip().lower() != "auto":
            EntangledParity.parse(cfg.parity)
        if not (cfg.rel_tol > 0 and cfg.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        for point in cfg.grid():
            _cycle_config(point, _parity_or_default(point))
    except DomainError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from None


def _parity_or_default(point) -> EntangledParity:
    text = point["parity"].strip().lower()
    return EntangledParity.SYMMETRIC if text == "auto" else EntangledParity.parse(text)


def _cycle_config(point: dict, parity: EntangledParity) -> CycleConfig:
    b1, b2 = parity.amplitudes
    state = InitialState(point["p"], b1, b2)
    if point["p"] != 0 and point["alpha_aH"] == 0:
        raise DomainError("mixed states (p > 0) need alpha_aH > 0")
    return CycleConfig(point["omega1"], point["omega2"], point["alpha_aH"], point["aH2"],
                       point["tau_a"], state=state, dimension=point["dimension"],
                       rel_tol=point["rel_tol"], abs_tol=point["abs_tol"])


# --- one result row --------------------------------------------------------------

def compute_row(point: dict) -> dict:
    """Evaluate one grid point.  Numeric failures come back as an invalid row."""
    try:
        return _compute_row(point)
    except (ConvergenceError, ArithmeticError) as exc:
        row = {c: math.nan for c in RESULT_COLUMNS}
        row.update(parity="none", valid=False, message=f"numeric failure: {exc}")
        return row


def _compute_row(point: dict) -> dict:
    cfg0 = _cycle_config(point, EntangledParity.SYMMETRIC)
    i1 = i1_result(cfg0.hot_kinematics, cfg0.omega2, cfg0.tau_a, cfg0.dimension, cfg0.mu,
                   cfg0.rel_tol, cfg0.abs_tol)
    if point["parity"].strip().lower() == "auto":
        parity = parity_for(i1.value, i1.abs_error_estimate)
    else:
        parity = EntangledParity.parse(point["parity"])
    cfg = _cycle_config(point, parity or EntangledParity.SYMMETRIC)
    alphas = {"alpha_v": cfg.alpha_v, "alpha_aH": cfg.alpha_aH, "alpha_aC": cfg.resolved_alpha_aC}
    if cfg.state.p == 0:
        report = evaluate_cycle(cfg, i1)
        traces, errors = report.traces, report.trace_errors
    else:
        parts = {k: general_trace(cfg, cfg.alpha_aH, a) for k, a in alphas.items()}
        traces = {k: g.value for k, g in parts.items()}
        errors = {k: g.cross_channel.abs_error_estimate + g.same_channel.abs_error_estimate
                  for k, g in parts.items()}
    try:
        eta = efficiency(traces, cfg.omega1, cfg.omega2, errors["alpha_aH"])
    except InvalidEngineError:
        eta = math.nan
    closed = efficiency_closed_form(cfg.omega1, cfg.omega2, cfg.alpha_aH)
    positive = all(traces[k] > POSITIVITY_FACTOR * errors[k] for k in traces)
    valid = bool(parity is not None and positive and eta < 1.0)
    message = "" if parity is not None else "degenerate: I1 within its error estimate"
    return {
        "I1": i1.value, "I1_error": i1.abs_error_estimate,
        "trace_v": traces["alpha_v"], "trace_aH": traces["alpha_aH"],
        "trace_aC": traces["alpha_aC"], "trace_aH_error": errors["alpha_aH"],
        "W_total": work_total(cfg, traces["alpha_v"]),
        "Q2": heat_in(cfg, traces["alpha_aH"]), "Q4": heat_out(cfg, traces["alpha_aC"]),
        "conservation_residual": conservation_residual(cfg, traces),
        "eta0": eta0(cfg.omega1, cfg.omega2), "eta_E": eta, "eta_E_closed_form": closed,
        "eta_E_rel_deviation": abs(eta - closed) / closed,
        "parity": parity.value if parity else "degenerate", "valid": valid, "message": message,
    }


# --- cache ------------------------------------------------------------------------

def cache_key(point: dict) -> str:
    canon = {k: (repr(float(v)) if k in _FLOAT_KEYS or k.endswith("_tol") else
                 str(v).strip().lower()) for k, v in point.items()}
    canon["dimension"] = Dimension.parse(point["dimension"]).value
    canon["schema"] = ROW_SCHEMA
    blob = json.dumps(canon, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class RowCache:
    """One JSON file per row, named by its key; writes are atomic renames."""

    def __init__(self, directory: str | None):
        self.dir = Path(directory) if directory else None

    def _path(self, key: str) -> Path:
        return self.dir / key[:2] / f"{key}.json"

    def get(self, key: str) -> dict | None:
        if self.dir is None:
            return None
        try:
            return json.loads(self._path(key).read_text(encoding="utf-8"))
        except (OSError, ValueError):
            return None

    def put(self, key: str, row: dict) -> None:
        if self.dir is None:
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(path, json.dumps(row, sort_keys=True))


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def available_workers() -> int:
    if hasattr(os, "sched_getaffinity"):
        return len(os.sched_getaffinity(0))
    return os.cpu_count() or 1


# --- sweeps -----------------------------------------------------------------------

@dataclass
class SweepOutcome:
    points: list[dict]
    rows: list[dict]
    computed: int = 0
    cached: int = 0
    columns: list[str] = field(default_factory=list)


def run_sweep(cfg: RunConfig) -> SweepOutcome:
    """Evaluate every grid point, reusing cached rows; order is the grid order."""
    points = cfg.grid()
    cache = RowCache(cfg.cache_dir)
    keys = [cache_key(p) for p in points]
    rows: list[dict | None] = [cache.get(k) for k in keys]
    todo = [i for i, r in enumerate(rows) if r is None]
    workers = cfg.workers or available_workers()
    if todo:
        if workers > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                fresh = list(pool.map(compute_row, [points[i] for i in todo]))
        else:
            fresh = [compute_row(points[i]) for i in todo]
        for i, row in zip(todo, fresh):
            rows[i] = row
            cache.put(keys[i], row)
    axis_names = [a.name for a in cfg.axes]
    return SweepOutcome(points, rows, len(todo), len(points) - len(todo),
                        axis_names + list(RESULT_COLUMNS))


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(outcome: SweepOutcome) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(outcome.columns)
    for point, row in zip(outcome.points, outcome.rows):
        merged = {**point, **row}
        writer.writerow([format_value(merged[c]) for c in outcome.columns])
    return buf.getvalue()


def gnuplot_template(csv_name: str, axis: str) -> str:
    return "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{axis}'",
        "set ylabel 'efficiency'",
        f"plot '{csv_name}' using '{axis}':'eta_E' with linespoints, \\",
        f"     '' using '{axis}':'eta_E_closed_form' with lines, \\",
        f"     '' using '{axis}':'eta0' with lines",
        "",
    ])


# --- subcommands --------------------------------------------------------------------

def cmd_efficiency(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    cfg = replace(cfg, axes=())
    outcome = run_sweep(cfg)
    row = outcome.rows[0]
    stdout.write(render_csv(outcome))
    if row["message"].startswith("numeric failure"):
        print(row["message"], file=sys.stderr)
        return EXIT_NUMERIC
    print(f"# eta_E numeric {format_value(row['eta_E'])} closed form "
          f"{format_value(row['eta_E_closed_form'])} relative deviation "
          f"{format_value(row['eta_E_rel_deviation'])}", file=stdout)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if not 1 <= len(cfg.axes) <= 3:
        print("sweep needs one to three axes ([sweep], [sweep.2], [sweep.3])", file=sys.stderr)
        return EXIT_CONFIG
    outcome = run_sweep(cfg)
    text = render_csv(outcome)
    out = Path(cfg.out or "sweep.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(out, text)
    _atomic_write(out.with_suffix(".gp"), gnuplot_template(out.name, cfg.axes[0].name))
    print(f"wrote {out} ({len(outcome.rows)} rows); engine evaluations {outcome.computed}, "
          f"cache hits {outcome.cached}", file=stdout)
    if outcome.rows and all(r["message"].startswith("numeric failure") for r in outcome.rows):
        return EXIT_NUMERIC
    return EXIT_OK


def render_protocol(record) -> str:
    lines = ["[protocol]"]
    for name in ("omega1", "omega2", "alpha_aH", "alpha_aC", "aH2", "tau_a"):
        lines.append(f"{name} = {format_value(getattr(record, name))}")
    lines.append(f"dimension = {record.dimension.value}")
    lines.append(f"parity = {record.parity.value if record.parity else 'degenerate'}")
    sign = "positive" if record.i1 > 0 else "negative" if record.i1 < 0 else "zero"
    lines.append(f"I1 = {format_value(record.i1)}")
    lines.append(f"I1_sign = {sign}")
    lines.append(f"I1_error = {format_value(record.i1_error)}")
    lines.append(f"eta0 = {format_value(record.eta0)}")
    lines.append(f"eta_E = {format_value(record.eta_E)}")
    for k, v in record.traces.items():
        lines.append(f"trace_{k.removeprefix('alpha_')} = {format_value(v)}")
    lines.append(f"conservation_residual = {format_value(record.conservation_residual)}")
    lines.append(f"valid = {format_value(record.valid)}")
    lines.append("")
    lines.append("[checks]")
    for name, ok in record.checks.items():
        lines.append(f"{name} = {'pass' if ok else 'fail'}")
    return "\n".join(lines) + "\n"


def cmd_protocol(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        record = build_protocol(cfg.omega1, cfg.omega2, cfg.alpha_aH, cfg.aH2, cfg.tau_a,
                                cfg.dimension, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol)
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    stdout.write(render_protocol(record))
    return EXIT_OK if record.valid else EXIT_INFEASIBLE


def cmd_verify(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    from .verify import run_suites
    try:
        results = run_suites(cfg)
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    failed = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<14} max deviation {r.deviation:.3e}  tolerance {r.tolerance:.1e}  "
              f"{status}  {r.detail}", file=stdout)
        if not r.passed:
            failed.append(r.name)
    if failed:
        print(f"failed suites: {', '.join(failed)}", file=stdout)
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {"efficiency": cmd_efficiency, "sweep": cmd_sweep, "protocol": cmd_protocol,
            "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="euqoe",
                                 description="Entangled Unruh quantum Otto engine calculator")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", metavar="PATH")
    ap.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                    dest="overrides", help="override a config key, e.g. engine.tau_a=2")
    ap.add_argument("--out", metavar="PATH")
    ap.add_argument("--workers", type=int, metavar="N",
                    help="worker processes for sweeps (default: available CPUs)")
    ap.add_argument("--dimension", choices=["1p1", "1p3"])
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides, args.dimension, args.workers, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return COMMANDS[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
