"""
Experiment plumbing: single runs, method x problem sweeps, CSV traces,
certification reports and log-log rate fits.

Config files are INI text (``configparser``). A single run lives in an
``[experiment]`` section; a sweep in a ``[sweep]`` section::

    [sweep]
    problems = rotation-2, shifted-0.05-2
    methods = AEG, EAG
    iters = 1000
    certify = true
    output_dir = out
    record_every = 1
    workers = 2
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .certify import certify_trace
from .core import InclusionError
from .problems import get_problem
from .schedules import AdmissibilityError, Method
from .solvers import RunConfig, Trace, TraceRow, run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CERT_FAIL = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3

CSV_COLUMNS = ("k", "res_w", "res_nat", "dist", "lyapunov", "bound")


class ConfigError(InclusionError, ValueError):
    """Invalid experiment configuration."""


def parse_vector(text):
    """Parse ``"1,0"``, ``"1 0"`` or ``"[1, 0]"`` into a float vector."""
    if text is None:
        return None
    if not isinstance(text, str):
        return np.asarray(text, dtype=float)
    body = text.strip().strip("[]()")
    parts = [p for p in body.replace(",", " ").split() if p]
    if not parts:
        raise ConfigError(f"empty vector literal {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise ConfigError(f"bad vector literal {text!r}") from None


def _format_vector(x):
    return ",".join(repr(float(v)) for v in x)


@dataclass
class ExperimentConfig:
    problem: str
    method: str
    iters: int = 1000
    step: Optional[float] = None
    x0: Optional[np.ndarray] = None
    certify: bool = False
    output_path: str = "trace.csv"
    record_every: int = 1
    force: bool = False

    def __post_init__(self):
        if isinstance(self.x0, (str, list, tuple)):
            self.x0 = parse_vector(self.x0)

    def validate(self):
        """Resolve names and check ranges; returns ``(method, entry)``."""
        try:
            method = Method.parse(self.method)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        try:
            entry = get_problem(self.problem)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"cannot build problem {self.problem!r}: {exc}") from None
        if not (isinstance(self.iters, int) and self.iters >= 0):
            raise ConfigError(f"iters must be a nonnegative integer, got {self.iters!r}")
        if not (isinstance(self.record_every, int) and self.record_every >= 1):
            raise ConfigError(f"record_every must be a positive integer, got {self.record_every!r}")
        if self.step is not None and not self.step > 0:
            raise ConfigError(f"step must be positive, got {self.step}")
        if self.x0 is not None and np.shape(self.x0) != (entry.spec.dimension,):
            raise ConfigError(
                f"x0 has shape {np.shape(self.x0)}, problem {self.problem} needs "
                f"({entry.spec.dimension},)"
            )
        return method, entry

    def to_ini(self):
        """Canonical text form (one key per line, fixed order)."""
        lines = [
            "[experiment]",
            f"problem = {self.problem}",
            f"method = {Method.parse(self.method).value}",
            f"iters = {self.iters}",
        ]
        if self.step is not None:
            lines.append(f"step = {self.step!r}")
        if self.x0 is not None:
            lines.append(f"x0 = {_format_vector(self.x0)}")
        lines += [
            f"certify = {'true' if self.certify else 'false'}",
            f"output_path = {self.output_path}",
            f"record_every = {self.record_every}",
        ]
        if self.force:
            lines.append("force = true")
        return "\n".join(lines) + "\n"


def _section_to_config(sec, problem=None, method=None, output_path=None):
    try:
        step = sec.getfloat("step", fallback=None)
        return ExperimentConfig(
            problem=problem or sec.get("problem"),
            method=method or sec.get("method"),
            iters=sec.getint("iters", fallback=1000),
            step=step,
            x0=parse_vector(sec.get("x0", fallback=None)),
            certify=sec.getboolean("certify", fallback=False),
            output_path=output_path or sec.get("output_path", fallback="trace.csv"),
            record_every=sec.getint("record_every", fallback=1),
            force=sec.getboolean("force", fallback=False),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _read_ini(path_or_text):
    parser = configparser.ConfigParser()
    try:
        if os.path.exists(path_or_text):
            with open(path_or_text, encoding="utf-8") as fh:
                parser.read_file(fh)
        else:
            parser.read_string(path_or_text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    return parser


def load_config(path_or_text):
    """Read an ``[experiment]`` section into an :class:`ExperimentConfig`."""
    parser = _read_ini(path_or_text)
    if "experiment" not in parser:
        raise ConfigError("config has no [experiment] section")
    sec = parser["experiment"]
    for key in ("problem", "method"):
        if key not in sec:
            raise ConfigError(f"[experiment] is missing {key!r}")
    return _section_to_config(sec)


@dataclass
class SweepConfig:
    problems: list
    methods: list
    template: ExperimentConfig
    output_dir: str = "."
    workers: int = 1

    def runs(self):
        """Expand into per-run configs with disjoint output files."""
        out = []
        for p in self.problems:
            for m in self.methods:
                stem = f"{p}__{Method.parse(m).value}"
                cfg = ExperimentConfig(
                    problem=p, method=m, iters=self.template.iters,
                    step=self.template.step, x0=self.template.x0,
                    certify=self.template.certify,
                    output_path=os.path.join(self.output_dir, stem + ".csv"),
                    record_every=self.template.record_every, force=self.template.force,
                )
                out.append(cfg)
        return out


def _split_list(text):
    return [s.strip() for s in text.replace("\n", ",").split(",") if s.strip()]


def load_sweep(path_or_text):
    parser = _read_ini(path_or_text)
    if "sweep" not in parser:
        raise ConfigError("config has no [sweep] section")
    sec = parser["sweep"]
    problems = _split_list(sec.get("problems", ""))
    methods = _split_list(sec.get("methods", ""))
    if not problems or not methods:
        raise ConfigError("[sweep] needs nonempty 'problems' and 'methods'")
    template = _section_to_config(sec, problem=problems[0], method=methods[0])
    try:
        workers = sec.getint("workers", fallback=1)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return SweepConfig(problems, methods, template,
                       output_dir=sec.get("output_dir", fallback="."), workers=max(1, workers))


# ---------------------------------------------------------------------------
# CSV


def _fmt(v):
    if v is None:
        return ""
    return format(float(v), ".17g")


def format_csv(trace):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in trace.rows:
        writer.writerow([str(int(r.k))] + [_fmt(getattr(r, c)) for c in CSV_COLUMNS[1:]])
    return buf.getvalue()


def emit_csv(trace, path):
    """Write ``trace`` as CSV (17 significant digits, empty cells for missing values)."""
    if not trace.rows:
        raise ValueError("cannot write an empty trace")
    text = format_csv(trace)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def read_csv(path):
    """Inverse of :func:`emit_csv`. Metadata is not stored, so ``meta`` is empty."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        for rec in reader:
            if not rec:
                continue
            vals = [float(v) if v != "" else None for v in rec[1:]]
            rows.append(TraceRow(int(rec[0]), *vals))
    return Trace(rows=rows, meta={"source": str(path)})


# ---------------------------------------------------------------------------
# rates


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    tail_fraction: float
    r_squared: float
    n_points: int = 0


def _series(trace_or_rows, column):
    if isinstance(trace_or_rows, Trace):
        rows = trace_or_rows.rows
    else:
        rows = list(trace_or_rows)
    ks, rs = [], []
    for r in rows:
        if isinstance(r, TraceRow):
            k, v = r.k, getattr(r, column)
        else:
            k, v = r
        if v is None:
            continue
        ks.append(float(k))
        rs.append(float(v))
    return np.array(ks), np.array(rs)


def fit_log_slope(trace_or_rows, tail_fraction=0.5, best_iterate=False, column="res_w"):
    """Least-squares slope of ``log r_k`` against ``log k`` on the tail.

    ``trace_or_rows`` is a :class:`Trace`, a list of rows or ``(k, r)``
    pairs. Row ``k = 0`` is dropped (``log 0``). With ``best_iterate`` the
    running minimum of ``r`` is fitted. If the tail contains an exact zero
    the slope is reported as ``-inf``.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    ks, rs = _series(trace_or_rows, column)
    if best_iterate:
        rs = np.minimum.accumulate(rs)
    keep = ks >= 1
    ks, rs = ks[keep], rs[keep]
    n_tail = int(math.ceil(tail_fraction * ks.size))
    if n_tail < 10:
        raise ValueError(f"need at least 10 points in the tail, have {n_tail}")
    ks, rs = ks[-n_tail:], rs[-n_tail:]
    if np.any(rs < 0) or not np.all(np.isfinite(rs)):
        raise ValueError("residuals must be finite and nonnegative")
    if np.any(rs == 0):
        return RateFit(-math.inf, -math.inf, tail_fraction, 0.0, n_tail)
    lx, ly = np.log(ks), np.log(rs)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(np.sum(resid**2)) / ss_tot)
    return RateFit(float(slope), float(intercept), tail_fraction, min(r2, 1.0), n_tail)


# ---------------------------------------------------------------------------
# runs


@dataclass
class ExperimentResult:
    status: int
    message: str = ""
    trace: Optional[Trace] = None
    report: object = None
    csv_path: Optional[str] = None
    report_path: Optional[str] = None
    files: list = field(default_factory=list)


def report_path_for(csv_path):
    root, _ = os.path.splitext(csv_path)
    return root + ".report.txt"


def run_experiment(config):
    """Run one experiment and write its files.

    Exit status: 0 success, 1 certification failure, 2 configuration
    error (including inadmissible parameters and unwritable paths), 3
    numerical abort.
    """
    try:
        method, entry = config.validate()
    except ConfigError as exc:
        return ExperimentResult(EXIT_CONFIG, str(exc))

    x0 = entry.default_x0 if config.x0 is None else config.x0
    rc = RunConfig(
        max_iters=config.iters, step_override=config.step,
        record_every=config.record_every, certify=config.certify,
        natural_residual=True, force=config.force,
    )
    try:
        trace = run(method, entry.spec, rc, x0)
    except AdmissibilityError as exc:
        return ExperimentResult(EXIT_CONFIG, f"rejected: {exc}")
    except InclusionError as exc:
        return ExperimentResult(EXIT_CONFIG, f"{type(exc).__name__}: {exc}")

    result = ExperimentResult(EXIT_OK, trace=trace)
    out_dir = os.path.dirname(config.output_path)
    try:
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
        result.csv_path = emit_csv(trace, config.output_path)
        result.files.append(result.csv_path)
    except OSError as exc:
        return ExperimentResult(EXIT_CONFIG, f"cannot write {config.output_path}: {exc}", trace=trace)

    if trace.aborted:
        result.status = EXIT_ABORT
        result.message = f"aborted: {trace.meta['aborted']}"

    if config.certify:
        if method in (Method.FBFS, Method.PFBFS):
            result.message = result.message or f"{method.value} has no certificate; trace only"
        else:
            rep = certify_trace(trace)
            result.report = rep
            result.report_path = report_path_for(config.output_path)
            header = (f"method: {method.value}\nproblem: {entry.name}\n"
                      f"step: {trace.meta['step']!r}\niters: {config.iters}\n")
            try:
                with open(result.report_path, "w", encoding="utf-8", newline="") as fh:
                    fh.write(header + rep.render())
            except OSError as exc:
                return ExperimentResult(EXIT_CONFIG, f"cannot write report: {exc}", trace=trace)
            result.files.append(result.report_path)
            if not rep.passed and result.status == EXIT_OK:
                result.status = EXIT_CERT_FAIL
            if not result.message:
                result.message = ", ".join(rep.summary())
    if not result.message:
        last = trace.rows[-1]
        result.message = f"k={last.k} |w|={last.res_w!r}"
    return result


def _run_status(config):
    # module-level so worker processes can pickle it; traces stay in the worker
    res = run_experiment(config)
    return config, res.status, res.message


def run_sweep(sweep, workers=None):
    """Run every (problem, method) pair of ``sweep`` as an independent task.

    Returns a list of ``(config, status, message)`` in sweep order.
    """
    configs = sweep.runs()
    workers = sweep.workers if workers is None else workers
    try:
        os.makedirs(sweep.output_dir, exist_ok=True)
    except OSError as exc:
        return [(c, EXIT_CONFIG, f"cannot create {sweep.output_dir}: {exc}") for c in configs]
    if workers <= 1 or len(configs) <= 1:
        return [_run_status(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_status, configs))


def sweep_status(results):
    """Combined exit status: the worst (largest) individual status."""
    return max((s for _, s, _ in results), default=EXIT_OK)
