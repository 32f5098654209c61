"""Command-line experiment runner.

    quarticsum count      --p 3 --range zero --n-min 16 --n-max 128 --n-steps 4 --t4 "N^3"
    quarticsum moment     --p 3 --n-min 8 --n-max 64 --n-steps 4
    quarticsum fit        --samples 16:4096,32:32768
    quarticsum btransform --alpha 0.3 --n-min 256 --n-max 1024 --n-steps 3
    quarticsum weyl       --k 8 --n-min 10 --alpha 1/3
    quarticsum report     --seed 0

Exit codes: 0 success, 1 I/O error, 2 invalid parameters, 3 budget refusal.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from . import __version__
from .diophantine import BoxQuery, count_bruteforce, count_spectral, fejer_hat, fejer_weighted_count
from .errors import BudgetExceeded, ParameterError
from .expsum import DEFAULT_SPECTRUM_BUDGET, IntRange, build_spectrum
from .moments import (
    DEFAULT_GRID_BUDGET,
    MomentQuery,
    exponent_closed_form,
    exponent_recurrence,
    fit_exponent,
    moment_exact,
    moment_quadrature,
    quadrature_grid,
)
from .stationary_phase import SmoothPhase, b_transform_residual, residual_envelope
from .weyl import (
    best_rational,
    heathbrown_bounds,
    leading_coefficient,
    near_integer_count,
    symmetric_differences,
    theorem4_report,
)

SCHEMA_VERSION = 1
SUBCOMMANDS = ("count", "moment", "fit", "btransform", "weyl", "report")

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class ExperimentConfig:
    subcommand: str
    p: int = 3
    n_min: int = 8
    n_max: int | None = None
    n_steps: int = 1
    range_kind: str = "dyadic"  # "dyadic" -> (N, 2N], "zero" -> [0, N]
    t2: str = "0"
    t4: str = "0"
    method: str | None = None
    alpha: str = "0"
    gamma: str = "0"
    lam: str = "N^-3"
    window: str = "sym"
    safety: float = 1.0
    normalization: str = "sqrt"
    k: int = 8
    epsilon: float = 0.01
    samples: str | None = None
    target: str = "samples"
    seed: int = 0
    budget: int | None = None
    fmt: str = "json"
    out: str = "-"
    timings: bool = False

    def n_grid(self) -> list[int]:
        return geometric_grid(self.n_min, self.n_max if self.n_max is not None else self.n_min, self.n_steps)


@dataclass
class ExperimentReport:
    tool_version: str
    config: dict
    rows: list[dict] = field(default_factory=list)
    timings: list[float] = field(default_factory=list)
    verdicts: dict[str, bool] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# parsing


_NPOW = re.compile(r"^\s*(?:([0-9./eE+-]+)\s*\*\s*)?N\s*\^\s*(-?\d+)\s*$")


def parse_scaled(text: str, N: int) -> Fraction:
    """Parse "a/b", a decimal, or "[c*]N^e" evaluated at N, exactly."""
    m = _NPOW.match(text)
    try:
        if m:
            coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            return coef * Fraction(N) ** int(m.group(2))
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse {text!r}") from exc


def parse_alpha(text: str):
    """A decimal becomes a float, "a/q" stays an exact Fraction."""
    try:
        if "/" in text:
            return Fraction(text.strip())
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse alpha {text!r}") from exc


def geometric_grid(n_min: int, n_max: int, steps: int) -> list[int]:
    if n_min < 1 or n_max < n_min or steps < 1:
        raise ParameterError("need 1 <= n_min <= n_max and n_steps >= 1")
    if steps == 1:
        return [n_min]
    ratio = n_max / n_min
    out = []
    for i in range(steps):
        v = round(n_min * ratio ** (i / (steps - 1)))
        if v not in out:
            out.append(v)
    return out


def _range(cfg: ExperimentConfig, N: int) -> IntRange:
    if cfg.range_kind == "dyadic":
        return IntRange.dyadic(N)
    if cfg.range_kind == "zero":
        return IntRange.closed(0, N)
    raise ParameterError(f"unknown range kind {cfg.range_kind!r}")


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# validation (cheap, runs before any heavy work)


def validate(cfg: ExperimentConfig) -> None:
    if cfg.subcommand not in SUBCOMMANDS:
        raise ParameterError(f"unknown subcommand {cfg.subcommand!r}")
    if cfg.fmt not in ("csv", "json"):
        raise ParameterError("format must be csv or json")
    if cfg.subcommand in ("count", "moment") and not 1 <= cfg.p <= 5:
        raise ParameterError("p must be in 1..5")
    if cfg.subcommand == "fit":
        if cfg.target == "samples" and not cfg.samples:
            raise ParameterError("fit needs --samples or a --target")
        if cfg.target not in ("samples", "integral_I", "count"):
            raise ParameterError(f"unknown fit target {cfg.target!r}")
        if cfg.target == "samples":
            _parse_samples(cfg.samples)
            return
    grid = cfg.n_grid()
    if cfg.subcommand == "count":
        method = cfg.method or "spectral"
        if method not in ("spectral", "bruteforce"):
            raise ParameterError("count method must be spectral or bruteforce")
        for N in grid:
            rng = _range(cfg, N)
            parse_scaled(cfg.t2, N), parse_scaled(cfg.t4, N)
            if method == "spectral":
                need, cap = rng.length**cfg.p, cfg.budget or DEFAULT_SPECTRUM_BUDGET
            else:
                need, cap = rng.length ** (2 * cfg.p), cfg.budget or 10**8
            if need > cap:
                raise BudgetExceeded(f"{method} count at N={N}", need, cap)
    elif cfg.subcommand == "moment" or (cfg.subcommand == "fit" and cfg.target == "integral_I"):
        method = cfg.method or "exact"
        if method not in ("exact", "quadrature"):
            raise ParameterError("moment method must be exact or quadrature")
        if cfg.window not in ("sym", "pos"):
            raise ParameterError("window must be sym or pos")
        for N in grid:
            q = _moment_query(cfg, N)
            if method == "exact":
                need, cap = q.range.length**q.p, cfg.budget or DEFAULT_SPECTRUM_BUDGET
            else:
                ma, mg = quadrature_grid(q, cfg.safety)
                need, cap = ma * mg, cfg.budget or DEFAULT_GRID_BUDGET
            if need > cap:
                raise BudgetExceeded(f"moment at N={N}", need, cap)
    elif cfg.subcommand == "fit" and cfg.target == "count":
        for N in grid:
            need, cap = _range(cfg, N).length ** cfg.p, cfg.budget or DEFAULT_SPECTRUM_BUDGET
            if need > cap:
                raise BudgetExceeded(f"count at N={N}", need, cap)
    elif cfg.subcommand == "btransform":
        if cfg.normalization not in ("sqrt", "linear"):
            raise ParameterError("normalization must be sqrt or linear")
        a, g = float(parse_alpha(cfg.alpha)), float(parse_alpha(cfg.gamma))
        for N in grid:
            SmoothPhase(a, g, N)
    elif cfg.subcommand == "weyl":
        if cfg.k < 8:
            raise ParameterError("weyl needs k >= 8")
        parse_alpha(cfg.alpha)
        if min(grid) < 2:
            raise ParameterError("weyl needs N >= 2")


def _moment_query(cfg: ExperimentConfig, N: int) -> MomentQuery:
    lam = float(parse_scaled(cfg.lam, N))
    if lam < 0:
        raise ParameterError("lambda must be nonnegative")
    gamma = (-lam, lam) if cfg.window == "sym" else (0.0, lam)
    return MomentQuery(cfg.p, _range(cfg, N), (0.0, 1.0), gamma)


def _parse_samples(text: str) -> list[tuple[float, float]]:
    out = []
    try:
        for item in text.split(","):
            x, y = item.split(":")
            out.append((float(x), float(y)))
    except ValueError as exc:
        raise ParameterError(f"bad --samples {text!r}; expected x:y,x:y") from exc
    return out


# --------------------------------------------------------------------------
# subcommands


def _timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def _run_count(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    method = cfg.method or "spectral"
    for N in cfg.n_grid():
        q = BoxQuery(cfg.p, _range(cfg, N), parse_scaled(cfg.t2, N), parse_scaled(cfg.t4, N))
        if method == "spectral":
            res, dt = _timed(count_spectral, q, cfg.budget or DEFAULT_SPECTRUM_BUDGET)
        else:
            res, dt = _timed(count_bruteforce, q, cfg.budget or 10**8)
        report.rows.append(
            {
                "N": N,
                "p": cfg.p,
                "range": cfg.range_kind,
                "t2": _fmt_fraction(q.t2),
                "t4": _fmt_fraction(q.t4),
                "count": res.count,
                "log_count": math.log(res.count) if res.count > 0 else float("-inf"),
                "method": res.method,
            }
        )
        report.timings.append(dt)


def _moment_rows(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    method = cfg.method or "exact"
    for N in cfg.n_grid():
        q = _moment_query(cfg, N)
        if method == "exact":
            res, dt = _timed(moment_exact, q, cfg.budget or DEFAULT_SPECTRUM_BUDGET)
        else:
            res, dt = _timed(moment_quadrature, q, cfg.safety, cfg.budget or DEFAULT_GRID_BUDGET)
        report.rows.append(
            {
                "N": N,
                "value": res.value,
                "log_value": math.log(res.value) if res.value > 0 else float("-inf"),
                "p": cfg.p,
                "gamma_lo": q.gamma_interval[0],
                "gamma_hi": q.gamma_interval[1],
                "method": res.method,
                "error_estimate": res.error_estimate,
            }
        )
        report.timings.append(dt)


def _run_fit(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    if cfg.target == "samples":
        samples = _parse_samples(cfg.samples)
    else:
        inner = ExperimentReport(report.tool_version, {})
        if cfg.target == "integral_I":
            _moment_rows(cfg, inner)
            samples = [(r["N"], r["value"]) for r in inner.rows]
        else:
            _run_count(cfg, inner)
            samples = [(r["N"], r["count"]) for r in inner.rows]
        report.timings.extend(inner.timings)
    slope, intercept, resid = fit_exponent(samples)
    report.rows.append(
        {
            "target": cfg.target,
            "n_samples": len(samples),
            "slope": slope,
            "intercept": intercept,
            "residual": resid,
        }
    )
    report.summary["samples"] = [list(s) for s in samples]


def _run_btransform(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    a, g = float(parse_alpha(cfg.alpha)), float(parse_alpha(cfg.gamma))
    for N in cfg.n_grid():
        ph = SmoothPhase(a, g, N)
        (lhs, rhs, res), dt = _timed(b_transform_residual, ph, cfg.normalization)
        env = residual_envelope(N, ph.lambda2)
        report.rows.append(
            {
                "N": N,
                "alpha": a,
                "gamma": g,
                "lambda2": ph.lambda2,
                "lhs_re": lhs.real,
                "lhs_im": lhs.imag,
                "rhs_re": rhs.real,
                "rhs_im": rhs.imag,
                "residual": res,
                "envelope": env,
                "normalization": cfg.normalization,
            }
        )
        report.timings.append(dt)


def _run_weyl(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    alpha = parse_alpha(cfg.alpha)
    for N in cfg.n_grid():
        rep, dt = _timed(theorem4_report, cfg.k, N, alpha, cfg.epsilon)
        report.rows.append(rep.as_row())
        report.timings.append(dt)


def _run_report(cfg: ExperimentConfig, report: ExperimentReport) -> None:
    """A quick battery of the exactly assertable checks, seeded."""
    rnd = random.Random(cfg.seed)

    def add(name: str, ok: bool, **extra):
        report.rows.append({"check": name, "passed": ok, **extra})
        report.verdicts[name] = ok

    # spectral counter against brute force
    mismatches = 0
    for p in (1, 2, 3):
        L = rnd.randint(3, 6)
        rng = IntRange(rnd.randint(0, 6), 0)
        rng = IntRange(rng.lo, rng.lo + L)
        spec = build_spectrum(rng, p)
        for _ in range(5):
            t2 = Fraction(rnd.randint(0, 40), rnd.randint(1, 4))
            t4 = Fraction(rnd.randint(0, 4000), rnd.randint(1, 4))
            q = BoxQuery(p, rng, t2, t4)
            if count_spectral(q, spectrum=spec).count != count_bruteforce(q).count:
                mismatches += 1
    add("oracle_equivalence", mismatches == 0, mismatches=mismatches)

    # Parseval on the unit square
    worst = 0.0
    for p in (1, 2, 3):
        rng = IntRange.dyadic(rnd.randint(3, 8))
        m = moment_exact(MomentQuery(p, rng)).value
        c = count_spectral(BoxQuery(p, rng)).count
        worst = max(worst, abs(m - c) / c)
    add("parseval", worst <= 1e-6, worst_relative_error=worst)

    # near-integer count bounds from a rational approximation
    viol = 0
    for _ in range(200):
        a, H, d = rnd.random(), rnd.randint(1, 2000), rnd.random() * 0.2
        r = best_rational(a, H)
        B = near_integer_count(a, H, d)
        b1, b2 = heathbrown_bounds(r, H, d)
        viol += B > b1 or (b2 is not None and B > b2)
    add("near_integer_bounds", viol == 0, violations=viol)

    # leading coefficient of iterated symmetric differences
    bad = 0
    for k in (8, 9, 10):
        h = [rnd.choice([-1, 1]) * rnd.randint(1, 9) for _ in range(k - 4)]
        alpha = Fraction(rnd.randint(1, 50), rnd.randint(1, 50))
        c = symmetric_differences(k, k - 4, h, alpha)
        bad += c[4] != leading_coefficient(k, k - 4, h, alpha)
    add("difference_coefficient", bad == 0, failures=bad)

    # Fejer transform values and the integer-spectrum sandwich
    rng = IntRange.dyadic(4)
    ok = float(fejer_hat(0.0)) == 1.0 and float(fejer_hat(1.0)) == 0.0 and float(fejer_hat(-1.0)) == 0.0
    ok = ok and fejer_weighted_count(BoxQuery(2, rng), 1.0, 1.0) == count_spectral(BoxQuery(2, rng)).count
    add("fejer_facts", ok)

    rec = abs(exponent_recurrence(3.0, 4) - exponent_closed_form(3.0, 4))
    add("exponent_recurrence", rec <= 1e-12, error=rec)


RUNNERS = {
    "count": _run_count,
    "moment": _moment_rows,
    "fit": _run_fit,
    "btransform": _run_btransform,
    "weyl": _run_weyl,
    "report": _run_report,
}


# --------------------------------------------------------------------------
# output


def _jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return _fmt_fraction(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def to_json(report: ExperimentReport) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": report.tool_version,
        "config": report.config,
        "rows": [{k: _jsonable(v) for k, v in r.items()} for r in report.rows],
        "timings": report.timings,
        "verdicts": report.verdicts,
    }
    if report.summary:
        doc["summary"] = report.summary
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return _fmt_fraction(v)
    return str(v)


def emit_plot_data(report: ExperimentReport) -> str:
    """Tidy CSV: header row, one observation per line, LF endings."""
    if not report.rows:
        raise ParameterError("report has no rows")
    header: list[str] = []
    for r in report.rows:
        for k in r:
            if k not in header:
                header.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in report.rows:
        w.writerow([_cell(r[k]) if k in r else "" for k in header])
    return buf.getvalue()


def parse_plot_data(text: str) -> list[dict]:
    """Inverse of ``emit_plot_data`` for numeric and boolean cells."""

    def conv(s: str):
        if s in ("true", "false"):
            return s == "true"
        for cast in (int, float):
            try:
                return cast(s)
            except ValueError:
                pass
        return s

    return [{k: conv(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


# --------------------------------------------------------------------------
# entry points


def run(cfg: ExperimentConfig) -> ExperimentReport:
    """Validate, execute the grid in order, write the output, return the report."""
    validate(cfg)
    echoed = {k: v for k, v in asdict(cfg).items() if k not in ("out", "timings")}
    report = ExperimentReport(__version__, echoed)
    RUNNERS[cfg.subcommand](cfg, report)
    if not cfg.timings:
        # wall-clock times would break byte-identical reruns
        report.timings = []
    text = emit_plot_data(report) if cfg.fmt == "csv" else to_json(report)
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quarticsum", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--p", type=int, default=3)
        sp.add_argument("--n-min", type=int, default=8)
        sp.add_argument("--n-max", type=int, default=None)
        sp.add_argument("--n-steps", type=int, default=1, help="geometric grid size")
        sp.add_argument("--range", dest="range_kind", choices=("dyadic", "zero"), default="dyadic")
        sp.add_argument("--t2", default="0", help='rational, or "[c*]N^e"')
        sp.add_argument("--t4", default="0", help='rational, or "[c*]N^e"')
        sp.add_argument("--method", default=None)
        sp.add_argument("--alpha", default="0", help='decimal or "a/q"')
        sp.add_argument("--gamma", default="0")
        sp.add_argument("--lambda", dest="lam", default="N^-3")
        sp.add_argument("--window", choices=("sym", "pos"), default="sym")
        sp.add_argument("--safety", type=float, default=1.0)
        sp.add_argument("--normalization", choices=("sqrt", "linear"), default="sqrt")
        sp.add_argument("--k", type=int, default=8)
        sp.add_argument("--epsilon", type=float, default=0.01)
        sp.add_argument("--samples", default=None, help="x:y,x:y,...")
        sp.add_argument("--target", choices=("samples", "integral_I", "count"), default="samples")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=None)
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"), default="json")
        sp.add_argument("--out", default="-")
        sp.add_argument("--timings", action="store_true", help="record wall-clock per row")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = ExperimentConfig(**vars(args))
    try:
        run(cfg)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
