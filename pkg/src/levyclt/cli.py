"""Command-line front end: model ingestion, scans, identity checks, dumps.

Exit codes: 0 success; 1 identity check failed; 2 malformed model document;
3 model validation failure; 4 sampler or scan failure.

A model document is {"gaussian_var": number, "measure": {"family": ...,
"params": {...}}} and may carry an optional "defaults" object with scan
settings (t_min, t_max, points, samples, seed, alpha); command-line flags
override document defaults, which override built-ins.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .errors import (DegenerateModel, InfiniteVariance, InvalidParameter,
                     MalformedDocument)
from .levy_model import log_moment_finite, model_from_dict, total_variance
from .quadrature import (check_I_identities, tail_mass, tail_moment,
                         TailIntegralRequest, x3_identity_pair)
from .sampler import SimPlan, dump_samples, sample_endpoint
from .verify import (ScanConfig, ScanGrid, classify_regime, scan,
                     sigma_deficit_integral)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_MALFORMED = 2
EXIT_INVALID_MODEL = 3
EXIT_SAMPLER = 4

_DOC_DEFAULT_KEYS = {"t_min", "t_max", "points", "samples", "seed", "alpha"}


class _CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load_document(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _CliError(EXIT_MALFORMED, f"cannot read model document: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_MALFORMED, f"invalid JSON: {exc}")
    if not isinstance(doc, dict):
        raise _CliError(EXIT_MALFORMED, "model document must be a JSON object")
    defaults = doc.pop("defaults", {})
    if not isinstance(defaults, dict):
        raise _CliError(EXIT_MALFORMED, "'defaults' must be an object")
    unknown = set(defaults) - _DOC_DEFAULT_KEYS
    if unknown:
        raise _CliError(EXIT_MALFORMED,
                        f"unknown defaults keys: {sorted(unknown)}")
    try:
        model = model_from_dict(doc)
    except MalformedDocument as exc:
        raise _CliError(EXIT_MALFORMED, str(exc))
    except (DegenerateModel, InfiniteVariance, InvalidParameter) as exc:
        raise _CliError(EXIT_INVALID_MODEL, f"model validation failed: {exc}")
    return model, defaults


def _pick(flag_value, defaults, key, builtin):
    if flag_value is not None:
        return flag_value
    if key in defaults:
        return defaults[key]
    return builtin


def _inspect_summary(model):
    verdict = log_moment_finite(model)
    regime = classify_regime(model)
    return {
        "family": model.measure.family,
        "params": model.measure.to_params(),
        "gaussian_var": model.gaussian_var,
        "sigma2": total_variance(model),
        "sigma": math.sqrt(total_variance(model)),
        "sigma1_sq": model.sigma1_sq,
        "kappa": model.kappa,
        "drift": model.drift,
        "log_moment": {"status": verdict.status.value, "value": verdict.value},
        "regime": regime.prediction.value,
    }


def cmd_inspect(args):
    model, _ = _load_document(args.model)
    summary = _inspect_summary(model)
    if args.format == "json":
        print(json.dumps(summary, indent=2))
        return EXIT_OK
    verdict = summary["log_moment"]
    value = "" if verdict["value"] is None else f" (value={verdict['value']:.12g})"
    print(f"family:      {summary['family']}")
    print(f"params:      {summary['params']}")
    print(f"gaussian_var {summary['gaussian_var']:.12g}")
    print(f"sigma^2:     {summary['sigma2']:.12g}")
    print(f"sigma:       {summary['sigma']:.12g}")
    print(f"sigma_1^2:   {summary['sigma1_sq']:.12g}")
    print(f"kappa:       {summary['kappa']}")
    print(f"drift:       {summary['drift']:.12g}")
    print(f"log moment:  {verdict['status']}{value}")
    print(f"regime:      {summary['regime']}")
    return EXIT_OK


def cmd_scan(args):
    model, defaults = _load_document(args.model)
    grid = ScanGrid(t_min=float(_pick(args.t_min, defaults, "t_min", 1.0)),
                    t_max=float(_pick(args.t_max, defaults, "t_max", 1e6)),
                    points=int(_pick(args.points, defaults, "points", 50)))
    n = int(_pick(args.samples, defaults, "samples", 100_000))
    if n < 100:
        raise _CliError(EXIT_INVALID_MODEL, "need at least 100 samples")
    config = ScanConfig(n=n,
                        seed=int(_pick(args.seed, defaults, "seed", 0)),
                        alpha=float(_pick(args.alpha, defaults, "alpha", 0.01)),
                        chunk=args.chunk, workers=args.workers)
    formats = _parse_formats(args.format, {"csv", "json"}, default=("csv", "json"))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        report = scan(model, grid, config)
        if "csv" in formats:
            p = out_dir / "scan.csv"
            p.write_text(report.csv_text())
            written.append(p)
        if "json" in formats:
            p = out_dir / "scan.json"
            p.write_text(report.json_text())
            written.append(p)
    except Exception as exc:
        for p in written:
            p.unlink(missing_ok=True)
        raise _CliError(EXIT_SAMPLER, f"scan failed: {exc}")
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def _check_line(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name} ({detail})")
    return ok


def cmd_identities(args):
    model, _ = _load_document(args.model)
    tol = args.tol
    all_ok = True

    report = check_I_identities(model, tol)
    all_ok &= _check_line(
        "eq_I_triple", report.passed,
        f"values={tuple(f'{v:.10g}' for v in report.values)} "
        f"max_rel_dev={report.max_rel_dev:.3e} tol={tol:g}")

    for t in (1.0, 10.0, 100.0):
        w = model.kappa * math.sqrt(t)
        direct, via_tail = x3_identity_pair(model, w)
        scale = max(abs(direct), abs(via_tail), 1e-300)
        dev = abs(direct - via_tail) / scale
        # same cancellation floor as tail_moment: the nubar route subtracts
        # terms of size w^3 nubar(w), so a zero moment carries that noise
        cancel = w ** 3 * float(model.measure.tail_mass(w))
        ok = abs(direct - via_tail) <= tol * scale + 1e-9 * cancel
        all_ok &= _check_line(f"x3_truncated_identity_w={w:g}", ok,
                              f"direct={direct:.10g} via_tail={via_tail:.10g} "
                              f"rel_dev={dev:.3e}")

    slow = model.measure.slow_log_tail
    windows = [model.kappa * f for f in (0.5, 1.0, 3.0, 10.0, 100.0)]
    worst = 0.0
    for w in windows:
        closed = tail_mass(model, w)
        quad = tail_mass(model, w, method="quadrature")
        worst = max(worst, abs(closed - quad) / max(abs(closed), 1e-300)
                    if closed != quad else 0.0)
    all_ok &= _check_line("tail_mass_closed_vs_quadrature", worst <= tol,
                          f"max_rel_dev={worst:.3e} over {len(windows)} windows")

    if not slow:
        worst = 0.0
        for w in windows:
            req = TailIntegralRequest(2, w, outside=True)
            closed = tail_moment(req, model)
            quad = tail_moment(req, model, method="quadrature")
            worst = max(worst, abs(closed - quad) / max(abs(closed), 1e-300)
                        if closed != quad else 0.0)
        all_ok &= _check_line("x2_outside_closed_vs_quadrature", worst <= tol,
                              f"max_rel_dev={worst:.3e}")
    else:
        print("SKIP x2_outside_closed_vs_quadrature (x^2 tail mass extends "
              "beyond float range; covered by eq_I_triple in log-space)")

    for T in (10.0, 1e3, 1e6):
        d = sigma_deficit_integral(model, T)
        scale = max(abs(d.lhs), abs(d.rhs), 1e-300)
        dev = abs(d.lhs - d.rhs) / scale if d.lhs != d.rhs else 0.0
        ok = dev <= args.deficit_tol
        all_ok &= _check_line(f"sigma_deficit_T={T:g}", ok,
                              f"lhs={d.lhs:.10g} rhs={d.rhs:.10g} "
                              f"rel_dev={dev:.3e} tol={args.deficit_tol:g}")

    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_sample(args):
    model, defaults = _load_document(args.model)
    n = int(_pick(args.samples, defaults, "samples", 100_000))
    if n < 100:
        raise _CliError(EXIT_INVALID_MODEL, "need at least 100 samples")
    seed = int(_pick(args.seed, defaults, "seed", 0))
    fmt = args.format
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / ("samples.bin" if fmt == "bin" else "samples.csv")
    try:
        plan = SimPlan(t=args.t, n=n, seed=seed, chunk=args.chunk)
        values = sample_endpoint(model, plan, workers=args.workers)
        dump_samples(values, path, fmt)
    except Exception as exc:
        path.unlink(missing_ok=True)
        raise _CliError(EXIT_SAMPLER, f"sampling failed: {exc}")
    print(f"wrote {path}")
    return EXIT_OK


def _parse_formats(values, allowed, default):
    if not values:
        return set(default)
    chosen = set()
    for v in values:
        for part in v.split(","):
            part = part.strip()
            if part not in allowed:
                raise _CliError(EXIT_MALFORMED, f"unknown format {part!r}")
            chosen.add(part)
    return chosen


def build_parser():
    parser = argparse.ArgumentParser(
        prog="levyclt",
        description="Gaussian-approximation diagnostics for finite-variance "
                    "Levy processes")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--model", required=True, help="model JSON document")

    p = sub.add_parser("inspect", help="print model scalars and regime")
    add_common(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("scan", help="scan a t-grid and write reports")
    add_common(p)
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", action="append",
                   help="csv and/or json (default both)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk", type=int, default=1 << 14)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("identities",
                       help="run quadrature and Fubini identity checks")
    add_common(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--deficit-tol", type=float, default=1e-5)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("sample", help="dump raw endpoint draws")
    add_common(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("bin", "csv"), default="bin")
    p.add_argument("--out", default=".")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk", type=int, default=1 << 14)
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
