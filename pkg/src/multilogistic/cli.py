"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 optimizer did not
converge (outputs are still written).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from multilogistic import __version__
from multilogistic.errors import DomainError
from multilogistic.extract import DecompositionConfig, decompose
from multilogistic.io import (
    read_model,
    read_series,
    write_json,
    write_model,
    write_scalogram_csv,
    write_series,
)
from multilogistic.refine import LEAST_SQUARES, MINIMAX, RefineConfig, fit_metrics, refine
from multilogistic.scurve import (
    GompertzParams,
    LogisticWave,
    MultilogisticModel,
    SampledSeries,
    curve_eval,
    sample_curve,
    sample_grid,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOT_CONVERGED = 3

log = logging.getLogger("multilogistic")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g(x: float) -> str:
    return format(float(x), ".6g")


def _say(args, *lines: str) -> None:
    if not args.quiet:
        for line in lines:
            print(line)


def _workers(args) -> int | None:
    if args.threads == "auto":
        return os.cpu_count() or 1
    try:
        n = int(args.threads)
    except ValueError:
        raise UsageError(f"--threads expects an integer or 'auto', got {args.threads!r}") from None
    if n < 1:
        raise UsageError("--threads must be >= 1")
    return n


def _wave_table(m: MultilogisticModel) -> list[str]:
    lines = [f"{'a':>12} {'b':>12} {'y_sat':>14}"]
    lines += [f"{_g(w.a):>12} {_g(w.b):>12} {_g(w.y_sat):>14}" for w in m.waves]
    return lines


def _metrics_lines(rep) -> list[str]:
    return [
        f"max_abs_error {_g(rep.max_abs_error)}",
        f"rmse {_g(rep.rmse)}",
        f"r_squared {_g(rep.r_squared)}",
    ]


def _parse_wave(text: str) -> LogisticWave:
    try:
        a, b, y_sat = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--wave expects 'a,b,y_sat', got {text!r}") from None
    return LogisticWave(a, b, y_sat)


def cmd_generate(args) -> int:
    if args.kind == "gompertz":
        if None in (args.xsat, args.s, args.t0):
            raise UsageError("gompertz needs --xsat, --s and --t0")
        curve = GompertzParams(args.xsat, args.s, args.t0)
    elif args.kind == "logistic":
        if None in (args.a, args.b, args.ysat):
            raise UsageError("logistic needs --a, --b and --ysat")
        curve = LogisticWave(args.a, args.b, args.ysat)
    else:
        waves = [_parse_wave(w) for w in args.wave or []]
        if args.model:
            waves = list(read_model(args.model).waves) + waves
        if not waves:
            raise UsageError("multilogistic needs --model or at least one --wave")
        curve = MultilogisticModel(tuple(waves))
    series = sample_curve(curve, args.t_from, args.t_to, args.step)
    write_series(series, args.out)
    _say(args, f"{len(series)} samples written to {args.out}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    series = read_series(args.input)
    cfg = DecompositionConfig(
        max_waves=args.max_waves,
        min_saturation_fraction=args.min_saturation_fraction,
        voices_per_octave=args.voices,
        min_scale=args.min_scale,
        max_scale=args.max_scale,
        workers=_workers(args),
    )
    model, trace = decompose(series, cfg)
    if args.trace_out:
        write_json(trace.to_dict(), args.trace_out)
    if args.scalogram_dir:
        out = Path(args.scalogram_dir)
        out.mkdir(parents=True, exist_ok=True)
        for it in trace.iterations:
            write_scalogram_csv(it.scalogram, out / f"{it.scalogram_id}.csv")
    if not model.waves:
        print("no admissible waves", file=sys.stderr)
        return EXIT_DATA
    write_model(model, args.model_out, source=str(args.input))
    _say(args, *_wave_table(model))
    return EXIT_OK


def cmd_refine(args) -> int:
    series = read_series(args.input)
    m0 = read_model(args.model)
    if not m0.waves:
        raise DomainError("model file has no waves")
    for w in m0.waves:
        if not series.t[0] <= w.b <= series.t[-1]:
            log.warning("wave centered at b=%s lies outside the series span [%s, %s]", w.b, series.t[0], series.t[-1])
    cfg = RefineConfig(
        objective=args.objective,
        max_evaluations=args.max_evaluations,
        restarts=args.restarts,
        seed=args.seed,
    )
    model, report = refine(series, m0, cfg)
    write_model(model, args.out, source=str(args.input))
    if args.report:
        write_json(report.to_dict(), args.report)
    _say(args, *_wave_table(model), *_metrics_lines(report))
    if not report.converged:
        print("warning: evaluation budget exhausted before convergence", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_eval(args) -> int:
    model = read_model(args.model)
    if not model.waves:
        raise DomainError("model file has no waves")
    if args.against:
        ref = read_series(args.against)
        f = curve_eval(model, ref.t)
        write_series(SampledSeries(ref.t, f), args.out, extra={"residual": ref.y - f})
        rep = fit_metrics(ref, model)
        _say(args, *_metrics_lines(rep))
    else:
        if None in (args.t_from, args.t_to):
            raise UsageError("eval needs --from and --to, or --against")
        t = sample_grid(args.t_from, args.t_to, args.step)
        write_series(SampledSeries(t, curve_eval(model, t)), args.out)
        _say(args, f"{len(t)} samples written to {args.out}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    series = read_series(args.input)
    model = read_model(args.model)
    if not model.waves:
        raise DomainError("model file has no waves")
    rep = fit_metrics(series, model)
    if args.out:
        write_json(rep.to_dict(), args.out)
    _say(args, *_metrics_lines(rep))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands must not reset flags given before the verb
        dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g = _Parser(add_help=False)
        g.add_argument("--seed", type=int, default=dflt(0), help="seed for optimizer restarts")
        g.add_argument("--threads", default=dflt("1"), help="worker threads for scalograms, or 'auto'")
        g.add_argument("--quiet", action="store_true", default=dflt(False))
        return g

    common = global_flags(suppress=True)
    p = _Parser(prog="multilogistic", description=__doc__.splitlines()[0], parents=[global_flags(False)])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", parents=[common], help="sample a curve to CSV")
    g.add_argument("kind", choices=["gompertz", "logistic", "multilogistic"])
    g.add_argument("--xsat", type=float)
    g.add_argument("--s", type=float)
    g.add_argument("--t0", type=float)
    g.add_argument("--a", type=float)
    g.add_argument("--b", type=float)
    g.add_argument("--ysat", type=float)
    g.add_argument("--wave", action="append", help="a,b,y_sat (repeatable)")
    g.add_argument("--model", help="model JSON to sample")
    g.add_argument("--from", dest="t_from", type=float, required=True)
    g.add_argument("--to", dest="t_to", type=float, required=True)
    g.add_argument("--step", type=float, default=1.0)
    g.add_argument("--out", "-o", required=True)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("decompose", parents=[common], help="extract logistic waves from a series")
    d.add_argument("input")
    d.add_argument("--model-out", "-o", required=True)
    d.add_argument("--trace-out")
    d.add_argument("--scalogram-dir", help="write one scalogram CSV per pass here")
    d.add_argument("--max-waves", type=int, default=3)
    d.add_argument("--min-saturation-fraction", type=float, default=0.02)
    d.add_argument("--voices", type=int, default=16, help="scales per octave")
    d.add_argument("--min-scale", type=float, default=1.0)
    d.add_argument("--max-scale", type=float)
    d.set_defaults(func=cmd_decompose)

    r = sub.add_parser("refine", parents=[common], help="optimize a model against a series")
    r.add_argument("input")
    r.add_argument("--model", "-m", required=True)
    r.add_argument("--objective", choices=[MINIMAX, LEAST_SQUARES], default=MINIMAX)
    r.add_argument("--max-evaluations", type=int, default=20000)
    r.add_argument("--restarts", type=int, default=3)
    r.add_argument("--out", "-o", required=True)
    r.add_argument("--report", help="write the fit report as JSON")
    r.set_defaults(func=cmd_refine)

    e = sub.add_parser("eval", parents=[common], help="sample a model, optionally against a series")
    e.add_argument("--model", "-m", required=True)
    e.add_argument("--from", dest="t_from", type=float)
    e.add_argument("--to", dest="t_to", type=float)
    e.add_argument("--step", type=float, default=1.0)
    e.add_argument("--against", help="series CSV; adds a residual column")
    e.add_argument("--out", "-o", required=True)
    e.set_defaults(func=cmd_eval)

    mt = sub.add_parser("metrics", parents=[common], help="fit metrics of a model against a series")
    mt.add_argument("input")
    mt.add_argument("--model", "-m", required=True)
    mt.add_argument("--out", "-o")
    mt.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
