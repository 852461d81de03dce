"""Command-line entry point.

Subcommands: ``decompose``, ``forecast``, ``cv``, ``auth-sim``, ``synth``.
Exit status is 0 on success, 1 on a usage error and 2 on a data or fitting
error. CSV results go to ``--output`` (or stdout when it is omitted); a
short human-readable summary is printed when ``--output`` is given.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from .authenticator import TePolicy
from .data_io import SynthSpec, fmt, forecast_csv, load_recording, synth, write_recordings
from .decomposer import FitConfig, evaluate_components, fit, predict, predict_at
from .errors import BehaviorAuthError
from .evaluation import auth_simulate, cross_validate
from .series import split_at

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

_FIT_FIELDS = {f.name: f for f in dataclasses.fields(FitConfig)}
_TE_FIELDS = {f.name: f for f in dataclasses.fields(TePolicy)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _period(text):
    low = text.strip().lower()
    if low == "auto":
        return "auto"
    if low in ("none", "off"):
        return None
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("period must be > 0")
    return value


def _coerce(name, raw):
    raw = raw.strip()
    if name == "period":
        return _period(raw)
    if name == "trend_kind":
        return raw
    if name in ("fourier_order", "n_changepoints", "min_window_samples"):
        return int(raw)
    return float(raw)


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, raw = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _FIT_FIELDS and key not in _TE_FIELDS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _coerce(key, raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def _settings(args):
    values = read_config_file(args.config) if args.config else {}
    if args.period is not None:
        values["period"] = args.period
    if args.fourier_order is not None:
        values["fourier_order"] = args.fourier_order
    if args.level is not None:
        values["interval_level"] = args.level
    fit_kw = {k: v for k, v in values.items() if k in _FIT_FIELDS}
    te_kw = {k: v for k, v in values.items() if k in _TE_FIELDS}
    try:
        return FitConfig(**fit_kw), te_kw
    except BehaviorAuthError as exc:
        raise UsageError(str(exc)) from None


def _select_series(args):
    recordings = load_recording(args.input)
    for rec in recordings:
        if args.action and rec.action != args.action:
            continue
        if args.subject and rec.subject_id != args.subject:
            continue
        if args.recording and rec.recording_id != args.recording:
            continue
        return rec, rec.axis(args.axis)
    raise BehaviorAuthError(f"{args.input}: no recording matches the selection")


def _emit(args, text, summary):
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)


def cmd_decompose(args):
    config, _ = _settings(args)
    rec, series = _select_series(args)
    model = fit(series, config)
    trend, season, events = evaluate_components(model, series.timestamps)
    resid = series.values - trend - season - events
    rows = ["t,y,trend,season,events,residual"]
    for row in zip(series.timestamps, series.values, trend, season, events, resid):
        rows.append(",".join(fmt(v) for v in row))
    period = model.seasonality.period if model.seasonality else None
    summary = (f"{rec.subject_id}/{rec.action}/{rec.recording_id} axis {args.axis}: "
               f"{len(series)} samples, trend {config.trend_kind}, "
               f"period {'none' if period is None else f'{period:.4f} s'}, "
               f"{len(model.events.times)} outliers, residual sigma "
               f"{model.residuals.sigma:.6g}")
    _emit(args, "\n".join(rows) + "\n", summary)


def cmd_forecast(args):
    config, _ = _settings(args)
    _, series = _select_series(args)
    train_len = len(series) if args.train is None else args.train
    train, rest = split_at(series, train_len)
    model = fit(train, config)
    level = config.interval_level
    actuals = None
    if len(rest) >= args.horizon and args.step is None:
        actuals = rest.slice(0, args.horizon)
        fc = predict_at(model, actuals.timestamps, level)
    else:
        step = args.step if args.step is not None else train.median_spacing()
        fc = predict(model, args.horizon, step, level)
    width = fc.upper - fc.lower
    summary = (f"forecast {len(fc)} steps from {len(train)} training samples at level "
               f"{level}: mean band width {np.mean(width):.6g}")
    _emit(args, forecast_csv(fc, actuals), summary)


def cmd_cv(args):
    config, _ = _settings(args)
    _, series = _select_series(args)
    report = cross_validate(series, args.initial, args.horizon, args.folds, config,
                            workers=args.workers)
    _emit(args, report.to_csv(), report.summary())


def cmd_auth_sim(args):
    config, te_kw = _settings(args)
    if args.max_outside is not None:
        te_kw["max_outside_fraction"] = args.max_outside
    te_kw.setdefault("interval_level", config.interval_level)
    try:
        te = TePolicy(**te_kw)
    except BehaviorAuthError as exc:
        raise UsageError(str(exc)) from None
    owner = SynthSpec(period=args.owner_period, amplitude=args.owner_amplitude,
                      noise_sigma=args.noise, rate=args.rate, rng_seed=args.seed,
                      action="Walking", subject_id="owner")
    impostor = SynthSpec(period=args.impostor_period, amplitude=args.impostor_amplitude,
                         noise_sigma=args.noise, rate=args.rate,
                         rng_seed=args.seed + args.impostor_seed_offset,
                         action="Walking", subject_id="impostor")
    result = auth_simulate(owner, impostor, te, config, args.windows, args.window_samples)
    escalated_at = next((k for k, g in enumerate(result.gate_trace)
                         if k > args.windows and g.mode.value == "Escalated"), None)
    summary = (f"windows {args.windows} each: FAR {result.far:.4f}, FRR {result.frr:.4f}; "
               f"gate escalated after impostor window "
               f"{'never' if escalated_at is None else escalated_at - args.windows}")
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(result.trace_csv())
    print(summary)


def cmd_synth(args):
    spec = SynthSpec(period=args.synth_period, amplitude=args.amplitude, offset=args.offset,
                     noise_sigma=args.noise, trend_slope=args.slope,
                     outlier_rate=args.outlier_rate, outlier_magnitude=args.outlier_magnitude,
                     duration=args.duration, rate=args.rate, rng_seed=args.seed,
                     action=args.action_label, subject_id=args.subject_label)
    rec = synth(spec)
    if not args.output:
        raise UsageError("synth requires --output")
    write_recordings([rec], args.output)
    print(f"wrote {len(rec)} samples of {rec.action} to {args.output}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="recording CSV (subject_id,action,recording_id,t,ax,ay,az)")
    common.add_argument("--output", help="output CSV path (default: stdout)")
    common.add_argument("--period", type=_period, default=None,
                        help="seasonal period in seconds, 'auto' or 'none'")
    common.add_argument("--fourier-order", type=int, default=None)
    common.add_argument("--level", type=float, default=None, help="band level in (0, 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--config", help="key=value file overriding fit defaults")

    select = argparse.ArgumentParser(add_help=False)
    select.add_argument("--axis", choices=("x", "y", "z"), default="x")
    select.add_argument("--action", help="only use recordings with this action label")
    select.add_argument("--subject")
    select.add_argument("--recording")

    parser = _Parser(prog="behavior-auth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("decompose", parents=[common, select],
                       help="fit and write trend/season/event/residual components")
    p.set_defaults(func=cmd_decompose, needs_input=True)

    p = sub.add_parser("forecast", parents=[common, select], help="forecast with bands")
    p.add_argument("--train", type=int, default=None, help="training samples (default: all)")
    p.add_argument("--horizon", type=int, default=300)
    p.add_argument("--step", type=float, default=None,
                   help="forecast spacing in seconds (default: training median spacing)")
    p.set_defaults(func=cmd_forecast, needs_input=True)

    p = sub.add_parser("cv", parents=[common, select], help="rolling-origin cross-validation")
    p.add_argument("--initial", type=int, default=500)
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_cv, needs_input=True)

    p = sub.add_parser("auth-sim", parents=[common],
                       help="owner/impostor simulation; --output receives the gate trace")
    p.add_argument("--owner-period", type=float, default=1.0)
    p.add_argument("--owner-amplitude", type=float, default=1.0)
    p.add_argument("--impostor-period", type=float, default=0.7)
    p.add_argument("--impostor-amplitude", type=float, default=1.4)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--rate", type=float, default=50.0)
    p.add_argument("--windows", type=int, default=200)
    p.add_argument("--window-samples", type=int, default=None)
    p.add_argument("--max-outside", type=float, default=None)
    p.add_argument("--impostor-seed-offset", type=int, default=1_000_000)
    p.set_defaults(func=cmd_auth_sim, needs_input=False)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic recording CSV")
    p.add_argument("--synth-period", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--slope", type=float, default=0.0)
    p.add_argument("--outlier-rate", type=float, default=0.0)
    p.add_argument("--outlier-magnitude", type=float, default=0.0)
    p.add_argument("--duration", type=float, default=20.0)
    p.add_argument("--rate", type=float, default=50.0)
    p.add_argument("--action-label", default="Jumping")
    p.add_argument("--subject-label", default="synth")
    p.set_defaults(func=cmd_synth, needs_input=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if args.needs_input and not args.input:
        parser.print_usage(sys.stderr)
        print(f"behavior-auth {args.command}: error: --input is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args)
    except UsageError as exc:
        print(f"behavior-auth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BehaviorAuthError, OSError) as exc:
        print(f"behavior-auth {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
