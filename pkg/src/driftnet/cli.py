"""Command-line front end.

Three subcommands:

* ``run CONFIG`` executes an experiment described by a flat
  ``key = value`` config file (``#`` comments allowed, unknown keys are
  rejected) with a handful of override flags.
* ``gen`` writes a synthetic drifting stream as a plain CSV
  (``x0..x{d-1},y``), byte-identical for identical arguments.
* ``list-presets`` prints the built-in experiment presets.

Exit codes: 0 on success, 1 for usage or configuration mistakes, 2 for
failures during execution (unreadable datasets, malformed rows,
non-finite predictions, unwritable outputs).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .evaluation import (
    PRESETS,
    ExperimentConfig,
    describe_presets,
    run_experiment_detailed,
    _build_instances,
)
from .streams import StreamFormatError


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would call sys.exit(2)
        raise _UsageError(message)


def parse_config_file(path) -> dict[str, str]:
    """Read a flat key=value config file into a string mapping."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _UsageError(f"cannot read config file {path}: {exc}") from exc
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise _UsageError(f"{path}:{lineno}: empty key")
        if key in mapping:
            raise _UsageError(f"{path}:{lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def _to_int(value: str) -> int:
    return int(value, 10)


def _to_float(value: str) -> float:
    return float(value)


def _to_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _to_int_tuple(value: str) -> tuple[int, ...]:
    value = value.strip()
    if not value or value.lower() == "none":
        return ()
    return tuple(int(part.strip(), 10) for part in value.split(","))


def _to_seeds(value: str) -> tuple[int, ...]:
    seeds = _to_int_tuple(value)
    if not seeds:
        raise ValueError("seeds must not be empty")
    return seeds


def _to_target(value: str):
    stripped = value.strip()
    if stripped.lstrip("-").isdigit():
        return int(stripped)
    return stripped


def _to_error_scale(value: str):
    if value.lower() in ("auto", "none"):
        return None
    return float(value)


_CONFIG_KEYS = {
    "algorithm": ("algorithm", str),
    "length": ("length", _to_int),
    "dim": ("dim", _to_int),
    "drift_times": ("drift_times", _to_int_tuple),
    "drift_widths": ("drift_widths", _to_int_tuple),
    "data": ("data_path", str),
    "format": ("data_format", str),
    "target": ("target", _to_target),
    "learner": ("learner", str),
    "learning_rate": ("learning_rate", _to_float),
    "ema_window": ("ema_window", _to_int),
    "metric": ("metric", str),
    "kmax": ("k_max", _to_int),
    "ma": ("m_a", _to_int),
    "period": ("period", _to_int),
    "threshold": ("threshold", _to_float),
    "delta": ("delta", _to_float),
    "buffer_size": ("buffer_size", _to_int),
    "check_interval": ("adwin_check_interval", _to_int),
    "capacity": ("adwin_capacity", _to_int),
    "error_scale": ("error_scale", _to_error_scale),
    "beta": ("beta", _to_float),
    "gamma": ("gamma", _to_float),
    "tau": ("tau", _to_float),
    "max_experts": ("max_experts", _to_int),
    "seeds": ("seeds", _to_seeds),
    "report_every": ("report_every", _to_int),
    "window_size": ("window_size", _to_int),
    "out": ("out", str),
    "drift_log": ("drift_log_out", str),
    "timing": ("record_timing", _to_bool),
}


def config_from_mapping(mapping: dict[str, str], full_scale: bool = False) -> ExperimentConfig:
    """Build an ExperimentConfig from parsed key=value pairs.

    A ``preset`` key seeds the config from a named preset (desk scale
    unless ``full_scale``); every other key overrides one field.
    Unknown keys are rejected by name.
    """
    mapping = dict(mapping)
    preset_name = mapping.pop("preset", None)
    if preset_name is not None:
        preset = PRESETS.get(preset_name)
        if preset is None:
            known = ", ".join(sorted(PRESETS))
            raise _UsageError(f"unknown preset {preset_name!r}; available: {known}")
        config = preset.full if full_scale else preset.desk
    else:
        config = ExperimentConfig()
    updates = {}
    for key, value in mapping.items():
        entry = _CONFIG_KEYS.get(key)
        if entry is None:
            known = ", ".join(sorted(_CONFIG_KEYS))
            raise _UsageError(f"unknown config key {key!r}; known keys: {known}")
        field_name, convert = entry
        try:
            updates[field_name] = convert(value)
        except ValueError as exc:
            raise _UsageError(f"bad value for {key!r}: {exc}") from exc
    config = replace(config, **updates)
    try:
        config.validate()
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    return config


def _build_parser() -> _Parser:
    parser = _Parser(prog="driftnet", description="streaming regression experiments")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("config", help="path to a key=value config file")
    run.add_argument("--seed", type=int, help="replace the seed list with one seed")
    run.add_argument("--length", type=int, help="override the synthetic stream length")
    run.add_argument("--window-size", type=int, help="override the reporting window")
    run.add_argument("--metric", help="override the centrality metric")
    run.add_argument("--delta", type=float, help="override the drift-detector delta")
    run.add_argument("--kmax", type=int, help="override the maximum ensemble size")
    run.add_argument("--out", help="override the results CSV path")
    run.add_argument("--full", action="store_true",
                     help="use the full-scale variant of a preset")
    run.add_argument("--workers", type=int, default=1,
                     help="worker processes for multi-seed runs")

    gen = sub.add_parser("gen", help="write a synthetic stream as CSV")
    gen.add_argument("--preset", help="borrow stream shape from a preset")
    gen.add_argument("--length", type=int, help="number of instances")
    gen.add_argument("--dim", type=int, help="feature dimension")
    gen.add_argument("--seed", type=int, default=1, help="stream seed")
    gen.add_argument("--drift-times", help="comma-separated drift midpoints")
    gen.add_argument("--drift-widths", help="comma-separated drift widths")
    gen.add_argument("--out", help="output CSV path (default: stdout)")
    gen.add_argument("--full", action="store_true",
                     help="use the full-scale variant of a preset")

    sub.add_parser("list-presets", help="describe the built-in presets")
    return parser


def _cmd_run(args) -> int:
    mapping = parse_config_file(args.config)
    config = config_from_mapping(mapping, full_scale=args.full)
    overrides = {}
    if args.seed is not None:
        overrides["seeds"] = (args.seed,)
    if args.length is not None:
        overrides["length"] = args.length
    if args.window_size is not None:
        overrides["window_size"] = args.window_size
    if args.metric is not None:
        overrides["metric"] = args.metric
    if args.delta is not None:
        overrides["delta"] = args.delta
    if args.kmax is not None:
        overrides["k_max"] = args.kmax
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        config = replace(config, **overrides)
        try:
            config.validate()
        except ValueError as exc:
            raise _UsageError(str(exc)) from exc
    rows, drift_entries = run_experiment_detailed(config, max_workers=args.workers)
    if config.out is not None:
        print(f"wrote {len(rows)} result rows to {config.out}")
    else:
        sys.stdout.write("algorithm,seed,instance_index,windowed_rmse,"
                         "network_size,cumulative_drifts,elapsed_ns\n")
        for r in rows:
            sys.stdout.write(
                f"{r.algorithm},{r.seed},{r.instance_index},{r.windowed_rmse!r},"
                f"{r.network_size},{r.cumulative_drifts},{r.elapsed_ns}\n"
            )
    if config.drift_log_out is not None:
        print(f"wrote {len(drift_entries)} drift events to {config.drift_log_out}")
    return 0


def _cmd_gen(args) -> int:
    if args.preset is not None:
        preset = PRESETS.get(args.preset)
        if preset is None:
            known = ", ".join(sorted(PRESETS))
            raise _UsageError(f"unknown preset {args.preset!r}; available: {known}")
        config = preset.full if args.full else preset.desk
        if config.data_path is not None:
            raise _UsageError(f"preset {args.preset!r} reads a dataset file; "
                              "gen only writes synthetic streams")
    else:
        config = ExperimentConfig()
    updates = {}
    if args.length is not None:
        updates["length"] = args.length
    if args.dim is not None:
        updates["dim"] = args.dim
    if args.drift_times is not None:
        updates["drift_times"] = _to_int_tuple(args.drift_times)
    if args.drift_widths is not None:
        updates["drift_widths"] = _to_int_tuple(args.drift_widths)
    if updates:
        config = replace(config, **updates)
    if len(config.drift_times) != len(config.drift_widths):
        raise _UsageError("drift_times and drift_widths lengths differ")

    def write(fh):
        names = ",".join(f"x{i}" for i in range(config.dim))
        fh.write(f"{names},y\n")
        for instance in _build_instances(config, args.seed):
            xs = ",".join(repr(float(v)) for v in instance.x)
            fh.write(f"{xs},{instance.y!r}\n")

    if args.out is None:
        write(sys.stdout)
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                write(fh)
        except OSError as exc:
            raise OSError(f"cannot write stream to {args.out}: {exc}") from exc
        print(f"wrote {config.length} instances to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "gen":
            return _cmd_gen(args)
        print(describe_presets())
        return 0
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (StreamFormatError, OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
