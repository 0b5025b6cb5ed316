"""Prequential evaluation harness and experiment orchestration.

Every instance is tested (the forecast is scored against the target)
and then used for training, exactly once. Reported error is the RMSE
over a sliding window of recent squared errors, so recovery after a
drift is visible as the window drains old errors.

An experiment is a declarative ``ExperimentConfig``: a stream (either a
synthetic drifting-hyperplane description or a dataset file), one
algorithm with its parameters, and a list of seeds. Each seed produces
an independent run; runs are deterministic given (config, seed), and
the emitted CSV is byte-stable when timing capture is disabled. Seeds
can be executed in parallel processes without changing any output byte:
result assembly is ordered by seed, never by completion.
"""

from __future__ import annotations

import csv
import math
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .ensembles import AddExpRegressor, ScaleFreeRegressor, SfnrConfig
from .learners import EmaForecaster, OnlineRegressor, RunningMeanRegressor, SgdLinearRegressor
from .prng import derive_seed
from .streams import (
    DriftStreamSpec,
    Instance,
    generate_drift_stream,
    make_hyperplane_concept,
    parse_regression_csv,
    parse_yahoo_csv,
)

RESULT_HEADER = "algorithm,seed,instance_index,windowed_rmse,network_size,cumulative_drifts,elapsed_ns"
DRIFT_LOG_HEADER = "algorithm,seed,instance_index"

ALGORITHMS = ("sfnr_adwin", "sfnr_period", "addexp", "single_learner", "ema")
LEARNERS = ("linear", "ema", "mean")


class PrequentialWindow:
    """Sliding window of squared errors reporting windowed RMSE."""

    def __init__(self, window_size: int = 10_000):
        if window_size < 1:
            raise ValueError("window_size must be positive")
        self.window_size = window_size
        self._buffer: deque[float] = deque(maxlen=window_size)
        self._sum = 0.0
        self._since_resync = 0

    def __len__(self) -> int:
        return len(self._buffer)

    def update(self, prediction: float, truth: float) -> float:
        """Push one squared error; return the current windowed RMSE."""
        sq = (float(prediction) - float(truth)) ** 2
        if len(self._buffer) == self.window_size:
            self._sum -= self._buffer[0]
        self._buffer.append(sq)
        self._sum += sq
        self._since_resync += 1
        if self._since_resync >= self.window_size:
            self._sum = math.fsum(self._buffer)
            self._since_resync = 0
        return self.rmse()

    def rmse(self) -> float:
        if not self._buffer:
            return 0.0
        return math.sqrt(max(self._sum, 0.0) / len(self._buffer))


@dataclass(frozen=True)
class ResultRow:
    """One reporting checkpoint of one seeded run."""

    algorithm: str
    seed: int
    instance_index: int
    windowed_rmse: float
    network_size: int
    cumulative_drifts: int
    elapsed_ns: int


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment.

    A synthetic stream is described by ``length``, ``dim``,
    ``drift_times`` and ``drift_widths`` (concepts are derived from the
    run seed); setting ``data_path`` switches to file ingestion instead.
    ``error_scale`` of None resolves to the known target half-range for
    synthetic streams and to a frozen running max for file streams.
    ``record_timing`` controls whether wall-clock nanoseconds are
    captured into rows; disable it when byte-identical output matters
    more than timing.
    """

    algorithm: str = "sfnr_adwin"
    length: int = 100_000
    dim: int = 10
    drift_times: tuple[int, ...] = ()
    drift_widths: tuple[int, ...] = ()
    data_path: str | None = None
    data_format: str = "csv"
    target: str | int | None = None
    learner: str = "linear"
    learning_rate: float = 0.01
    ema_window: int = 5
    metric: str = "eigenvector"
    k_max: int = 10
    m_a: int = 2
    period: int = 1000
    threshold: float = 0.08
    delta: float = 0.1
    buffer_size: int = 500
    adwin_check_interval: int = 32
    adwin_capacity: int = 5000
    error_scale: float | None = None
    beta: float = 0.5
    gamma: float = 0.1
    tau: float = 0.05
    max_experts: int = 10
    seeds: tuple[int, ...] = (1,)
    report_every: int = 1000
    window_size: int = 10_000
    out: str | None = None
    drift_log_out: str | None = None
    record_timing: bool = True

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.learner not in LEARNERS:
            raise ValueError(f"unknown learner {self.learner!r}; choose from {LEARNERS}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.report_every < 1 or self.window_size < 1:
            raise ValueError("report_every and window_size must be positive")
        if self.data_path is None:
            if len(self.drift_times) != len(self.drift_widths):
                raise ValueError("drift_times and drift_widths lengths differ")
            if self.length < 0 or self.dim < 2:
                raise ValueError("synthetic streams need length >= 0 and dim >= 2")
        elif self.data_format == "csv" and self.target is None:
            raise ValueError("file streams in csv format need a target column")


def _resolved_error_scale(config: ExperimentConfig) -> float | None:
    if config.error_scale is not None:
        return config.error_scale
    if config.data_path is None:
        # synthetic target is a distance to a plane through the cube
        # center, bounded by half the cube diagonal
        return math.sqrt(config.dim) / 2.0
    return None


def _build_instances(config: ExperimentConfig, seed: int):
    if config.data_path is not None:
        with open(config.data_path, "r", encoding="utf-8") as fh:
            if config.data_format == "yahoo":
                return parse_yahoo_csv(fh)
            return parse_regression_csv(fh, config.target)
    concepts = tuple(
        make_hyperplane_concept(derive_seed(seed, 1 + j), config.dim)
        for j in range(len(config.drift_times) + 1)
    )
    spec = DriftStreamSpec(
        concepts=concepts,
        drift_times=tuple(config.drift_times),
        drift_widths=tuple(config.drift_widths),
        length=config.length,
        seed=seed,
    )
    return generate_drift_stream(spec)


def _build_prototype(config: ExperimentConfig) -> OnlineRegressor:
    if config.learner == "linear":
        return SgdLinearRegressor(config.learning_rate)
    if config.learner == "ema":
        return EmaForecaster(config.ema_window)
    return RunningMeanRegressor()


class _SingleRunner:
    """Adapter giving a bare learner the ensemble process() shape."""

    def __init__(self, model: OnlineRegressor):
        self.model = model

    def process(self, instance: Instance) -> float:
        prediction = self.model.predict(instance.x)
        self.model.update(instance.x, instance.y)
        return prediction

    @property
    def size(self) -> int:
        return 1

    def drift_indices(self) -> list[int]:
        return []


class _EnsembleRunner:
    def __init__(self, model):
        self.model = model

    def process(self, instance: Instance) -> float:
        return self.model.process(instance)

    @property
    def size(self) -> int:
        return self.model.size

    def drift_indices(self) -> list[int]:
        if isinstance(self.model, AddExpRegressor):
            return list(self.model.addition_log)
        return [event.index for event in self.model.drift_log]


def _build_algorithm(config: ExperimentConfig, seed: int):
    prototype = _build_prototype(config)
    scale = _resolved_error_scale(config)
    if config.algorithm in ("sfnr_adwin", "sfnr_period"):
        sfnr = SfnrConfig(
            metric=config.metric,
            k_max=config.k_max,
            m_a=config.m_a,
            mode="adwin" if config.algorithm == "sfnr_adwin" else "period",
            period=config.period,
            threshold=config.threshold,
            delta=config.delta,
            buffer_size=config.buffer_size,
            error_scale=scale,
            adwin_capacity=config.adwin_capacity,
            adwin_check_interval=config.adwin_check_interval,
        )
        return _EnsembleRunner(ScaleFreeRegressor(prototype, sfnr, seed=derive_seed(seed, 0)))
    if config.algorithm == "addexp":
        return _EnsembleRunner(AddExpRegressor(
            prototype, beta=config.beta, gamma=config.gamma, tau=config.tau,
            max_experts=config.max_experts, error_scale=scale,
        ))
    if config.algorithm == "ema":
        return _SingleRunner(EmaForecaster(config.ema_window))
    return _SingleRunner(prototype)


def _run_single_seed(config: ExperimentConfig, seed: int) -> tuple[list[ResultRow], list[tuple[str, int, int]]]:
    instances = _build_instances(config, seed)
    runner = _build_algorithm(config, seed)
    window = PrequentialWindow(config.window_size)
    rows: list[ResultRow] = []
    count = 0
    start_ns = time.perf_counter_ns() if config.record_timing else 0

    def checkpoint() -> ResultRow:
        elapsed = time.perf_counter_ns() - start_ns if config.record_timing else 0
        return ResultRow(
            algorithm=config.algorithm,
            seed=seed,
            instance_index=count,
            windowed_rmse=window.rmse(),
            network_size=runner.size,
            cumulative_drifts=len(runner.drift_indices()),
            elapsed_ns=elapsed,
        )

    for instance in instances:
        prediction = runner.process(instance)
        if not math.isfinite(prediction):
            raise RuntimeError(
                f"{config.algorithm} produced a non-finite prediction at instance "
                f"{instance.index} (seed {seed})"
            )
        window.update(prediction, instance.y)
        count += 1
        if count % config.report_every == 0:
            rows.append(checkpoint())
    if count % config.report_every != 0:
        rows.append(checkpoint())
    drift_entries = [(config.algorithm, seed, idx) for idx in runner.drift_indices()]
    return rows, drift_entries


def run_experiment_detailed(config: ExperimentConfig, max_workers: int = 1
                            ) -> tuple[list[ResultRow], list[tuple[str, int, int]]]:
    """Run every seed; return (result rows, drift-log entries).

    Rows are assembled in ascending seed order regardless of execution
    order, so serial and parallel runs produce identical output.
    """
    config.validate()
    if config.data_path is not None and not os.path.isfile(config.data_path):
        raise FileNotFoundError(f"dataset file not found: {config.data_path}")
    seeds = sorted(set(config.seeds))
    if max_workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = {seed: pool.submit(_run_single_seed, config, seed) for seed in seeds}
            per_seed = {seed: futures[seed].result() for seed in seeds}
    else:
        per_seed = {seed: _run_single_seed(config, seed) for seed in seeds}
    rows: list[ResultRow] = []
    drift_entries: list[tuple[str, int, int]] = []
    for seed in seeds:
        seed_rows, seed_drifts = per_seed[seed]
        rows.extend(seed_rows)
        drift_entries.extend(seed_drifts)
    if config.out is not None:
        emit_csv(rows, config.out)
    if config.drift_log_out is not None:
        emit_drift_log(drift_entries, config.drift_log_out)
    return rows, drift_entries


def run_experiment(config: ExperimentConfig, max_workers: int = 1) -> list[ResultRow]:
    """Run every seed of the experiment; return all result rows."""
    return run_experiment_detailed(config, max_workers=max_workers)[0]


def emit_csv(rows, path) -> None:
    """Write result rows as CSV, ordered by (seed, instance index)."""
    ordered = sorted(rows, key=lambda r: (r.seed, r.instance_index, r.algorithm))
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(RESULT_HEADER + "\n")
            for r in ordered:
                fh.write(
                    f"{r.algorithm},{r.seed},{r.instance_index},{r.windowed_rmse!r},"
                    f"{r.network_size},{r.cumulative_drifts},{r.elapsed_ns}\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def parse_result_csv(path) -> list[ResultRow]:
    """Read back a results CSV produced by emit_csv."""
    rows: list[ResultRow] = []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or ",".join(header) != RESULT_HEADER:
            raise ValueError(f"{path}: unexpected results header {header!r}")
        for rec in reader:
            rows.append(ResultRow(
                algorithm=rec[0],
                seed=int(rec[1]),
                instance_index=int(rec[2]),
                windowed_rmse=float(rec[3]),
                network_size=int(rec[4]),
                cumulative_drifts=int(rec[5]),
                elapsed_ns=int(rec[6]),
            ))
    return rows


def emit_drift_log(entries, path) -> None:
    """Write drift events as CSV rows (algorithm, seed, instance_index)."""
    ordered = sorted(entries, key=lambda e: (e[1], e[2], e[0]))
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(DRIFT_LOG_HEADER + "\n")
            for algorithm, seed, index in ordered:
                fh.write(f"{algorithm},{seed},{index}\n")
    except OSError as exc:
        raise OSError(f"cannot write drift log to {path}: {exc}") from exc


def summarize(rows) -> list[tuple[str, int, float, float, int]]:
    """Aggregate rows across seeds.

    Returns (algorithm, instance_index, mean windowed RMSE, sample
    stdev, seed count) sorted by algorithm then index. Single-seed
    groups report a stdev of 0.
    """
    groups: dict[tuple[str, int], list[float]] = {}
    for r in rows:
        groups.setdefault((r.algorithm, r.instance_index), []).append(r.windowed_rmse)
    out = []
    for (algorithm, index), values in sorted(groups.items()):
        n = len(values)
        mean = math.fsum(values) / n
        if n > 1:
            var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
            stdev = math.sqrt(var)
        else:
            stdev = 0.0
        out.append((algorithm, index, mean, stdev, n))
    return out


# ---------------------------------------------------------------------------
# Built-in experiment presets.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    desk: ExperimentConfig
    full: ExperimentConfig


def _hyperplane_preset(name: str, desc: str, full_times: tuple[int, ...],
                       widths: tuple[int, ...]) -> Preset:
    full = ExperimentConfig(
        algorithm="sfnr_adwin",
        length=1_000_000,
        dim=10,
        drift_times=full_times,
        drift_widths=widths,
        window_size=100_000,
        report_every=10_000,
        seeds=(1,),
    )
    desk_times = tuple(t // 10 for t in full_times)
    desk = replace(full, length=100_000, drift_times=desk_times,
                   window_size=10_000, report_every=1000)
    return Preset(name, desc, desk=desk, full=full)


PRESETS: dict[str, Preset] = {
    p.name: p for p in (
        _hyperplane_preset("rhpr-1", "rotating hyperplane, one abrupt drift",
                           (500_000,), (1,)),
        _hyperplane_preset("rhpr-2", "rotating hyperplane, one gradual drift",
                           (500_000,), (1000,)),
        _hyperplane_preset("rhpr-3", "rotating hyperplane, two abrupt drifts",
                           (333_333, 750_000), (1, 1)),
        _hyperplane_preset("rhpr-4", "rotating hyperplane, two gradual drifts",
                           (333_333, 750_000), (1000, 1000)),
        Preset(
            "wine",
            "red wine quality (generic numeric CSV, 'quality' target)",
            desk=ExperimentConfig(
                algorithm="sfnr_adwin", data_path="data/winequality-red.csv",
                data_format="csv", target="quality", learner="linear",
                window_size=10_000, report_every=100, seeds=(1,),
            ),
            full=ExperimentConfig(
                algorithm="sfnr_adwin", data_path="data/winequality-red.csv",
                data_format="csv", target="quality", learner="linear",
                window_size=100_000, report_every=100, seeds=(1,),
            ),
        ),
        Preset(
            "stock",
            "Yahoo-format daily quotes, EMA experts forecasting Close",
            desk=ExperimentConfig(
                algorithm="sfnr_adwin", data_path="data/stock.csv",
                data_format="yahoo", learner="ema", ema_window=5,
                window_size=10_000, report_every=100, seeds=(1,),
            ),
            full=ExperimentConfig(
                algorithm="sfnr_adwin", data_path="data/stock.csv",
                data_format="yahoo", learner="ema", ema_window=5,
                window_size=100_000, report_every=100, seeds=(1,),
            ),
        ),
    )
}


def describe_presets() -> str:
    """Human-readable preset listing for the command line."""
    lines = []
    for preset in PRESETS.values():
        full, desk = preset.full, preset.desk
        if full.data_path is None:
            t0 = ",".join(str(t) for t in full.drift_times) or "none"
            w = ",".join(str(w) for w in full.drift_widths) or "-"
            lines.append(
                f"{preset.name}: {preset.description}; t0={t0} W={w} "
                f"length={full.length} window={full.window_size} "
                f"(desk scale: t0={','.join(str(t) for t in desk.drift_times)} "
                f"length={desk.length} window={desk.window_size})"
            )
        else:
            lines.append(
                f"{preset.name}: {preset.description}; data={full.data_path} "
                f"learner={full.learner} window={desk.window_size}"
            )
    return "\n".join(lines)
