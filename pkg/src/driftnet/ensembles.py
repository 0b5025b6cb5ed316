"""Ensemble regressors over the expert network, plus the AddExp baseline.

The network ensemble holds one online learner per graph node and
predicts the centrality-weighted mean of the expert forecasts:

    H(x) = sum_d zeta_d h_d(x) / sum_k zeta_k

falling back to the plain mean when every weight is zero (possible
under betweenness on tiny graphs). The ensemble evolves, instead of
retraining wholesale, whenever its evolution trigger fires:

* period mode: every ``period`` instances the accumulated ensemble RMSE
  is compared against ``threshold``;
* adwin mode: the normalized absolute ensemble error feeds an adaptive-
  windowing detector, and its cuts are the triggers.

An evolution step removes the worst expert (only when the network is at
capacity), rewires, trains a fresh expert on the recent instance
buffer, attaches it preferentially, and recomputes all vote weights.
Vote weights change only at evolutions.

AddExp is the comparison baseline: a weighted expert pool with
multiplicative weight decay beta^loss and loss-triggered expert
addition, pruning the weakest expert at capacity.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field

from .adwin import Adwin
from .learners import OnlineRegressor
from .network import CENTRALITY_METRICS, ExpertNetwork
from .prng import make_rng
from .streams import Instance

logger = logging.getLogger(__name__)

_WEIGHT_FLOOR_REL = 1e-12


class ErrorScale:
    """Normalizer mapping raw absolute errors into [0, 1].

    Either a fixed known scale (for synthetic streams the target range
    is known in advance) or a running maximum over the first ``warmup``
    observed errors, frozen afterwards so one late outlier cannot
    rescale history.
    """

    def __init__(self, fixed: float | None = None, warmup: int = 500):
        if fixed is not None and fixed <= 0:
            raise ValueError("fixed scale must be positive")
        if warmup < 1:
            raise ValueError("warmup must be positive")
        self.fixed = fixed
        self.warmup = warmup
        self._running_max = 0.0
        self._observed = 0

    @property
    def scale(self) -> float:
        return self.fixed if self.fixed is not None else self._running_max

    def observe(self, error: float) -> None:
        if self.fixed is not None:
            return
        if self._observed < self.warmup:
            self._running_max = max(self._running_max, abs(error))
            self._observed += 1

    def normalize(self, error: float) -> float:
        s = self.scale
        if s <= 0.0:
            return 0.0
        return abs(error) / s


@dataclass(frozen=True)
class DriftEvent:
    """One evolution trigger: where it happened and the detector cut."""

    index: int
    width_before: int | None = None
    width_after: int | None = None


@dataclass
class SfnrConfig:
    """Parameters of the network ensemble.

    ``mode`` picks the evolution trigger; the other mode's parameters
    are simply ignored. ``error_scale`` of None selects the frozen
    running-max normalizer.
    """

    metric: str = "eigenvector"
    k_max: int = 10
    m_a: int = 2
    mode: str = "adwin"
    period: int = 1000
    threshold: float = 0.08
    delta: float = 0.1
    buffer_size: int = 500
    error_window_len: int = 1000
    error_scale: float | None = None
    scale_warmup: int = 500
    adwin_capacity: int = 5000
    adwin_check_interval: int = 32

    def validate(self) -> None:
        if self.metric not in CENTRALITY_METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.mode not in ("period", "adwin"):
            raise ValueError(f"mode must be 'period' or 'adwin', got {self.mode!r}")
        if self.k_max < 1 or self.m_a < 1 or self.buffer_size < 1:
            raise ValueError("k_max, m_a, buffer_size must be positive")
        if self.mode == "period" and self.period < 1:
            raise ValueError("period must be positive")
        if self.mode == "period" and self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        if self.mode == "adwin" and not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.error_scale is not None and self.error_scale <= 0:
            raise ValueError("error_scale must be positive when fixed")


class ScaleFreeRegressor:
    """Dynamically sized, network-organized ensemble regressor."""

    def __init__(self, prototype: OnlineRegressor, config: SfnrConfig | None = None,
                 seed: int = 0, snapshot_dir: str | None = None):
        self.config = config if config is not None else SfnrConfig()
        self.config.validate()
        self.prototype = prototype
        self.rng = make_rng(seed)
        self.snapshot_dir = snapshot_dir
        self.network = ExpertNetwork(
            k_max=self.config.k_max,
            m_a=self.config.m_a,
            error_window_len=self.config.error_window_len,
        )
        self.learners: dict[int, OnlineRegressor] = {}
        self._next_id = 0
        self.buffer: deque[Instance] = deque(maxlen=self.config.buffer_size)
        self.drift_log: list[DriftEvent] = []
        self.instances_seen = 0
        self.scale = ErrorScale(self.config.error_scale, self.config.scale_warmup)
        self.detector: Adwin | None = None
        self._period_sq_sum = 0.0
        self._period_count = 0
        if self.config.mode == "adwin":
            self.detector = Adwin(
                delta=self.config.delta,
                capacity=self.config.adwin_capacity,
                check_interval=self.config.adwin_check_interval,
            )
        self._spawn_seed_expert()

    @property
    def size(self) -> int:
        return len(self.network)

    def _spawn_seed_expert(self) -> None:
        self.network.add_node(self._next_id, self.rng, born_at=0)
        self.learners[self._next_id] = self.prototype.clone_fresh()
        self._next_id += 1
        self._refresh_zetas()

    def _refresh_zetas(self) -> None:
        for node_id, zeta in self.network.centrality(self.config.metric).items():
            self.network.nodes[node_id].zeta = zeta

    def _predict_all(self, x) -> tuple[float, dict[int, float]]:
        ids = self.network.node_ids()
        if not ids:
            raise ValueError("ensemble has no experts")
        preds: dict[int, float] = {}
        weighted = 0.0
        weight_total = 0.0
        plain = 0.0
        for v in ids:
            h = self.learners[v].predict(x)
            preds[v] = h
            zeta = self.network.nodes[v].zeta
            weighted += zeta * h
            weight_total += zeta
            plain += h
        if weight_total > 0.0:
            return weighted / weight_total, preds
        return plain / len(ids), preds

    def predict(self, x) -> float:
        """Centrality-weighted ensemble forecast (no state change)."""
        return self._predict_all(x)[0]

    def process(self, instance: Instance) -> float:
        """Test-then-train one instance; returns the pre-train forecast."""
        if self.config.mode == "adwin":
            return self._process_adwin(instance)
        return self._process_period(instance)

    def _record_node_errors(self, preds: dict[int, float], y: float) -> None:
        for v, h in preds.items():
            self.network.nodes[v].record_error(h - y)

    def _train_all(self, x, y: float) -> None:
        for v in self.network.node_ids():
            self.learners[v].update(x, y)

    def _process_adwin(self, instance: Instance) -> float:
        x, y = instance.x, instance.y
        forecast, preds = self._predict_all(x)
        self._record_node_errors(preds, y)
        self._train_all(x, y)
        self.buffer.append(instance)
        error = abs(forecast - y)
        self.scale.observe(error)
        if self.detector.add(self.scale.normalize(error)):
            width_before, width_after = self.detector.last_cut
            depth = min(width_after, len(self.buffer))
            window = list(self.buffer)[-depth:] if depth else []
            self._evolve(window, instance.index, width_before, width_after)
        self.instances_seen += 1
        return forecast

    def _process_period(self, instance: Instance) -> float:
        x, y = instance.x, instance.y
        forecast, preds = self._predict_all(x)
        self._record_node_errors(preds, y)
        self.buffer.append(instance)
        self._train_all(x, y)
        diff = forecast - y
        self._period_sq_sum += diff * diff
        self._period_count += 1
        if self._period_count >= self.config.period:
            period_rmse = math.sqrt(self._period_sq_sum / self._period_count)
            if period_rmse > self.config.threshold:
                self._evolve(list(self.buffer), instance.index)
            self.buffer.clear()
            self._period_sq_sum = 0.0
            self._period_count = 0
        self.instances_seen += 1
        return forecast

    def _evolve(self, training_window: list[Instance], at_index: int,
                width_before: int | None = None, width_after: int | None = None) -> None:
        """Replace capacity-worst expert (if at capacity) with a fresh one."""
        if len(self.network) >= self.config.k_max:
            victim = self.network.worst_node()
            self.network.remove_node(victim, self.rng)
            del self.learners[victim]
        fresh = self.prototype.clone_fresh()
        if not training_window:
            logger.warning("evolution at %d with an empty training window; "
                           "adding an untrained expert", at_index)
        for inst in training_window:
            fresh.update(inst.x, inst.y)
        new_id = self._next_id
        self._next_id += 1
        self.network.add_node(new_id, self.rng, born_at=at_index)
        self.learners[new_id] = fresh
        self._refresh_zetas()
        self.drift_log.append(DriftEvent(at_index, width_before, width_after))
        if self.snapshot_dir is not None:
            self.network.dump_edge_list(f"{self.snapshot_dir}/network_{at_index}.edges")


class AddExpRegressor:
    """Additive-expert baseline with multiplicative weight decay.

    Per instance: predict the weight-averaged forecast, decay each
    expert's weight by beta^loss (loss clamped into [0,1] by the shared
    error scale), add a fresh expert carrying gamma times the current
    total weight whenever the ensemble's own normalized loss exceeds
    tau (pruning the weakest expert at capacity), then train everyone.
    Weights are floored at a tiny fraction of the total so a hopeless
    expert decays to irrelevance without ever underflowing to zero.
    """

    def __init__(self, prototype: OnlineRegressor, beta: float = 0.5, gamma: float = 0.1,
                 tau: float = 0.05, max_experts: int = 10,
                 error_scale: float | None = None, scale_warmup: int = 500):
        if not 0.0 < beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if gamma <= 0 or tau <= 0:
            raise ValueError("gamma and tau must be positive")
        if max_experts < 1:
            raise ValueError("max_experts must be positive")
        self.prototype = prototype
        self.beta = beta
        self.gamma = gamma
        self.tau = tau
        self.max_experts = max_experts
        self.scale = ErrorScale(error_scale, scale_warmup)
        self.experts: list[OnlineRegressor] = [prototype.clone_fresh()]
        self.weights: list[float] = [1.0]
        self.addition_log: list[int] = []
        self.instances_seen = 0

    @property
    def size(self) -> int:
        return len(self.experts)

    def predict(self, x) -> float:
        total = math.fsum(self.weights)
        return math.fsum(w * e.predict(x) for w, e in zip(self.weights, self.experts)) / total

    def process(self, instance: Instance) -> float:
        x, y = instance.x, instance.y
        forecasts = [e.predict(x) for e in self.experts]
        weight_total = math.fsum(self.weights)
        prediction = math.fsum(w * h for w, h in zip(self.weights, forecasts)) / weight_total
        self.scale.observe(abs(prediction - y))
        for i, h in enumerate(forecasts):
            loss = min(self.scale.normalize(h - y), 1.0)
            self.weights[i] *= self.beta ** loss
        self._guard_weights()
        ensemble_loss = min(self.scale.normalize(prediction - y), 1.0)
        if ensemble_loss > self.tau:
            if len(self.experts) == self.max_experts:
                weakest = min(range(len(self.weights)), key=lambda i: (self.weights[i], i))
                del self.experts[weakest]
                del self.weights[weakest]
            self.experts.append(self.prototype.clone_fresh())
            self.weights.append(self.gamma * math.fsum(self.weights))
            self.addition_log.append(instance.index)
        for expert in self.experts:
            expert.update(x, y)
        self.instances_seen += 1
        return prediction

    def _guard_weights(self) -> None:
        total = math.fsum(self.weights)
        if not math.isfinite(total) or total <= 0.0:
            self.weights = [1.0 / len(self.weights)] * len(self.weights)
            return
        if total < 1e-12 or total > 1e12:
            self.weights = [w / total for w in self.weights]
            total = 1.0
        floor = total * _WEIGHT_FLOOR_REL
        self.weights = [w if w > floor else floor for w in self.weights]
