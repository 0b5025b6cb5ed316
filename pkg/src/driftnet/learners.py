"""Online regressors usable as ensemble experts.

Every learner satisfies the same small contract: ``predict(x)`` never
mutates state, ``update(x, y)`` consumes one instance in O(features),
and ``clone_fresh()`` returns an untrained learner with the same
configuration. The ensemble treats experts purely through this
interface, so heavier regressors can be plugged in later without
touching ensemble code.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np


class OnlineRegressor(ABC):
    """Contract for incremental regressors."""

    @abstractmethod
    def predict(self, x) -> float:
        """Forecast the target for ``x`` without changing state."""

    @abstractmethod
    def update(self, x, y: float) -> None:
        """Absorb one (x, y) observation."""

    @abstractmethod
    def clone_fresh(self) -> "OnlineRegressor":
        """New untrained learner of the same kind and configuration."""


class EmaForecaster(OnlineRegressor):
    """Exponential moving average of the observed targets.

    The forecast for the next instance is the running EMA of the target
    sequence: after seeing price p the state moves by
    (p - EMA) * 2/(w+1). Features are ignored entirely, which makes the
    learner a natural fit for next-price forecasting where only the
    price history matters. Predicts 0 until the first update.
    """

    def __init__(self, window: int = 5):
        if window < 1:
            raise ValueError("window must be positive")
        self.window = int(window)
        self.multiplier = 2.0 / (window + 1)
        self.current: float | None = None

    def predict(self, x) -> float:
        return 0.0 if self.current is None else self.current

    def update(self, x, y: float) -> None:
        y = float(y)
        if not math.isfinite(y):
            raise ValueError(f"target must be finite, got {y}")
        if self.current is None:
            self.current = y
        else:
            self.current += (y - self.current) * self.multiplier

    def clone_fresh(self) -> "EmaForecaster":
        return EmaForecaster(self.window)


class SgdLinearRegressor(OnlineRegressor):
    """Linear model trained by per-instance stochastic gradient descent.

    Features are standardized with running mean/variance statistics
    (variance floored at 1e-8) before the dot product, so wildly scaled
    inputs such as trade volumes cannot blow up the step size. Each
    update refreshes the standardization statistics first, then takes
    one gradient step on the squared loss. The gradient norm is capped
    (``grad_clip``) so a pathological early step cannot seed weight
    overflow.
    """

    _VAR_FLOOR = 1e-8

    def __init__(self, learning_rate: float = 0.01, grad_clip: float = 100.0):
        if learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        self.learning_rate = float(learning_rate)
        self.grad_clip = float(grad_clip)
        self.n_updates = 0
        self.weights: np.ndarray | None = None
        self.bias = 0.0
        self._mean: np.ndarray | None = None
        self._m2: np.ndarray | None = None
        self._inv_std: np.ndarray | None = None
        self._scratch: np.ndarray | None = None

    def _standardized(self, x: np.ndarray) -> np.ndarray:
        # writes into the scratch buffer; callers must not keep the ref
        out = self._scratch
        np.subtract(x, self._mean, out=out)
        np.multiply(out, self._inv_std, out=out)
        return out

    def _check_dim(self, x: np.ndarray) -> None:
        if x.shape != self._mean.shape:
            raise ValueError(
                f"feature dimension changed: expected {self._mean.shape[0]}, got {x.shape}"
            )

    def predict(self, x) -> float:
        if self.n_updates == 0:
            return 0.0
        x = np.asarray(x, dtype=float)
        self._check_dim(x)
        xs = self._standardized(x)
        return float(self.weights @ xs) + self.bias

    def gradient(self, x, y: float) -> tuple[np.ndarray, float]:
        """Squared-loss gradient (d/dweights, d/dbias) at the current state.

        Introspection only: no statistics are updated and no step is
        taken. The weight gradient is 2 (prediction - y) x_std.
        """
        if self.n_updates == 0:
            raise ValueError("gradient undefined before the first update")
        x = np.asarray(x, dtype=float)
        self._check_dim(x)
        xs = self._standardized(x)
        g = 2.0 * (float(self.weights @ xs) + self.bias - float(y))
        return g * xs.copy(), g

    def update(self, x, y: float) -> None:
        x = np.asarray(x, dtype=float)
        y = float(y)
        if not math.isfinite(y) or not np.isfinite(x).all():
            raise ValueError("non-finite training input")
        if self.n_updates == 0:
            d = x.shape[0]
            self.weights = np.zeros(d)
            self._mean = np.zeros(d)
            self._m2 = np.zeros(d)
            self._inv_std = np.ones(d)
            self._scratch = np.empty(d)
        else:
            self._check_dim(x)
        self.n_updates += 1
        n = self.n_updates
        delta = x - self._mean
        self._mean += delta / n
        self._m2 += delta * (x - self._mean)
        if n >= 2:
            var = self._m2 / (n - 1)
            np.maximum(var, self._VAR_FLOOR, out=var)
            np.divide(1.0, np.sqrt(var, out=var), out=self._inv_std)
        xs = self._standardized(x)
        g = 2.0 * (float(self.weights @ xs) + self.bias - y)
        gnorm = abs(g) * math.sqrt(float(xs @ xs) + 1.0)
        if gnorm > self.grad_clip:
            g *= self.grad_clip / gnorm
        step = self.learning_rate * g
        self.weights -= step * xs
        self.bias -= step

    def clone_fresh(self) -> "SgdLinearRegressor":
        return SgdLinearRegressor(self.learning_rate, self.grad_clip)


class RunningMeanRegressor(OnlineRegressor):
    """Predicts the running mean of every target seen so far.

    Uses Neumaier-compensated summation: the rounding error of every
    addition is banked in a side term and folded back in at read time,
    so even sums whose partial totals dwarf individual addends stay
    exact. Mostly a test and baseline learner.
    """

    def __init__(self):
        self._sum = 0.0
        self._compensation = 0.0
        self._count = 0

    def predict(self, x) -> float:
        if self._count == 0:
            return 0.0
        return (self._sum + self._compensation) / self._count

    def update(self, x, y: float) -> None:
        y = float(y)
        if not math.isfinite(y):
            raise ValueError("non-finite training target")
        total = self._sum + y
        if abs(self._sum) >= abs(y):
            self._compensation += (self._sum - total) + y
        else:
            self._compensation += (y - total) + self._sum
        self._sum = total
        self._count += 1

    def clone_fresh(self) -> "RunningMeanRegressor":
        return RunningMeanRegressor()
