"""Adaptive-windowing change detection over a stream of bounded reals.

The detector keeps a window of the most recent values and repeatedly
asks: is there a split of the window into an old part and a new part
whose means differ more than sampling noise can explain? While any
split fails that test, the oldest value is dropped. The window that
survives is, with confidence 1 - delta, a window over which the mean
never changed.

The threshold for "more than sampling noise" on a split with n0 old and
n1 new values out of n total is

    eps_cut = sqrt( ln(4 n / delta) / (2 m) ),   m = 1 / (1/n0 + 1/n1)

i.e. a two-sample Hoeffding bound with the confidence shared across the
n candidate splits. Values are expected in [0, 1]; anything outside is
clamped (and counted) rather than rejected, since upstream normalizers
can overshoot transiently.

This is the plain stored-window variant: every value is kept (up to
``capacity``), and the split scan is run every ``check_interval``
additions. Capacity evictions are bookkeeping, not change detections.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np


def epsilon_cut(n0: int, n1: int, n: int, delta: float) -> float:
    """Split threshold for subwindow sizes ``n0`` and ``n1``.

    ``n`` is the full window length (n0 + n1); delta is the overall
    confidence, internally tightened to delta/n to cover all splits.
    """
    if n0 < 1 or n1 < 1:
        raise ValueError(f"both subwindows need at least one value, got {n0}, {n1}")
    if n != n0 + n1:
        raise ValueError(f"n must equal n0 + n1, got {n} != {n0} + {n1}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    m = 1.0 / (1.0 / n0 + 1.0 / n1)
    return math.sqrt(math.log(4.0 * n / delta) / (2.0 * m))


class Adwin:
    """ADWIN detector with a stored window of recent values.

    Parameters
    ----------
    delta : float
        Confidence level in (0, 1); smaller means fewer, surer cuts.
    capacity : int
        Hard cap on stored values; the oldest are evicted silently.
    check_interval : int
        Run the split scan every this many additions (1 = every add).
    """

    def __init__(self, delta: float = 0.1, capacity: int = 5000, check_interval: int = 32):
        if not 0.0 < delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {delta}")
        if capacity < 1:
            raise ValueError("capacity must be positive")
        if check_interval < 1:
            raise ValueError("check_interval must be positive")
        self.delta = float(delta)
        self.capacity = int(capacity)
        self.check_interval = int(check_interval)
        self.n_detections = 0
        self.n_clamped = 0
        self.n_added = 0
        self.last_cut: tuple[int, int] | None = None  # (width_before, width_after)
        self._values: deque[float] = deque()

    @property
    def width(self) -> int:
        return len(self._values)

    def contents(self) -> list[float]:
        """Retained window, oldest value first."""
        return list(self._values)

    def mean(self) -> float:
        if not self._values:
            raise ValueError("mean of an empty window")
        return math.fsum(self._values) / len(self._values)

    def add(self, value: float) -> bool:
        """Append one value; return True iff a change was detected.

        A detection means the split test dropped at least one old value
        on this call. ``n_detections`` counts such calls.
        """
        if not math.isfinite(value):
            raise ValueError(f"value must be finite, got {value}")
        if value < 0.0:
            value = 0.0
            self.n_clamped += 1
        elif value > 1.0:
            value = 1.0
            self.n_clamped += 1
        if len(self._values) == self.capacity:
            self._values.popleft()
        self._values.append(value)
        self.n_added += 1
        if self.n_added % self.check_interval != 0:
            return False
        dropped = self._shrink()
        if dropped:
            self.n_detections += 1
            return True
        return False

    def _shrink(self) -> int:
        """Drop oldest values while any split fails the mean test."""
        width_before = len(self._values)
        arr = np.fromiter(self._values, dtype=float, count=width_before)
        dropped = 0
        while arr.size >= 2:
            n = arr.size
            prefix = np.cumsum(arr)
            total = prefix[-1]
            n0 = np.arange(1, n, dtype=float)
            n1 = n - n0
            mean0 = prefix[:-1] / n0
            mean1 = (total - prefix[:-1]) / n1
            inv_2m = 0.5 * (1.0 / n0 + 1.0 / n1)
            eps = np.sqrt(inv_2m * math.log(4.0 * n / self.delta))
            if not (np.abs(mean0 - mean1) >= eps).any():
                break
            arr = arr[1:]
            dropped += 1
        if dropped:
            for _ in range(dropped):
                self._values.popleft()
            self.last_cut = (width_before, len(self._values))
        return dropped
