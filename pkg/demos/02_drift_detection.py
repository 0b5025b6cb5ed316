"""Adaptive-window change detection on a noisy step signal.

The detector keeps a window of recent values and cuts away the old
portion whenever any split shows a mean difference larger than a
delta-controlled threshold. No change means the window just grows.
"""

from driftnet.adwin import Adwin, epsilon_cut
from driftnet.prng import make_rng

rng = make_rng(2024)
det = Adwin(delta=0.1, check_interval=1)

print("threshold example: a 50/50 split of 100 values at delta=0.1 "
      f"needs a mean gap of {epsilon_cut(50, 50, 100, 0.1):.5f}")

# Phase 1: noise around 0.3. The window should absorb all of it.
for _ in range(1500):
    det.add(0.3 + 0.1 * (rng.random() - 0.5))
print(f"\nafter 1500 quiet values: width={det.width}, "
      f"detections={det.n_detections}")

# Phase 2: the level jumps to 0.7. Watch the window collapse.
detected_at = None
for i in range(1500):
    if det.add(0.7 + 0.1 * (rng.random() - 0.5)) and detected_at is None:
        detected_at = i + 1
        before, after = det.last_cut
        print(f"first cut {detected_at} values after the step "
              f"(window {before} -> {after})")
print(f"after the step regime: width={det.width}, "
      f"detections={det.n_detections}, "
      f"window mean={sum(det.contents()) / det.width:.3f}")

# A constant stream never triggers, no matter how long.
quiet = Adwin(delta=0.1)
for _ in range(20_000):
    quiet.add(0.5)
print(f"\n20000 constant values: detections={quiet.n_detections}, "
      f"width={quiet.width}")
