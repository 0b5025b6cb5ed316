"""Tour of the synthetic drifting-stream generators.

A concept is a random hyperplane through the center of the unit cube;
the target is the distance from the plane. Drift replaces one concept
with another, either abruptly or through a sigmoid mixing window where
each instance is drawn from the new concept with rising probability.
"""

import numpy as np

from driftnet.streams import (
    DriftStreamSpec,
    generate_drift_stream,
    hyperplane_target,
    make_hyperplane_concept,
    sigmoid_mix_probability,
)

d = 5
old = make_hyperplane_concept(seed=7, d=d)
new = make_hyperplane_concept(seed=8, d=d)
print(f"concept normals are unit vectors: |w_old| = {np.linalg.norm(old.w):.12f}")
print(f"angle between the two concepts: "
      f"{np.degrees(np.arccos(abs(float(old.w @ new.w)))):.1f} degrees")

x = np.full(d, 0.9)
print(f"same point, different targets: {hyperplane_target(old, x):.4f} "
      f"vs {hyperplane_target(new, x):.4f}")

# The mixing probability is 0.5 exactly at the drift time and saturates
# about two widths out on either side.
t0, width = 1000, 200
for t in (0, 600, 900, 1000, 1100, 1400, 2000):
    p = sigmoid_mix_probability(t, t0, width)
    bar = "#" * int(round(p * 30))
    print(f"  t={t:5d}  p(new)={p:.4f}  {bar}")

spec = DriftStreamSpec(
    length=2000,
    concepts=(old, new),
    drift_times=(t0,),
    drift_widths=(width,),
    seed=123,
)
instances = list(generate_drift_stream(spec))
print(f"\ngenerated {len(instances)} instances, "
      f"x in [0,1)^{d}, 0 <= y <= sqrt({d})/1")

# Count which concept actually produced each instance near the change
# by checking the target against both candidates.
window = [i for i in instances if t0 - width <= i.index < t0 + width]
from_new = sum(1 for i in window
               if abs(i.y - hyperplane_target(new, i.x)) < 1e-12)
print(f"inside the +-{width} band around t0: {from_new}/{len(window)} "
      f"instances came from the new concept")

tail = instances[-200:]
all_new = all(abs(i.y - hyperplane_target(new, i.x)) < 1e-12 for i in tail)
print(f"final 200 instances all follow the new concept: {all_new}")
