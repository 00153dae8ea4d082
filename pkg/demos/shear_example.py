"""The shear (z, w) -> (2z + i w^2, w) on the Siegel half-space H^2.

Walks through the main objects on the flagship example: backward orbits
only exist on the slice Re w = 0, every horizontal slice w = i r is its
own class with rate 2, and each class is the image of a one-dimensional
pre-model z -> 2z.

    python demos/shear_example.py
"""

import math

from orbitlab import (
    backward_orbit,
    backward_step,
    catalog_get,
    class_rate,
    classify_type,
    dilation_at,
    partition,
    siegel_example_premodel,
    tangent_bounded,
    verify_premodel,
)

entry = catalog_get("siegel_shear")
f = entry.map
print("map:", f.text())

# Backward orbits: they survive exactly when w is purely imaginary.
for w in (0.3j, 1e-10 + 0.3j, 1e-6 + 0.3j, 0.2 + 0.3j):
    orb = backward_orbit(f, (4j, w), 60)
    status = "survives 60 steps" if orb.complete else f"stops at step {orb.exit_index}"
    print(f"  start (4i, {w}): {status}")

# The backward step is log 2 along the slice w = 0.
est = backward_step(f, (1j, 0), 1, n_max=64)
print(f"sigma_1 at (i, 0) = {est.limit:.12f} (log 2 = {math.log(2):.12f}), verdict {est.verdict}")

rep = classify_type(f, (1j, 0))
print(f"type {rep.type}, rate {rep.rate:.12f}")
for m, sigma, slope in rep.evidence:
    print(f"  m = {m:3d}  sigma_m = {sigma:.9f}  slope = {slope:.9f}")

# Dilation 2 at the boundary point (-1, 0) of the ball chart, which is 0 on
# the Siegel side. Approach radially.
approach = [(-(1 - 2.0**-k), 0) for k in range(10, 50)]
print(f"dilation at (-1, 0): {dilation_at(f, (-1, 0), approach):.6f}")

# The partition: one class per slice w = i r, plus a sample off the invariant set.
samples = [(2j, 0j), (3j, 0j), (2.09j, 0.3j), (3j, 0.3j), (2.36j, 0.6j), (4j, 0.6j), (2j, 0.5 + 0.5j)]
p = partition(f, samples)
for k, c in enumerate(p.classes):
    print(f"  class {k}: samples {c['members']}, mu = {c['mu']:.6f}")
print("  not in the stable set:", p.non_stable)

# Tangent directions: the slice direction stays bounded, the normal one does not.
for v in ((1, 0), (0, 1)):
    print(f"  tangent {v}: {tangent_bounded(f, (1j, 0), v).verdict}")

# The pre-model through w = i r intertwines f with z -> 2z.
for r in (0, 1, -2):
    rep = verify_premodel(f, siegel_example_premodel(r))
    print(f"  pre-model r = {r:+d}: intertwining {rep.intertwining_residual:.1e}, "
          f"step identity {rep.step_residual:.1e}, passed {rep.passed()}")

print("class rate at (2i, 0.5i):", round(class_rate(f, (2j, 0.5j)), 9))
