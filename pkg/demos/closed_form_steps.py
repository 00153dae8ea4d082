"""Backward steps of a hyperbolic disc automorphism against the closed form.

For the automorphism with repelling multiplier lam the backward m-step at a
point seen from the repelling fixed point under angle theta has a closed
form. On the axis (theta = 0) it equals m log lam for every m; off the axis
the slope sigma_m / m approaches log lam only like 1/m.

    python demos/closed_form_steps.py
"""

import math

from orbitlab import backward_step, catalog_get, sigma_closed_form

lam = 2.0
f = catalog_get("disc_hyperbolic", {"lam": lam}).map
print(" m   dynamic sigma_m    closed form     difference")
for m in range(1, 11):
    dyn = backward_step(f, (0,), m, n_max=32).limit
    cf = sigma_closed_form(0.0, lam, m)
    print(f"{m:2d}  {dyn:.12f}  {cf:.12f}  {abs(dyn - cf):.1e}")

print("\nslope error |sigma_m/m - log lam| off the axis:")
for theta in (0.0, 0.5, 1.0):
    errs = [abs(sigma_closed_form(theta, lam, m) / m - math.log(lam)) for m in (10, 40, 160, 640)]
    print(f"  theta = {theta:.1f}: " + "  ".join(f"{e:.2e}" for e in errs))
print("(the off-axis error is -2 log cos(theta) / m to leading order)")
