"""Two classes at one Denjoy-Wolff point: z -> z + 1 on the slit plane.

The slit plane C minus (-inf, 0] contains both half-planes. Backward orbits
of points above the real axis stay a bounded distance apart; points on
opposite sides drift apart without bound, although every forward orbit
tends to the same boundary point at infinity.

    python demos/slit_plane_classes.py
"""

from orbitlab import catalog_get, classify_type, denjoy_wolff, equivalent, limit_distance

f = catalog_get("slitplane_translation").map

# Forward orbits reach infinity only like n^(-1/2) in the ball chart, so at this
# orbit length the report stays inconclusive; the final slacks show the drift.
rep = denjoy_wolff(f, [(1j,), (-1j,), (2 + 0.5j,)], n=200)
print(f"Denjoy-Wolff report: {rep.kind} ({rep.diagnostics.get('reason', '')})")
print("  final ball-chart slack per start:", ", ".join(f"{s:.2e}" for s in rep.diagnostics["final_slack"]))

for x, y in ((1j, 2j), (1j, 3 + 5j), (1j, -1j)):
    v = equivalent(f, x, y, n_max=4096)
    tail = ", ".join(f"{n}:{d:.6f}" for n, d in v.series[-4:])
    print(f"  {x} ~ {y}? {v.verdict:10s} last doublings {tail}")

est = limit_distance(f, 1j, 2j, n_max=4096)
print(f"intrinsic distance of i and 2i in their class: {est.limit:.9f}")
print("type at i:", classify_type(f, (1j,)).type)
