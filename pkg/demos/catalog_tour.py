"""Classify every catalog map and compare against its recorded truth.

Prints one row per entry: expected type and rate, what the classifier
finds from the sample point, and the divergence-rate upper bound.

    python demos/catalog_tour.py
"""

import math

from orbitlab import catalog_get, catalog_names, classify_type, divergence_rate

print(f"{'entry':24s} {'truth':11s} {'found':11s} {'rate':>10s} {'truth rate':>10s} {'c(f) <=':>10s}")
for name in catalog_names():
    e = catalog_get(name)
    rep = classify_type(e.map, e.sample_point)
    want = e.truth["type"].value
    c = divergence_rate(e.map, e.sample_point)
    tr = e.truth["rate"].value
    flag = "" if rep.type == want else "  <-- mismatch"
    rate = rep.rate if math.isfinite(rep.rate) else float("nan")
    print(f"{name:24s} {want:11s} {rep.type:11s} {rate:10.6f} {tr:10.6f} {c:10.6f}{flag}")
