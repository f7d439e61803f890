"""Formula vs measured diameter, mean hops and deadlock check for every buildable family."""

import sys

from d2dmot.cli import metrics_row
from d2dmot.io import METRICS_HEADER, to_csv
from d2dmot.topology import build_topology

CASES = [
    ("mesh", (4, 4)), ("mesh", (8, 8)), ("torus", (4, 4)), ("torus", (8, 8)),
    ("bintree", 4), ("bintree", 8), ("bintree", 16),
    ("mot", (4, 4)), ("mot", (8, 8)), ("d2dmesh", (4, 4)), ("d2dmesh", (8, 8)),
    ("d2dmot", (4, 4)), ("d2dmot", (8, 8)),
]

if __name__ == "__main__":
    rows = [metrics_row(build_topology(family, size)) for family, size in CASES]
    sys.stdout.write(to_csv(rows, METRICS_HEADER))
