"""Replay the adjacency-matrix shortest-path sample run (5 -> 7)."""

import sys
from pathlib import Path

from d2dmot.cli import main

MATRIX = Path(__file__).resolve().parents[1] / "tests" / "data" / "sample_run_1.txt"

if __name__ == "__main__":
    src, dst = (sys.argv[1:3] if len(sys.argv) >= 3 else ("5", "7"))
    sys.exit(main(["shortest-path", str(MATRIX), src, dst]))
