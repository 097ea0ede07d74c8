"""Regenerate tests/data/golden_L_shortest.csv from the polygon-tracing oracle."""
import csv
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import golden_L_saddles, sort_by_length_angle  # noqa: E402

rows = sort_by_length_angle(golden_L_saddles(2))[:10]
out = ROOT / "tests" / "data" / "golden_L_shortest.csv"
with out.open("w", newline="") as fh:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "y", "length"])
    for x, y in rows:
        w.writerow([f"{x:.12f}", f"{y:.12f}", f"{math.hypot(x, y):.12f}"])
print(f"wrote {out}")
