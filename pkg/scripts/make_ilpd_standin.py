#!/usr/bin/env python3
"""Generate the bundled ILPD stand-in CSV.

The public ILPD file cannot be redistributed here, so the repository ships
a deterministic stand-in with the same shape and close per-class marginals:
583 rows, 416 disease (raw target 1) / 167 non-disease (raw target 2),
exactly four missing A/G cells, heavy-tailed enzyme columns, and the
A/G ratio derived from albumin and total protein as in the real data.

Regenerate with:  python scripts/make_ilpd_standin.py
"""

import csv
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hepaflow.numerics import SeededRng  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "hepaflow", "data", "ilpd_standin.csv")
SEED = 20240412
N_DISEASE = 416
N_HEALTHY = 167
MISSING_AG_ROWS = (209, 241, 253, 312)  # fixed 0-based data rows

HEADER = ["Age", "Gender", "TB", "DB", "Alkphos", "Sgpt", "Sgot", "TP", "ALB", "A/G", "Target"]


def clip(v, lo, hi):
    return max(lo, min(hi, v))


def lognormal(rng, mu, sigma):
    return math.exp(mu + sigma * rng.normals(1)[0])


def make_row(rng, diseased):
    """One patient record.

    A shared severity factor drives bilirubin, the aminotransferases,
    alkaline phosphatase, and (negatively) albumin, reproducing the strong
    cross-lab correlations of the real data (Sgpt-Sgot ~ 0.8, TB-DB ~ 0.9,
    TB-ALB < 0); the enzyme pair shares an extra common component.
    """
    s = rng.normals(1)[0]  # per-patient severity
    e = rng.normals(1)[0]  # shared aminotransferase component

    def blend(w_s, w_e=0.0):
        w_n = math.sqrt(max(1.0 - w_s * w_s - w_e * w_e, 0.0))
        return w_s * s + w_e * e + w_n * rng.normals(1)[0]

    if diseased:
        age = clip(round(46.0 + 15.9 * rng.normals(1)[0]), 8, 90)
        tb = round(math.exp(0.62 + 1.28 * blend(0.60)), 1)
        alkphos = round(clip(math.exp(5.65 + 0.48 * blend(0.40)), 63, 2110))
        sgpt = round(clip(math.exp(3.95 + 1.12 * blend(0.40, 0.70)), 10, 2000))
        sgot = round(clip(math.exp(4.15 + 1.20 * blend(0.42, 0.70)), 10, 4929))
        tp = round(clip(6.43 + 1.08 * rng.normals(1)[0], 2.7, 9.6), 1)
        alb_ratio = clip(0.470 - 0.035 * s + 0.065 * rng.normals(1)[0], 0.2, 0.75)
        db_ratio = clip(0.44 + 0.05 * s + 0.11 * rng.normals(1)[0], 0.05, 0.85)
    else:
        age = clip(round(41.2 + 16.6 * rng.normals(1)[0]), 4, 90)
        tb = round(math.exp(-0.22 + 0.40 * blend(0.35)), 1)
        alkphos = round(clip(math.exp(5.34 + 0.33 * blend(0.25)), 90, 1590))
        sgpt = round(clip(math.exp(3.30 + 0.55 * blend(0.25, 0.70)), 10, 300))
        sgot = round(clip(math.exp(3.50 + 0.52 * blend(0.25, 0.70)), 10, 300))
        tp = round(clip(6.54 + 0.98 * rng.normals(1)[0], 3.7, 9.2), 1)
        alb_ratio = clip(0.510 - 0.015 * s + 0.063 * rng.normals(1)[0], 0.3, 0.78)
        db_ratio = clip(0.34 + 0.02 * s + 0.10 * rng.normals(1)[0], 0.05, 0.85)
    tb = max(tb, 0.3)
    db = round(clip(tb * db_ratio, 0.1, 19.7), 1)
    alb = round(clip(tp * alb_ratio, 0.9, 5.5), 1)
    globulin = max(tp - alb, 0.2)
    ag = round(clip(alb / globulin, 0.3, 2.8), 2)
    gender = "Male" if rng.uniform() < 0.7565 else "Female"
    return [age, gender, tb, db, alkphos, sgpt, sgot, tp, alb, ag]


def main():
    rng = SeededRng(SEED)
    rows = []
    for _ in range(N_DISEASE):
        rows.append(make_row(rng, True) + [1])
    for _ in range(N_HEALTHY):
        rows.append(make_row(rng, False) + [2])
    rng.shuffle(rows)
    for r in MISSING_AG_ROWS:
        rows[r][9] = ""

    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {os.path.normpath(OUT)}")


if __name__ == "__main__":
    main()
