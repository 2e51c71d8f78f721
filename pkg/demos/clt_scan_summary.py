"""Run the bound-validity scan and summarise tightness per bound and family."""

import sys
from collections import defaultdict

from zetaclt.report import write_csv
from zetaclt.scenarios import SCAN_COLUMNS, run_clt_scan


def main(n_max="32", out="scan.csv"):
    res = run_clt_scan(n_min=2, n_max=int(n_max))
    with open(out, "w") as fh:
        write_csv(res.rows, SCAN_COLUMNS, fh)
    best = defaultdict(float)
    for fam, delta, n, bound, lhs, lo, hi, valid, tight, ratio in res.rows:
        best[(bound, fam)] = max(best[(bound, fam)], ratio if ratio != float("inf") else 0.0)
    print(f"{len(res.rows)} rows, {res.violations} violations, skipped {res.skipped}")
    for (bound, fam), r in sorted(best.items()):
        print(f"  {bound:14s} {fam:28s} max lhs/rhs_lower = {r:.4f}")


if __name__ == "__main__":
    main(*sys.argv[1:])
