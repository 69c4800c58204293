"""Median recovery error of a 100x100 rank-10 matrix over a noise grid.

Writes CSV, JSON and an SVG heatmap per sketch size r into --out-dir.
"""

import argparse
import dataclasses
from pathlib import Path

from sketchlab.harness import ExperimentSpec, emit_results, run_matrix_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", type=Path, default=Path("results/matrix"))
    args = ap.parse_args()

    spec = ExperimentSpec(kind="matrix", trials=args.trials, master_seed=args.seed,
                          workers=args.workers)
    res = run_matrix_experiment(spec)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    meta = dict(res.metadata, spec=dataclasses.asdict(spec))
    for fmt in ("csv", "json", "svg"):
        emit_results(res.rows, fmt, args.out_dir / f"matrix_grid.{fmt}", meta)
    for row in res.rows:
        print(f"r={row['r']:3d} eps1={row['eps1']:.0e} eps2={row['eps2']:.0e} "
              f"median abs err={row['median_abs_err']:.3e}")


if __name__ == "__main__":
    main()
