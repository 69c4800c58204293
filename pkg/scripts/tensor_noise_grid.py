"""Tensor version of the noise grid, plus the (r, n3) sweep at noise 0.01/0.01."""

import argparse
import dataclasses
from pathlib import Path

from sketchlab.harness import ExperimentSpec, emit_results, run_tensor_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n3", type=int, default=4)
    ap.add_argument("--n3-list", type=int, nargs="*", default=[1, 2, 4, 8, 16])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", type=Path, default=Path("results/tensor"))
    args = ap.parse_args()

    spec = ExperimentSpec(kind="tensor", n3=args.n3, n3_list=args.n3_list, trials=args.trials,
                          master_seed=args.seed, workers=args.workers)
    res = run_tensor_experiment(spec)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    meta = dict(res.metadata, spec=dataclasses.asdict(spec))
    for fmt in ("csv", "json", "svg"):
        emit_results(res.rows, fmt, args.out_dir / f"tensor_grid.{fmt}", meta)

    sweep = [row for row in res.rows if row["kind"] == "tensor-n3-sweep"]
    print("n3 sweep (unit-norm target, noise 0.01/0.01):")
    for row in sweep:
        print(f"  r={row['r']:3d} n3={row['n3']:3d} median rel err={row['median_rel_err']:.3e}")


if __name__ == "__main__":
    main()
