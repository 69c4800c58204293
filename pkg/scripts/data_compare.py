"""Tensor recovery vs. slicewise matrix recovery on a tensor file.

Without --input a synthetic low-tubal-rank tensor is generated and saved first.
"""

import argparse
import json
from pathlib import Path

from sketchlab.harness import gen_lowtubal_tensor, run_data_tensor_comparison, save_tensor_file
from sketchlab.linalg_core import Seed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", type=Path)
    ap.add_argument("--shape", type=int, nargs=3, default=[64, 64, 12])
    ap.add_argument("--tubal-rank", type=int, default=8)
    ap.add_argument("--r", type=int, default=24)
    ap.add_argument("--eps1", type=float, default=0.01)
    ap.add_argument("--eps2", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    path = args.input
    if path is None:
        n1, n2, n3 = args.shape
        t = gen_lowtubal_tensor(n1, n2, n3, args.tubal_rank, Seed(args.seed).derive("data"),
                                "real")
        path = Path("results/synthetic.tns")
        path.parent.mkdir(parents=True, exist_ok=True)
        save_tensor_file(t, path)
    report = run_data_tensor_comparison(path, args.r, args.eps1, args.eps2, args.seed)
    print(json.dumps(report, indent=2, default=str))


if __name__ == "__main__":
    main()
