"""Monte Carlo checks of the random-matrix facts the error bounds rest on."""

import argparse

from sketchlab.bounds import validate_gordon, validate_square_gaussian_law, validate_truncated_haar
from sketchlab.linalg_core import Seed


def show(name, rep):
    print(f"{name}: {'pass' if rep['passed'] else 'FAIL'}")
    for row in rep["rows"]:
        print("   ", {k: (round(v, 4) if isinstance(v, float) else v) for k, v in row.items()})


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()
    seed = Seed(args.seed)
    show("square Gaussian sigma_min law (n=50)",
         validate_square_gaussian_law(50, [0.25, 0.5, 1.0], args.samples, seed))
    show("Gaussian extreme singular values (200x50)",
         validate_gordon(200, 50, [0.05, 0.2], args.samples, seed))
    show("truncated Haar corner (n=40, r=10)",
         validate_truncated_haar(40, 10, [0.05, 0.2], args.samples, seed))


if __name__ == "__main__":
    main()
