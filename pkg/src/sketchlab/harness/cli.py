"""Command line entry point: ``sketchlab <subcommand> ...``.

Exit codes: 0 success, 2 invalid spec or bound hypotheses, 3 numerical
failure, 4 I/O or file parse failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from .. import bounds
from ..linalg_core import NumericalError, Seed
from .emit import emit_results, to_csv, to_json, to_svg
from .experiments import (
    ExperimentSpec,
    SpecError,
    gen_lowtubal_tensor,
    run_data_tensor_comparison,
    run_matrix_experiment,
    run_tensor_experiment,
)
from .tns import TnsParseError, save_tensor_file

log = logging.getLogger("sketchlab")

EXIT_OK, EXIT_SPEC, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _add_experiment_args(p, tensor: bool):
    p.add_argument("--n1", type=int, default=100)
    p.add_argument("--n2", type=int, default=100)
    p.add_argument("--r0", type=int, default=10)
    p.add_argument("--r", type=int, nargs="+", default=[11, 20, 99], dest="r_list")
    p.add_argument("--eps1", type=float, nargs="+", default=[1e-4, 1e-3, 1e-2, 1e-1])
    p.add_argument("--eps2", type=float, nargs="+", default=[1e-4, 1e-3, 1e-2, 1e-1])
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--noise-mode", choices=["real", "complex"], default="real")
    p.add_argument("--field-mode", choices=["real-target", "complex-target"],
                   default="complex-target")
    p.add_argument("--normalize-target", action="store_true",
                   help="rescale the target to unit Frobenius norm")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json", "svg"], default="csv")
    if tensor:
        p.add_argument("--n3", type=int, default=4)
        p.add_argument("--n3-list", type=int, nargs="*", default=[],
                       help="also sweep n3 at fixed noise (--sweep-eps1/2)")
        p.add_argument("--sweep-eps1", type=float, default=0.01)
        p.add_argument("--sweep-eps2", type=float, default=0.01)


def _spec_from_args(args, kind: str) -> ExperimentSpec:
    spec = ExperimentSpec(
        kind=kind, n1=args.n1, n2=args.n2, r0=args.r0, r_list=args.r_list,
        eps1_grid=args.eps1, eps2_grid=args.eps2, trials=args.trials,
        master_seed=args.seed, noise_mode=args.noise_mode, field_mode=args.field_mode,
        normalize_target=args.normalize_target, workers=args.workers, out=args.out,
    )
    if kind == "tensor":
        spec.n3 = args.n3
        spec.n3_list = args.n3_list
        spec.sweep_eps1 = args.sweep_eps1
        spec.sweep_eps2 = args.sweep_eps2
    return spec


def _emit_experiment(result, args) -> None:
    if args.format == "csv":
        text = to_csv(result.rows)
    elif args.format == "json":
        text = to_json(result.rows, result.metadata)
    else:
        text = to_svg(result.rows)
    _write(text, args.out)


def cmd_matrix_exp(args) -> int:
    _emit_experiment(run_matrix_experiment(_spec_from_args(args, "matrix")), args)
    return EXIT_OK


def cmd_tensor_exp(args) -> int:
    _emit_experiment(run_tensor_experiment(_spec_from_args(args, "tensor")), args)
    return EXIT_OK


def cmd_data_compare(args) -> int:
    report = run_data_tensor_comparison(args.path, args.r, args.eps1, args.eps2, args.seed,
                                        noise_mode=args.noise_mode)
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_validate_lemmas(args) -> int:
    seed = Seed(args.seed)
    reports = []
    if "square" in args.lemmas:
        reports.append(bounds.validate_square_gaussian_law(
            args.square_n, args.eps, args.samples, seed))
    if "gordon" in args.lemmas:
        reports.append(bounds.validate_gordon(
            args.gordon_m, args.gordon_n, args.delta, args.samples, seed))
    if "haar" in args.lemmas:
        reports.append(bounds.validate_truncated_haar(
            args.haar_n, args.haar_r, args.delta, args.samples, seed))
    for rep in reports:
        log.info("%s: %s", rep["lemma"], "pass" if rep["passed"] else "FAIL")
    _write(json.dumps({"reports": reports}, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    inp = bounds.BoundInput(
        n1=args.n1, n2=args.n2, n3=args.n3, r=args.r, r_low=args.r_low,
        delta1=args.delta1, delta2=args.delta2, epsilon=args.epsilon,
        z_norm=args.z_norm, z_tilde_norm=args.z_tilde_norm, sigma_tail=args.sigma_tail,
    )
    out = bounds.BOUNDS[args.variant](inp)
    payload = {"variant": args.variant, "input": asdict(inp), "output": asdict(out)}
    _write(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK if out.valid else EXIT_SPEC


def cmd_gen_tensor(args) -> int:
    if args.out is None:
        raise SpecError(["gen-tensor requires --out"])
    mode = "real" if args.field_mode == "real-target" else "complex"
    t = gen_lowtubal_tensor(args.n1, args.n2, args.n3, args.r0, Seed(args.seed), mode)
    if mode == "real":
        # real factors give a real t-product; drop FFT round-off in the imaginary part
        t = t.real.astype(complex)
    save_tensor_file(t, args.out, dtype="real" if mode == "real" else "complex")
    log.info("wrote %dx%dx%d tensor of tubal rank %d to %s",
             args.n1, args.n2, args.n3, args.r0, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sketchlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix-exp", help="matrix recovery over an (r, eps1, eps2) grid")
    _add_experiment_args(p, tensor=False)
    p.set_defaults(func=cmd_matrix_exp)

    p = sub.add_parser("tensor-exp", help="tensor recovery over an (r, eps1, eps2) grid")
    _add_experiment_args(p, tensor=True)
    p.set_defaults(func=cmd_tensor_exp)

    p = sub.add_parser("data-compare", help="tensor vs slicewise recovery on a TNS1 file")
    p.add_argument("path")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--eps1", type=float, default=0.01)
    p.add_argument("--eps2", type=float, default=0.01)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--noise-mode", choices=["real", "complex"], default="real")
    p.add_argument("--out")
    p.set_defaults(func=cmd_data_compare)

    p = sub.add_parser("validate-lemmas", help="Monte Carlo checks of the random-matrix lemmas")
    p.add_argument("--lemmas", nargs="+", choices=["square", "gordon", "haar"],
                   default=["square", "gordon", "haar"])
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--eps", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    p.add_argument("--delta", type=float, nargs="+", default=[0.05, 0.2])
    p.add_argument("--square-n", type=int, default=50)
    p.add_argument("--gordon-m", type=int, default=200)
    p.add_argument("--gordon-n", type=int, default=50)
    p.add_argument("--haar-n", type=int, default=40)
    p.add_argument("--haar-r", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate_lemmas)

    p = sub.add_parser("bound", help="evaluate a theoretical error bound")
    p.add_argument("--variant", choices=sorted(bounds.BOUNDS), default="robust")
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int)
    p.add_argument("--n3", type=int, default=1)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--r-low", type=int, default=0, help="r0 or r1 depending on the variant")
    p.add_argument("--delta1", type=float, default=0.1)
    p.add_argument("--delta2", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--z-norm", type=float, default=0.0)
    p.add_argument("--z-tilde-norm", type=float, default=0.0)
    p.add_argument("--sigma-tail", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("gen-tensor", help="write a synthetic low-tubal-rank TNS1 file")
    p.add_argument("--n1", type=int, default=100)
    p.add_argument("--n2", type=int, default=100)
    p.add_argument("--n3", type=int, default=8)
    p.add_argument("--r0", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--field-mode", choices=["real-target", "complex-target"],
                   default="real-target")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_tensor)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n2", 0) is None:
        args.n2 = args.n1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (TnsParseError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
