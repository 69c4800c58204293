"""Seeded Monte Carlo experiments over grids of sketch size and noise level.

Seeds: the target is fixed per ``(field_mode, n1, n2, n3, r0)``. Each trial
draws S, S~, Z, Z~ from streams keyed by ``(n1, n2, n3, r0, r, trial, role)``,
so every noise level in a sweep sees the same sketching matrices and noise
directions (common random numbers); only the noise scale changes.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..linalg_core import (
    DEFAULT_REL_TOL,
    Seed,
    frobenius,
    sample_gaussian,
)
from ..matrix_sketch import SketchModel, make_sketches, recover
from ..tensor_sketch import (
    TensorSketchModel,
    make_tensor_sketches,
    recover_tensor_detailed,
)
from ..tproduct import t_product_fft, tensor_frobenius
from .tns import load_tensor_file

KINDS = ("matrix", "tensor", "lemma-validation", "bound-eval", "data-tensor")
CSV_COLUMNS = (
    "kind", "n1", "n2", "n3", "r0", "r", "eps1", "eps2", "trials", "noise_mode",
    "median_rel_err", "median_abs_err", "p25_rel_err", "p75_rel_err",
    "rank_flag_failures", "master_seed",
)


class SpecError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid experiment spec: " + "; ".join(self.violations))


@dataclass
class ExperimentSpec:
    kind: str = "matrix"
    n1: int = 100
    n2: int = 100
    n3: int = 1
    r0: int = 10
    r_list: list[int] = field(default_factory=lambda: [11, 20, 99])
    eps1_grid: list[float] = field(default_factory=lambda: [1e-4, 1e-3, 1e-2, 1e-1])
    eps2_grid: list[float] = field(default_factory=lambda: [1e-4, 1e-3, 1e-2, 1e-1])
    trials: int = 50
    master_seed: int = 0
    noise_mode: str = "real"
    field_mode: str = "complex-target"
    normalize_target: bool = False
    # n3 sweep at fixed noise (tensor experiments only)
    n3_list: list[int] = field(default_factory=list)
    sweep_eps1: float = 0.01
    sweep_eps2: float = 0.01
    rel_tol: float = DEFAULT_REL_TOL
    workers: int = 1
    out: str | None = None

    def violations(self) -> list[str]:
        v = []
        if self.kind not in KINDS:
            v.append(f"kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("n1", "n2", "n3"):
            if getattr(self, name) < 1:
                v.append(f"{name} must be >= 1")
        if self.r0 < 0:
            v.append("r0 must be >= 0")
        if self.r0 > min(self.n1, self.n2):
            v.append(f"r0={self.r0} exceeds min(n1, n2)={min(self.n1, self.n2)}")
        if self.trials < 1:
            v.append("trials must be >= 1")
        if not self.r_list:
            v.append("r_list must be nonempty")
        if any(r < 1 for r in self.r_list):
            v.append("r_list entries must be >= 1")
        if not self.eps1_grid:
            v.append("eps1_grid must be nonempty")
        if not self.eps2_grid:
            v.append("eps2_grid must be nonempty")
        if any(e < 0 for e in list(self.eps1_grid) + list(self.eps2_grid)):
            v.append("noise levels must be >= 0")
        if any(n < 1 for n in self.n3_list):
            v.append("n3_list entries must be >= 1")
        if self.noise_mode not in ("real", "complex"):
            v.append("noise_mode must be 'real' or 'complex'")
        if self.field_mode not in ("real-target", "complex-target"):
            v.append("field_mode must be 'real-target' or 'complex-target'")
        if self.workers < 1:
            v.append("workers must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            v.append("master_seed must be a 64-bit unsigned integer")
        return v

    def validate(self) -> None:
        v = self.violations()
        if v:
            raise SpecError(v)


@dataclass
class TrialRecord:
    kind: str
    n1: int
    n2: int
    n3: int
    r0: int
    r: int
    eps1: float
    eps2: float
    noise_mode: str
    field_mode: str
    trial_index: int
    rel_err_frobenius: float
    abs_err_frobenius: float
    rank_flag: bool
    wall_time_ms: float


@dataclass
class ExperimentResult:
    rows: list[dict]
    records: list[TrialRecord]
    metadata: dict = field(default_factory=dict)


# -- data generation ----------------------------------------------------------

def _factor_mode(field_mode: str) -> str:
    return "real" if field_mode == "real-target" else "complex"


def gen_lowrank_matrix(n1: int, n2: int, r0: int, seed: Seed, mode: str = "complex") -> np.ndarray:
    """Product of n1 x r0 and r0 x n2 Gaussian factors."""
    if r0 > min(n1, n2):
        raise ValueError(f"r0={r0} exceeds min(n1, n2)={min(n1, n2)}")
    g1 = sample_gaussian(n1, r0, seed.derive("left"), mode)
    g2 = sample_gaussian(r0, n2, seed.derive("right"), mode)
    return g1 @ g2


def gen_lowtubal_tensor(n1: int, n2: int, n3: int, r0: int, seed: Seed,
                        mode: str = "complex") -> np.ndarray:
    """t-product of n1 x r0 x n3 and r0 x n2 x n3 Gaussian tensors (same draws as the matrix case at n3=1)."""
    if r0 > min(n1, n2):
        raise ValueError(f"r0={r0} exceeds min(n1, n2)={min(n1, n2)}")
    g1 = sample_gaussian(n1, r0 * n3, seed.derive("left"), mode).reshape(n1, r0, n3)
    g2 = sample_gaussian(r0, n2 * n3, seed.derive("right"), mode).reshape(r0, n2, n3)
    return t_product_fft(g1, g2)


def scale_to_frobenius(m, target: float) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if target == 0:
        return np.zeros_like(m)
    norm = float(np.linalg.norm(m.ravel()))
    if norm == 0:
        raise ValueError("cannot rescale a zero object to a positive norm")
    return m * (target / norm)


def _noise(shape, target: float, seed: Seed, mode: str) -> np.ndarray:
    if target == 0:
        return np.zeros(shape, dtype=np.complex128)
    rows = shape[0]
    cols = int(np.prod(shape[1:]))
    return scale_to_frobenius(sample_gaussian(rows, cols, seed, mode).reshape(shape), target)


# -- trials -------------------------------------------------------------------

def _target(spec: ExperimentSpec, n3: int) -> np.ndarray:
    seed = Seed(spec.master_seed).derive("X0", spec.field_mode, spec.n1, spec.n2, n3, spec.r0)
    mode = _factor_mode(spec.field_mode)
    if spec.kind == "matrix":
        x0 = gen_lowrank_matrix(spec.n1, spec.n2, spec.r0, seed, mode)
    else:
        x0 = gen_lowtubal_tensor(spec.n1, spec.n2, n3, spec.r0, seed, mode)
    if spec.normalize_target and spec.r0 > 0:
        x0 = scale_to_frobenius(x0, 1.0)
    return x0


def _trial_draws(spec, n3, r, t):
    base = Seed(spec.master_seed)
    key = (spec.n1, spec.n2, n3, spec.r0, r, t)
    s = sample_gaussian(r, spec.n1, base.derive(*key, "S"), "complex")
    s_tilde = sample_gaussian(r, spec.n2, base.derive(*key, "S~"), "complex")
    z_seed = base.derive(*key, "Z")
    zt_seed = base.derive(*key, "Z~")
    return s, s_tilde, z_seed, zt_seed


def _run_trial(spec: ExperimentSpec, x0, kind, n3, r, eps1, eps2, t) -> TrialRecord:
    start = time.perf_counter()
    s, s_tilde, z_seed, zt_seed = _trial_draws(spec, n3, r, t)
    if kind == "matrix":
        z = _noise((r, spec.n2), eps1, z_seed, spec.noise_mode)
        zt = _noise((r, spec.n1), eps2, zt_seed, spec.noise_mode)
        y, y_tilde = make_sketches(SketchModel(x0, s, s_tilde, z, zt))
        x, flag, _ = recover(y, y_tilde, s, spec.rel_tol)
        abs_err = frobenius(x - x0)
        ref = frobenius(x0)
    else:
        z = _noise((r, spec.n2, n3), eps1, z_seed, spec.noise_mode)
        zt = _noise((r, spec.n1, n3), eps2, zt_seed, spec.noise_mode)
        y, y_tilde = make_tensor_sketches(TensorSketchModel(x0, s, s_tilde, z, zt))
        x, flag, _ = recover_tensor_detailed(y, y_tilde, s, spec.rel_tol)
        abs_err = tensor_frobenius(x - x0)
        ref = tensor_frobenius(x0)
    rel_err = abs_err / ref if ref > 0 else abs_err
    return TrialRecord(kind, spec.n1, spec.n2, n3, spec.r0, r, eps1, eps2,
                       spec.noise_mode, spec.field_mode, t, rel_err, abs_err, flag,
                       (time.perf_counter() - start) * 1e3)


def _execute(tasks, workers: int):
    if workers == 1:
        return [fn(*args) for fn, args in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda task: task[0](*task[1]), tasks))


def aggregate(records: list[TrialRecord], trials: int, master_seed: int,
              kind: str | None = None) -> list[dict]:
    """One row per cell in first-seen order, with medians and quartiles over trials."""
    cells: dict[tuple, list[TrialRecord]] = {}
    for rec in records:
        cells.setdefault((rec.kind, rec.n3, rec.r, rec.eps1, rec.eps2), []).append(rec)
    rows = []
    for recs in cells.values():
        rel = np.array([x.rel_err_frobenius for x in recs])
        ab = np.array([x.abs_err_frobenius for x in recs])
        head = recs[0]
        rows.append({
            "kind": kind or head.kind, "n1": head.n1, "n2": head.n2, "n3": head.n3,
            "r0": head.r0, "r": head.r, "eps1": head.eps1, "eps2": head.eps2,
            "trials": trials, "noise_mode": head.noise_mode,
            "median_rel_err": float(np.median(rel)),
            "median_abs_err": float(np.median(ab)),
            "p25_rel_err": float(np.percentile(rel, 25)),
            "p75_rel_err": float(np.percentile(rel, 75)),
            "rank_flag_failures": int(sum(not x.rank_flag for x in recs)),
            "master_seed": master_seed,
        })
    return rows


def _grid_tasks(spec, kind, n3, x0, r_list, eps1_grid, eps2_grid):
    return [
        (_run_trial, (spec, x0, kind, n3, r, e1, e2, t))
        for r in r_list for e1 in eps1_grid for e2 in eps2_grid
        for t in range(spec.trials)
    ]


def _metadata(spec: ExperimentSpec) -> dict:
    meta = asdict(spec)
    meta.pop("out", None)
    meta.pop("workers", None)
    return meta


def run_matrix_experiment(spec: ExperimentSpec) -> ExperimentResult:
    spec.validate()
    if spec.kind != "matrix":
        raise SpecError([f"run_matrix_experiment needs kind='matrix', got {spec.kind!r}"])
    x0 = _target(spec, 1)
    records = _execute(
        _grid_tasks(spec, "matrix", 1, x0, spec.r_list, spec.eps1_grid, spec.eps2_grid),
        spec.workers,
    )
    return ExperimentResult(aggregate(records, spec.trials, spec.master_seed), records,
                            _metadata(spec))


def run_tensor_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """ε-grid at ``spec.n3``, plus an (r, n3) sweep at fixed noise with a unit-norm target if ``n3_list`` is set."""
    spec.validate()
    if spec.kind != "tensor":
        raise SpecError([f"run_tensor_experiment needs kind='tensor', got {spec.kind!r}"])
    x0 = _target(spec, spec.n3)
    records = _execute(
        _grid_tasks(spec, "tensor", spec.n3, x0, spec.r_list, spec.eps1_grid, spec.eps2_grid),
        spec.workers,
    )
    rows = aggregate(records, spec.trials, spec.master_seed)
    sweep_records = []
    for n3 in spec.n3_list:
        x0_sweep = _target(spec, n3)
        if spec.r0 > 0:
            x0_sweep = scale_to_frobenius(x0_sweep, 1.0)
        sweep_records += _execute(
            _grid_tasks(spec, "tensor", n3, x0_sweep, spec.r_list,
                        [spec.sweep_eps1], [spec.sweep_eps2]),
            spec.workers,
        )
    sweep_rows = aggregate(sweep_records, spec.trials, spec.master_seed, kind="tensor-n3-sweep")
    sweep_rows.sort(key=lambda row: (row["r"], row["n3"]))
    return ExperimentResult(rows + sweep_rows, records + sweep_records, _metadata(spec))


# -- real data ----------------------------------------------------------------

def _slicewise_recover(x0, s_slices, st_slices, z, zt, rel_tol):
    n1, n2, n3 = x0.shape
    out = np.empty((n1, n2, n3), dtype=np.complex128)
    flags = True
    for k in range(n3):
        y = s_slices[k] @ x0[:, :, k] + z[:, :, k]
        y_tilde = st_slices[k] @ x0[:, :, k].conj().T + zt[:, :, k]
        out[:, :, k], flag, _ = recover(y, y_tilde, s_slices[k], rel_tol)
        flags &= flag
    return out, bool(flags)


def run_data_tensor_comparison(path_or_tensor, r: int, eps1: float, eps2: float, seed: int,
                               noise_mode: str = "real",
                               rel_tol: float = DEFAULT_REL_TOL) -> dict:
    """Compare t-product recovery with slicewise matrix recovery on one tensor.

    Strategies: ``tensor`` (shared S, S~ under the t-product), ``slicewise-fresh``
    (independent S_k, S~_k per frontal slice), ``slicewise-shared`` (one S, S~
    reused for every slice). The target is normalized to unit Frobenius norm and
    all strategies see the same noise tensors.
    """
    if isinstance(path_or_tensor, np.ndarray):
        x0 = np.asarray(path_or_tensor, dtype=np.complex128)
        source = "<array>"
    else:
        x0 = load_tensor_file(path_or_tensor)
        source = str(path_or_tensor)
    if x0.ndim != 3:
        raise SpecError([f"expected an order-3 tensor, got shape {x0.shape}"])
    if r < 1:
        raise SpecError(["r must be >= 1"])
    n1, n2, n3 = x0.shape
    real_target = not np.any(x0.imag)
    x0 = scale_to_frobenius(x0, 1.0)
    base = Seed(seed)
    s = sample_gaussian(r, n1, base.derive("data", "S"), "complex")
    s_tilde = sample_gaussian(r, n2, base.derive("data", "S~"), "complex")
    z = _noise((r, n2, n3), eps1, base.derive("data", "Z"), noise_mode)
    zt = _noise((r, n1, n3), eps2, base.derive("data", "Z~"), noise_mode)

    y, y_tilde = make_tensor_sketches(TensorSketchModel(x0, s, s_tilde, z, zt))
    x_a, flag_a, _ = recover_tensor_detailed(y, y_tilde, s, rel_tol)

    fresh_s = [sample_gaussian(r, n1, base.derive("data", "S", k), "complex") for k in range(n3)]
    fresh_st = [sample_gaussian(r, n2, base.derive("data", "S~", k), "complex") for k in range(n3)]
    x_b, flag_b = _slicewise_recover(x0, fresh_s, fresh_st, z, zt, rel_tol)
    x_c, flag_c = _slicewise_recover(x0, [s] * n3, [s_tilde] * n3, z, zt, rel_tol)

    itemsize = np.dtype(np.complex128).itemsize
    pair_bytes = r * (n1 + n2) * itemsize
    sketch_bytes = r * (n1 + n2) * n3 * itemsize
    strategies = {}
    for name, x, flag, count in (
        ("tensor", x_a, flag_a, 1),
        ("slicewise-fresh", x_b, flag_b, n3),
        ("slicewise-shared", x_c, flag_c, 1),
    ):
        strategies[name] = {
            "error_frobenius": tensor_frobenius(x - x0),
            "imag_frobenius": tensor_frobenius(x.imag) if real_target else None,
            "rank_flag": flag,
            "sketch_matrix_count": count,
            "sketch_matrix_bytes": count * pair_bytes,
            "sketch_bytes": sketch_bytes,
        }
    ordering = sorted(strategies, key=lambda k: strategies[k]["error_frobenius"])
    return {
        "kind": "data-tensor", "source": source, "n1": n1, "n2": n2, "n3": n3,
        "r": r, "eps1": eps1, "eps2": eps2, "noise_mode": noise_mode,
        "real_target": real_target, "master_seed": seed,
        "strategies": strategies, "error_ordering": ordering,
    }
