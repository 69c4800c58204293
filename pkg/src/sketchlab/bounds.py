"""Closed-form recovery error bounds and Monte Carlo checks of the random-matrix facts behind them.

Every evaluator returns a :class:`BoundOutput`; hypotheses that fail give
``valid=False`` with the reasons instead of raising. Matrix bounds hold in any
norm with ``||AB|| <= ||A||_2 ||B||`` (spectral or Frobenius); tensor bounds are
on the *squared* Frobenius error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg_core import (
    NumericalError,
    Seed,
    ShapeError,
    qr,
    sample_complex_gaussian,
    singular_values,
)


@dataclass(frozen=True)
class BoundInput:
    n1: int
    n2: int
    r: int
    r_low: int = 0
    n3: int = 1
    delta1: float = 0.1
    delta2: float = 0.1
    epsilon: float = 0.1
    z_norm: float = 0.0
    z_tilde_norm: float = 0.0
    sigma_tail: float = 0.0

    @property
    def delta2_floor(self) -> float:
        """``exp(-(sqrt(r) - sqrt(r_low))^2)``; delta2 must exceed it."""
        return math.exp(-((math.sqrt(self.r) - math.sqrt(self.r_low)) ** 2))

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "delta2_above_floor": self.delta2 > self.delta2_floor,
            "epsilon_below_one": 0 < self.epsilon < 1,
            "rank_order": self.r_low < self.r < self.n1,
        }


@dataclass
class BoundOutput:
    value: float
    probability_floor: float
    valid: bool
    terms: dict[str, float] = field(default_factory=dict)
    reasons: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _invalid(reasons, probability_floor=math.nan) -> BoundOutput:
    return BoundOutput(math.nan, probability_floor, False, {}, list(reasons))


def _common_checks(b: BoundInput, *, strict_delta2_below_one=True) -> list[str]:
    reasons = []
    if b.delta1 <= 0:
        reasons.append("delta1 must be > 0")
    if not 0 < b.epsilon < 1:
        reasons.append("epsilon must lie in (0, 1)")
    if b.z_norm < 0 or b.z_tilde_norm < 0 or b.sigma_tail < 0:
        reasons.append("norms must be nonnegative")
    if strict_delta2_below_one and not b.delta2 < 1:
        reasons.append("delta2 must be < 1")
    if not strict_delta2_below_one and not b.delta2 <= 1:
        reasons.append("delta2 must be <= 1")
    if not b.delta2 > b.delta2_floor:
        reasons.append(
            f"delta2={b.delta2!r} must exceed exp(-(sqrt(r)-sqrt(r_low))^2)={b.delta2_floor!r}"
        )
    if not b.r_low < b.r < b.n1:
        reasons.append(f"need r_low < r < n1, got r_low={b.r_low}, r={b.r}, n1={b.n1}")
    return reasons


def _gap(b: BoundInput) -> float:
    return math.sqrt(b.r) - math.sqrt(b.r_low) - math.sqrt(math.log(1 / b.delta2))


def _z_factor(eps: float) -> float:
    return math.sqrt(math.log(1 / (1 - eps)))


def robust_bound(b: BoundInput) -> BoundOutput:
    """Error bound for the double-sketch output when rank(X0) = r_low < r < n1."""
    reasons = _common_checks(b)
    if reasons:
        return _invalid(reasons)
    t_tilde = math.sqrt(b.r * (b.n1 - b.r)) * b.z_tilde_norm / (math.sqrt(b.delta1) * _gap(b))
    t_z = math.sqrt(b.r) * b.z_norm / _z_factor(b.epsilon)
    return BoundOutput(t_tilde + t_z, 1 - b.delta1 - b.delta2 - b.epsilon, True,
                       {"z_tilde": t_tilde, "z": t_z})


def robust_bound_r_equals_r0(b: BoundInput) -> BoundOutput:
    reasons = []
    if b.delta1 <= 0:
        reasons.append("delta1 must be > 0")
    if not 0 < b.delta2 < 1:
        reasons.append("delta2 must lie in (0, 1)")
    if not 0 < b.epsilon < 1:
        reasons.append("epsilon must lie in (0, 1)")
    if not b.r == b.r_low < b.n1:
        reasons.append(f"need r = r_low < n1, got r={b.r}, r_low={b.r_low}, n1={b.n1}")
    if reasons:
        return _invalid(reasons)
    t_tilde = (b.r * math.sqrt(b.n1 - b.r) * b.z_tilde_norm
               / math.sqrt(b.delta1 * math.log(1 / (1 - b.delta2))))
    t_z = math.sqrt(b.r) * b.z_norm / _z_factor(b.epsilon)
    return BoundOutput(t_tilde + t_z, 1 - b.delta1 - b.delta2 - b.epsilon, True,
                       {"z_tilde": t_tilde, "z": t_z})


def robust_bound_r_equals_n1(b: BoundInput) -> BoundOutput:
    """With a square sketch the output is ``S^{-1} Y``; the bound ignores ``z_tilde_norm``."""
    reasons = []
    if not 0 < b.epsilon < 1:
        reasons.append("epsilon must lie in (0, 1)")
    if b.r != b.n1:
        reasons.append(f"need r = n1, got r={b.r}, n1={b.n1}")
    if reasons:
        return _invalid(reasons)
    t_z = math.sqrt(b.n1) * b.z_norm / _z_factor(b.epsilon)
    return BoundOutput(t_z, 1 - b.epsilon, True, {"z": t_z})


def _approx_factors(b: BoundInput) -> tuple[float, float]:
    lg = math.sqrt(math.log(1 / b.delta2))
    t1 = (math.sqrt(b.r * (b.n1 - b.r)) * (math.sqrt(b.r) + math.sqrt(b.n2) + lg)
          / (math.sqrt(b.delta1) * _gap(b)))
    t2 = math.sqrt(b.r) * (math.sqrt(b.r) + math.sqrt(b.n1) + lg) / _z_factor(b.epsilon)
    return t1, t2


def lowrank_approx_bound(b: BoundInput) -> BoundOutput:
    """Spectral-norm bound for approximately low-rank X0; ``r_low`` is r1, ``sigma_tail`` is sigma_{r1+1}(X0)."""
    reasons = _common_checks(b, strict_delta2_below_one=False)
    if reasons:
        return _invalid(reasons)
    t1, t2 = _approx_factors(b)
    tail = b.sigma_tail * (t1 + t2 + 1)
    t3 = math.sqrt(b.r * (b.n1 - b.r)) * b.z_tilde_norm / (math.sqrt(b.delta1) * _gap(b))
    t4 = math.sqrt(b.r) * b.z_norm / _z_factor(b.epsilon)
    return BoundOutput(tail + t3 + t4, 1 - b.delta1 - 3 * b.delta2 - b.epsilon, True,
                       {"tail": tail, "z_tilde": t3, "z": t4})


def tensor_robust_bound(b: BoundInput) -> BoundOutput:
    """Bound on ``||X - X0||_F^2`` for tubal-rank r_low tensors; norms are tensor Frobenius norms."""
    reasons = _common_checks(b)
    if reasons:
        return _invalid(reasons)
    t_tilde = 2 * b.r * (b.n1 - b.r) * b.z_tilde_norm**2 / (b.delta1 * _gap(b) ** 2)
    t_z = 2 * b.r * b.z_norm**2 / math.log(1 / (1 - b.epsilon))
    floor = 1 - (b.delta1 + b.delta2 + b.epsilon) * b.n3
    out = BoundOutput(t_tilde + t_z, floor, True, {"z_tilde": t_tilde, "z": t_z})
    if floor <= 0:
        out.notes.append("probability floor is vacuous (<= 0)")
    return out


def tensor_approx_bound(b: BoundInput) -> BoundOutput:
    """Squared-Frobenius bound for approximately low-tubal-rank tensors; ``sigma_tail`` is ``||E||_F``.

    The probability floor is reported as ``1 - (delta1 - delta2 - epsilon) n3 - 2 delta2``,
    which differs in sign from the robust tensor bound; see ``notes``.
    """
    reasons = _common_checks(b, strict_delta2_below_one=False)
    if reasons:
        return _invalid(reasons)
    t1, t2 = _approx_factors(b)
    tail = 2 * b.sigma_tail**2 * (4 * t1 + 4 * t2 + 1) ** 2
    t_tilde = 8 * b.r * (b.n1 - b.r) * b.z_tilde_norm**2 / (b.delta1 * _gap(b) ** 2)
    t_z = 8 * b.r * b.z_norm**2 / math.log(1 / (1 - b.epsilon))
    floor = 1 - (b.delta1 - b.delta2 - b.epsilon) * b.n3 - 2 * b.delta2
    out = BoundOutput(tail + t_tilde + t_z, floor, True,
                      {"tail": tail, "z_tilde": t_tilde, "z": t_z})
    out.notes.append(
        "probability floor uses the printed form 1-(delta1-delta2-epsilon)*n3-2*delta2; "
        "the robust tensor bound uses 1-(delta1+delta2+epsilon)*n3"
    )
    return out


BOUNDS = {
    "robust": robust_bound,
    "robust-r0": robust_bound_r_equals_r0,
    "robust-n1": robust_bound_r_equals_n1,
    "lowrank-approx": lowrank_approx_bound,
    "tensor-robust": tensor_robust_bound,
    "tensor-approx": tensor_approx_bound,
}


def oblique_projection(v1, v2_perp) -> np.ndarray:
    """Projector ``V1 (V2perp^* V1)^{-1} V2perp^*`` with image span(V1) and kernel span(V2perp)^perp."""
    v1 = np.asarray(v1, dtype=np.complex128)
    v2_perp = np.asarray(v2_perp, dtype=np.complex128)
    if v1.shape != v2_perp.shape:
        raise ShapeError(f"v1 {v1.shape} and v2_perp {v2_perp.shape} differ")
    g = v2_perp.conj().T @ v1
    sv = singular_values(g)
    if sv.size and (sv[-1] == 0 or sv[-1] < 1e-14 * sv[0]):
        raise NumericalError("V2perp^* V1 is singular")
    return v1 @ np.linalg.solve(g, v2_perp.conj().T)


# -- Monte Carlo validators -------------------------------------------------

def binomial_halfwidth(p: float, samples: int) -> float:
    return 3 * math.sqrt(p * (1 - p) / samples)


def _sample_seeds(seed: Seed, tag: str, samples: int):
    return (seed.derive(tag, i) for i in range(samples))


def validate_square_gaussian_law(n: int, eps_grid, samples: int, seed: Seed) -> dict:
    """Empirical ``P(sigma_min(A) >= eps / sqrt(n))`` for n x n complex Gaussians vs ``exp(-eps^2)``."""
    smin = np.array([
        singular_values(sample_complex_gaussian(n, n, s))[-1]
        for s in _sample_seeds(seed, "square", samples)
    ])
    rows = []
    for eps in eps_grid:
        p = math.exp(-eps**2)
        freq = float(np.mean(smin >= eps / math.sqrt(n)))
        tol = binomial_halfwidth(p, samples) + 0.005
        rows.append({"eps": eps, "expected": p, "empirical": freq,
                     "abs_diff": abs(freq - p), "tolerance": tol,
                     "passed": abs(freq - p) <= tol})
    return {"lemma": "square-gaussian-sigma-min", "n": n, "samples": samples,
            "rows": rows, "passed": all(r["passed"] for r in rows)}


def validate_gordon(m: int, n: int, delta_grid, samples: int, seed: Seed) -> dict:
    """Extreme singular values of m x n complex Gaussians against ``sqrt(m) -/+ sqrt(n) -/+ sqrt(log(1/delta))``."""
    if not m > n:
        raise ValueError(f"requires m > n, got m={m}, n={n}")
    sv = np.array([
        singular_values(sample_complex_gaussian(m, n, s))[[0, -1]]
        for s in _sample_seeds(seed, "gordon", samples)
    ])
    smax, smin = sv[:, 0], sv[:, 1]
    rows = []
    for delta in delta_grid:
        if not 0 < delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        lg = math.sqrt(math.log(1 / delta))
        need = 1 - delta - binomial_halfwidth(delta, samples)
        lo = math.sqrt(m) - math.sqrt(n) - lg
        hi = math.sqrt(m) + math.sqrt(n) + lg
        f_min = float(np.mean(smin >= lo))
        f_max = float(np.mean(smax <= hi))
        rows.append({"delta": delta, "min_threshold": lo, "max_threshold": hi,
                     "freq_min": f_min, "freq_max": f_max, "required": need,
                     "passed": f_min >= need and f_max >= need})
    return {"lemma": "gaussian-extreme-singular-values", "m": m, "n": n,
            "samples": samples, "rows": rows, "passed": all(r["passed"] for r in rows)}


def truncated_haar_sigma_min(n: int, r: int, seed: Seed) -> float:
    q, _ = qr(sample_complex_gaussian(n, n, seed))
    return float(singular_values(q[: n - r, : n - r])[-1])


def validate_truncated_haar(n: int, r: int, delta_grid, samples: int, seed: Seed) -> dict:
    """sigma_min of the top-left (n-r) x (n-r) corner of a Haar unitary vs ``sqrt(delta / (r (n - r)))``."""
    if not 0 <= r < n:
        raise ValueError(f"need 0 <= r < n, got r={r}, n={n}")
    smin = np.array([truncated_haar_sigma_min(n, r, s)
                     for s in _sample_seeds(seed, "haar", samples)])
    rows = []
    for delta in delta_grid:
        # r = 0 leaves the whole unitary (sigma_min = 1); the bound degenerates, use threshold 0
        thr = math.sqrt(delta) / math.sqrt(r * (n - r)) if r > 0 else 0.0
        need = 1 - delta - binomial_halfwidth(min(delta, 1.0), samples)
        freq = float(np.mean(smin >= thr))
        rows.append({"delta": delta, "threshold": thr, "empirical": freq,
                     "required": need, "passed": freq >= need})
    return {"lemma": "truncated-haar-sigma-min", "n": n, "r": r, "samples": samples,
            "rows": rows, "passed": all(r["passed"] for r in rows)}
