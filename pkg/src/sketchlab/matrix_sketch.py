"""Noisy double-sketch model for matrices and the two recovery formulas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg_core import (
    DEFAULT_REL_TOL,
    ShapeError,
    numerical_rank,
    pseudo_inverse,
    qr,
    singular_values,
)


def _c(a) -> np.ndarray:
    return np.asarray(a, dtype=np.complex128)


@dataclass(frozen=True)
class SketchModel:
    """Ground truth ``x0`` (n1 x n2), sketching matrices and additive noise.

    ``z``/``z_tilde`` may be None for the noiseless model. The sketch size r
    is taken from ``s``; it may exceed ``min(n1, n2)``.
    """

    x0: np.ndarray
    s: np.ndarray
    s_tilde: np.ndarray
    z: np.ndarray | None = None
    z_tilde: np.ndarray | None = None

    def __post_init__(self):
        n1, n2 = np.shape(self.x0)
        r = np.shape(self.s)[0]
        expected = {
            "s": (r, n1),
            "s_tilde": (r, n2),
            "z": (r, n2),
            "z_tilde": (r, n1),
        }
        for name, shape in expected.items():
            val = getattr(self, name)
            if val is not None and np.shape(val) != shape:
                raise ShapeError(f"{name} has shape {np.shape(val)}, expected {shape}")

    @property
    def r(self) -> int:
        return np.shape(self.s)[0]


class SketchPair(NamedTuple):
    y: np.ndarray
    y_tilde: np.ndarray


def make_sketches(model: SketchModel) -> SketchPair:
    """``Y = S X0 + Z`` and ``Y~ = S~ X0* + Z~``."""
    x0 = _c(model.x0)
    y = _c(model.s) @ x0
    y_tilde = _c(model.s_tilde) @ x0.conj().T
    if model.z is not None:
        y = y + model.z
    if model.z_tilde is not None:
        y_tilde = y_tilde + model.z_tilde
    return SketchPair(y, y_tilde)


def _check_recovery_shapes(y, y_tilde, s):
    if y.ndim != 2 or y_tilde.ndim != 2 or s.ndim != 2:
        raise ShapeError("recovery operands must be matrices")
    r, n1 = s.shape
    if y.shape[0] != r or y_tilde.shape != (r, n1):
        raise ShapeError(
            f"inconsistent shapes: s {s.shape}, y {y.shape}, y_tilde {y_tilde.shape}"
        )


def recover_naive(y, y_tilde, s, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """``X = Y~* (S Y~*)^+ Y``."""
    y, y_tilde, s = _c(y), _c(y_tilde), _c(s)
    _check_recovery_shapes(y, y_tilde, s)
    yt_star = y_tilde.conj().T
    return yt_star @ (pseudo_inverse(s @ yt_star, rel_tol) @ y)


class LowRankFactors(NamedTuple):
    """Recovered matrix held as ``q @ w``; entries are inner products of their rows/columns."""

    q: np.ndarray
    w: np.ndarray

    def entry(self, i: int, j: int) -> complex:
        return complex(self.q[i, :] @ self.w[:, j])

    def materialize(self) -> np.ndarray:
        return self.q @ self.w


def recover_qr_factors(y, y_tilde, s, rel_tol: float = DEFAULT_REL_TOL) -> LowRankFactors:
    y, y_tilde, s = _c(y), _c(y_tilde), _c(s)
    _check_recovery_shapes(y, y_tilde, s)
    r, n1 = s.shape
    if r > n1:
        raise ShapeError(f"QR path needs r <= n1 (r={r}, n1={n1}); use recover_naive")
    q, _ = qr(y_tilde.conj().T)
    w = pseudo_inverse(s @ q, rel_tol) @ y
    return LowRankFactors(q, w)


def recover_qr(y, y_tilde, s, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """QR-stabilized form: ``Y~* = QR``, ``X = Q (S Q)^+ Y``."""
    return recover_qr_factors(y, y_tilde, s, rel_tol).materialize()


def noiseless_output(x0, s, s_tilde) -> np.ndarray:
    """``X0 S~* (S X0 S~*)^+ S X0``, the recovery output when both noises vanish."""
    x0, s, s_tilde = _c(x0), _c(s), _c(s_tilde)
    n1, n2 = x0.shape
    if s.shape[1] != n1 or s_tilde.shape[1] != n2 or s.shape[0] != s_tilde.shape[0]:
        raise ShapeError(f"inconsistent shapes: x0 {x0.shape}, s {s.shape}, s_tilde {s_tilde.shape}")
    sx0 = s @ x0
    x0_st = x0 @ s_tilde.conj().T
    return x0_st @ pseudo_inverse(s @ x0_st) @ sx0


def sketch_has_full_rank(y_tilde, rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """Whether ``Y~`` has rank r (its row count), the hypothesis of the robust bound."""
    y_tilde = _c(y_tilde)
    return numerical_rank(y_tilde, rel_tol) == y_tilde.shape[0]


class Recovery(NamedTuple):
    x: np.ndarray
    full_rank: bool
    path: str


def recover(y, y_tilde, s, rel_tol: float = DEFAULT_REL_TOL) -> Recovery:
    """Default recovery: QR path, naive formula when r > n1. Reports the rank flag."""
    r, n1 = np.shape(s)
    if r > n1:
        x, path = recover_naive(y, y_tilde, s, rel_tol), "naive"
    else:
        x, path = recover_qr(y, y_tilde, s, rel_tol), "qr"
    return Recovery(x, sketch_has_full_rank(y_tilde, rel_tol), path)


def recovery_error(x, x0, norm: str = "frobenius") -> float:
    x, x0 = _c(x), _c(x0)
    if x.shape != x0.shape:
        raise ShapeError(f"shape mismatch {x.shape} vs {x0.shape}")
    d = x - x0
    if norm == "frobenius":
        return float(np.linalg.norm(d.ravel()))
    if norm == "spectral":
        sv = singular_values(d)
        return float(sv[0]) if sv.size else 0.0
    raise ValueError(f"unknown norm {norm!r}")
