"""Double sketching of order-3 tensors under the t-product, and slicewise recovery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg_core import DEFAULT_REL_TOL, ShapeError
from .matrix_sketch import recover_naive, recover_qr, sketch_has_full_rank
from .tproduct import (
    as_tensor,
    conj_transpose,
    first_slice_tensor,
    fourier_slices,
    mode3_fft,
    mode3_ifft,
    t_product_fft,
)


@dataclass(frozen=True)
class TensorSketchModel:
    """Target ``x0`` (n1 x n2 x n3) sketched by S (r x n1) and S~ (r x n2).

    The sketching tensors carry S, S~ as frontal slice 1 and zeros elsewhere.
    """

    x0: np.ndarray
    s: np.ndarray
    s_tilde: np.ndarray
    z: np.ndarray | None = None
    z_tilde: np.ndarray | None = None

    def __post_init__(self):
        n1, n2, n3 = as_tensor(self.x0).shape
        r = np.shape(self.s)[0]
        expected = {
            "s": (r, n1),
            "s_tilde": (r, n2),
            "z": (r, n2, n3),
            "z_tilde": (r, n1, n3),
        }
        for name, shape in expected.items():
            val = getattr(self, name)
            if val is not None and np.shape(val) != shape:
                raise ShapeError(f"{name} has shape {np.shape(val)}, expected {shape}")

    @property
    def n3(self) -> int:
        return as_tensor(self.x0).shape[2]

    @property
    def sketch_tensor(self) -> np.ndarray:
        return first_slice_tensor(self.s, self.n3)

    @property
    def sketch_tensor_tilde(self) -> np.ndarray:
        return first_slice_tensor(self.s_tilde, self.n3)


class TensorSketchPair(NamedTuple):
    y: np.ndarray
    y_tilde: np.ndarray


def make_tensor_sketches(model: TensorSketchModel) -> TensorSketchPair:
    x0 = as_tensor(model.x0)
    y = t_product_fft(model.sketch_tensor, x0)
    y_tilde = t_product_fft(model.sketch_tensor_tilde, conj_transpose(x0))
    if model.z is not None:
        y = y + model.z
    if model.z_tilde is not None:
        y_tilde = y_tilde + model.z_tilde
    return TensorSketchPair(y, y_tilde)


class SliceRecoveryError(ValueError):
    def __init__(self, k: int, cause: Exception):
        super().__init__(f"recovery failed on Fourier slice {k}: {cause}")
        self.k = k


def effective_sketch_slices(s, n3: int) -> np.ndarray:
    """Per-slice matrices mapping transformed target slices to transformed sketch slices.

    Accepts the r x n1 first-slice matrix S or a full sketching tensor. For a
    first-slice-only tensor every slice equals S.
    """
    s = np.asarray(s, dtype=np.complex128)
    if s.ndim == 2:
        s = first_slice_tensor(s, n3)
    if s.shape[2] != n3:
        raise ShapeError(f"sketching tensor has n3={s.shape[2]}, expected {n3}")
    return fourier_slices(s)


class TensorRecovery(NamedTuple):
    x: np.ndarray
    full_rank: bool
    fourier_x: np.ndarray


def recover_tensor_detailed(y, y_tilde, s, rel_tol: float = DEFAULT_REL_TOL) -> TensorRecovery:
    y, y_tilde = as_tensor(y), as_tensor(y_tilde)
    r, n2, n3 = y.shape
    if y_tilde.shape[0] != r or y_tilde.shape[2] != n3:
        raise ShapeError(f"inconsistent sketches {y.shape} and {y_tilde.shape}")
    n1 = y_tilde.shape[1]
    sh = effective_sketch_slices(s, n3)
    if sh.shape[:2] != (r, n1):
        raise ShapeError(f"sketch slices have shape {sh.shape[:2]}, expected {(r, n1)}")
    yh = mode3_fft(y)
    yth = mode3_fft(y_tilde)
    solve = recover_naive if r > n1 else recover_qr
    xh = np.empty((n1, n2, n3), dtype=np.complex128)
    full_rank = True
    for k in range(n3):
        try:
            xh[:, :, k] = solve(yh[:, :, k], yth[:, :, k], sh[:, :, k], rel_tol)
        except (ValueError, ArithmeticError) as exc:
            raise SliceRecoveryError(k, exc) from exc
        full_rank &= sketch_has_full_rank(yth[:, :, k], rel_tol)
    return TensorRecovery(mode3_ifft(xh), bool(full_rank), xh)


def recover_tensor(y, y_tilde, s, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Transform both sketches along mode 3, recover each slice, transform back."""
    return recover_tensor_detailed(y, y_tilde, s, rel_tol).x
