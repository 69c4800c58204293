"""Third-order t-product algebra.

A tensor is a ``complex128`` array of shape ``(n1, n2, n3)``; ``a[:, :, k]`` is
frontal slice k. ``mode3_fft`` is the unitary DFT along tubes. Internally the
unnormalized transform is used where it turns the t-product into slicewise
matrix products.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .linalg_core import DEFAULT_REL_TOL, NumericalError, ShapeError


def as_tensor(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 2:
        a = a[:, :, np.newaxis]
    if a.ndim != 3:
        raise ShapeError(f"expected an order-3 tensor, got ndim={a.ndim}")
    return a


def from_slices(slices) -> np.ndarray:
    return np.stack([np.asarray(s, dtype=np.complex128) for s in slices], axis=2)


def identity_tensor(n: int, n3: int) -> np.ndarray:
    t = np.zeros((n, n, n3), dtype=np.complex128)
    t[:, :, 0] = np.eye(n)
    return t


def first_slice_tensor(m, n3: int) -> np.ndarray:
    """Tensor with ``m`` as frontal slice 1 and zero slices after it."""
    m = np.asarray(m, dtype=np.complex128)
    t = np.zeros(m.shape + (n3,), dtype=np.complex128)
    t[:, :, 0] = m
    return t


def unfold(a) -> np.ndarray:
    """Stack frontal slices vertically: ``(n1*n3, n2)``."""
    a = as_tensor(a)
    n1, n2, n3 = a.shape
    return np.transpose(a, (2, 0, 1)).reshape(n1 * n3, n2)


def fold(m, n1: int, n2: int, n3: int) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (n1 * n3, n2):
        raise ShapeError(f"cannot fold {m.shape} into {n1}x{n2}x{n3}")
    return np.ascontiguousarray(np.transpose(m.reshape(n3, n1, n2), (1, 2, 0)))


def bcirc(a) -> np.ndarray:
    """Block-circulant matrix; block (i, j) holds slice ``(i - j) mod n3``."""
    a = as_tensor(a)
    n1, n2, n3 = a.shape
    out = np.empty((n1 * n3, n2 * n3), dtype=np.complex128)
    for i in range(n3):
        for j in range(n3):
            out[i * n1:(i + 1) * n1, j * n2:(j + 1) * n2] = a[:, :, (i - j) % n3]
    return out


def conj_transpose(a) -> np.ndarray:
    """Conjugate-transpose each slice, then reverse the order of slices 2..n3."""
    a = as_tensor(a)
    n3 = a.shape[2]
    order = [0] + list(range(n3 - 1, 0, -1))
    return np.ascontiguousarray(np.conj(np.transpose(a, (1, 0, 2)))[:, :, order])


def _check_product(a, b):
    if a.shape[1] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise ShapeError(f"t-product shape mismatch {a.shape} * {b.shape}")


def t_product_ref(a, b) -> np.ndarray:
    """``fold(bcirc(a) @ unfold(b))`` evaluated literally."""
    a, b = as_tensor(a), as_tensor(b)
    _check_product(a, b)
    return fold(bcirc(a) @ unfold(b), a.shape[0], b.shape[1], a.shape[2])


def t_product_fft(a, b) -> np.ndarray:
    """t-product as slicewise products in the Fourier domain."""
    a, b = as_tensor(a), as_tensor(b)
    _check_product(a, b)
    ah = np.fft.fft(a, axis=2)
    bh = np.fft.fft(b, axis=2)
    ch = np.einsum("ilk,ljk->ijk", ah, bh)
    return np.fft.ifft(ch, axis=2)


t_product = t_product_fft


def mode3_fft(a) -> np.ndarray:
    return np.fft.fft(as_tensor(a), axis=2, norm="ortho")


def mode3_ifft(a) -> np.ndarray:
    return np.fft.ifft(as_tensor(a), axis=2, norm="ortho")


def fourier_slices(a) -> np.ndarray:
    """Unnormalized transform: the slices that multiply under the t-product.

    Equals ``sqrt(n3) * mode3_fft(a)``.
    """
    return np.fft.fft(as_tensor(a), axis=2)


class TSVDFactors(NamedTuple):
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return t_product(t_product(self.u, self.s), conj_transpose(self.v))


def _fourier_svd(m):
    """Per-slice full SVDs of the unnormalized transform of m."""
    mh = fourier_slices(m)
    n1, n2, n3 = mh.shape
    uh = np.empty((n1, n1, n3), dtype=np.complex128)
    vh = np.empty((n2, n2, n3), dtype=np.complex128)
    sv = np.zeros((min(n1, n2), n3))
    for k in range(n3):
        if n1 == 0 or n2 == 0:
            uh[:, :, k] = np.eye(n1)
            vh[:, :, k] = np.eye(n2)
            continue
        try:
            u, s, vt = np.linalg.svd(mh[:, :, k], full_matrices=True)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"SVD of Fourier slice {k} failed: {exc}") from exc
        uh[:, :, k] = u
        vh[:, :, k] = vt.conj().T
        sv[:, k] = s
    return uh, sv, vh


def t_svd(m) -> TSVDFactors:
    """``m = U * S * V^*`` with unitary U, V and f-diagonal S."""
    m = as_tensor(m)
    n1, n2, n3 = m.shape
    uh, sv, vh = _fourier_svd(m)
    sh = np.zeros((n1, n2, n3), dtype=np.complex128)
    idx = np.arange(min(n1, n2))
    sh[idx, idx, :] = sv
    ifft = lambda t: np.fft.ifft(t, axis=2)
    return TSVDFactors(ifft(uh), ifft(sh), ifft(vh))


def singular_tube_norms(m) -> np.ndarray:
    """``||S_{i,i,:}||_2`` for each singular tube, computed from Fourier-domain singular values."""
    m = as_tensor(m)
    _, sv, _ = _fourier_svd(m)
    # Parseval for the unnormalized transform
    return np.sqrt(np.sum(sv**2, axis=1) / m.shape[2])


def tubal_rank(m, rel_tol: float = DEFAULT_REL_TOL) -> int:
    norms = singular_tube_norms(m)
    if norms.size == 0 or norms[0] == 0:
        return 0
    return int(np.count_nonzero(norms > rel_tol * norms[0]))


def truncate_tsvd(m, k: int) -> tuple[np.ndarray, float]:
    """Best tubal-rank-k approximation and its squared error ``sum_{i>k} ||S_{i,i,:}||^2``."""
    m = as_tensor(m)
    n1, n2, n3 = m.shape
    if not 0 <= k <= min(n1, n2):
        raise ValueError(f"k={k} outside [0, {min(n1, n2)}]")
    uh, sv, vh = _fourier_svd(m)
    ah = np.einsum("ilk,lk,jlk->ijk", uh[:, :k, :], sv[:k, :], vh[:, :k, :].conj())
    tail = float(np.sum(sv[k:, :] ** 2) / n3)
    return np.fft.ifft(ah, axis=2), tail


def tensor_frobenius(m) -> float:
    return float(np.linalg.norm(as_tensor(m).ravel()))
