"""Dense complex linear algebra and seeded Gaussian sampling.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; numpy stores
them as interleaved (re, im) float64 pairs, which is also the on-disk layout
used by the tensor file format.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_REL_TOL = 1e-12


class NumericalError(ArithmeticError):
    """A factorization failed or an input was numerically degenerate."""


class ShapeError(ValueError):
    """Operand shapes are incompatible."""


@dataclass(frozen=True)
class Seed:
    """A (master, stream) pair selecting one reproducible random substream.

    Streams are independent Philox substreams keyed by ``SeedSequence``, so the
    draw for a given pair never depends on which thread or process asks for it.
    """

    master: int
    stream: int = 0

    def __post_init__(self):
        for name in ("master", "stream"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.master, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))

    def derive(self, *key) -> "Seed":
        """Substream for an arbitrary tuple key (stable across runs)."""
        return Seed(self.master, stream_id(*key))


def stream_id(*key) -> int:
    """Stable 64-bit hash of a tuple of ints/strings."""
    h = hashlib.blake2b(repr(tuple(key)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, Seed):
        return seed.generator()
    if isinstance(seed, np.random.Generator):
        return seed
    return Seed(int(seed)).generator()


def sample_complex_gaussian(rows: int, cols: int, seed) -> np.ndarray:
    """i.i.d. standard complex Gaussians, ``X + iY`` with ``X, Y ~ N(0, 1/2)``."""
    if rows < 0 or cols < 0:
        raise ShapeError(f"negative size ({rows}, {cols})")
    rng = _as_generator(seed)
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


def sample_real_gaussian(rows: int, cols: int, seed) -> np.ndarray:
    """i.i.d. real ``N(0, 1)`` entries, returned as complex with zero imaginary part."""
    if rows < 0 or cols < 0:
        raise ShapeError(f"negative size ({rows}, {cols})")
    rng = _as_generator(seed)
    return rng.standard_normal((rows, cols)).astype(np.complex128)


def sample_gaussian(rows: int, cols: int, seed, mode: str = "complex") -> np.ndarray:
    if mode == "complex":
        return sample_complex_gaussian(rows, cols, seed)
    if mode == "real":
        return sample_real_gaussian(rows, cols, seed)
    raise ValueError(f"unknown gaussian mode {mode!r}")


class SvdResult(NamedTuple):
    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray


def svd(a: np.ndarray, full_matrices: bool = False) -> SvdResult:
    """Thin SVD ``a = u @ diag(s) @ vt``; raises NumericalError on non-convergence."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise NumericalError("svd input has non-finite entries")
    m, n = a.shape
    if m == 0 or n == 0:
        k = min(m, n)
        um = m if full_matrices else k
        vn = n if full_matrices else k
        return SvdResult(np.eye(m, um, dtype=np.complex128), np.zeros(k),
                         np.eye(vn, n, dtype=np.complex128))
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=full_matrices)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    return SvdResult(u, s, vt)


def singular_values(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return np.zeros(min(a.shape))
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc


def qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with ``diag(R)`` real and nonnegative.

    Zero pivots keep the Householder column (a canonical unit direction) and a
    zero diagonal entry in R.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim={a.ndim}")
    m, k = a.shape
    if m < k:
        raise ShapeError(f"qr needs rows >= cols, got {m}x{k}")
    q, r = np.linalg.qr(a, mode="reduced")
    d = np.diagonal(r)
    mag = np.abs(d)
    phase = np.ones_like(d)
    nz = mag > 0
    phase[nz] = d[nz] / mag[nz]
    q = q * phase[np.newaxis, :]
    r = np.conj(phase)[:, np.newaxis] * r
    # force exact real diagonal after the rescale
    idx = np.arange(k)
    r[idx, idx] = mag
    return q, r


def pseudo_inverse(a: np.ndarray, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Moore-Penrose inverse; singular values ``<= rel_tol * sigma_max`` are dropped."""
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    a = np.asarray(a, dtype=np.complex128)
    u, s, vt = svd(a)
    if s.size == 0 or s[0] == 0:
        return np.zeros(a.shape[::-1], dtype=np.complex128)
    keep = s > rel_tol * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (vt.conj().T * inv) @ u.conj().T


def numerical_rank(a: np.ndarray, rel_tol: float = DEFAULT_REL_TOL) -> int:
    s = singular_values(a)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def sigma_min_nonzero(a: np.ndarray, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Smallest singular value above ``rel_tol * sigma_max``."""
    s = singular_values(a)
    if s.size == 0 or s[0] == 0:
        raise ValueError("sigma_min_nonzero of an all-zero matrix is undefined")
    return float(s[s > rel_tol * s[0]][-1])


def sigma_k(a: np.ndarray, k: int) -> float:
    """k-th largest singular value (1-based); zero past ``min(m, n)``."""
    if k < 1:
        raise ValueError("k is 1-based")
    s = singular_values(a)
    return float(s[k - 1]) if k <= s.size else 0.0


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a).ravel()))


def spectral(a: np.ndarray) -> float:
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


def haar_unitary(n: int, seed) -> np.ndarray:
    """Haar-distributed n x n unitary: QR of a complex Gaussian with R's diagonal made positive."""
    q, _ = qr(sample_complex_gaussian(n, n, seed))
    return q
