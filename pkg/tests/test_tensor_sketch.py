import numpy as np
import pytest

from sketchlab.linalg_core import Seed, ShapeError, sample_complex_gaussian, sample_real_gaussian
from sketchlab.matrix_sketch import SketchModel, make_sketches, recover_qr
from sketchlab.tensor_sketch import (
    TensorSketchModel,
    effective_sketch_slices,
    make_tensor_sketches,
    recover_tensor,
    recover_tensor_detailed,
)
from sketchlab.tproduct import first_slice_tensor, mode3_fft, t_product_fft, tensor_frobenius


def g(m, n, seed, stream):
    return sample_complex_gaussian(m, n, Seed(seed, stream))


def tensor_instance(n, r0, n3, r, seed=0, noise=0.0, n2=None):
    n2 = n2 or n
    a = g(n, r0 * n3, seed, 0).reshape(n, r0, n3)
    b = g(r0, n2 * n3, seed, 1).reshape(r0, n2, n3)
    x0 = t_product_fft(a, b)
    z = zt = None
    if noise:
        z = g(r, n2 * n3, seed, 4).reshape(r, n2, n3)
        zt = g(r, n * n3, seed, 5).reshape(r, n, n3)
        z *= noise / np.linalg.norm(z)
        zt *= noise / np.linalg.norm(zt)
    return TensorSketchModel(x0, g(r, n, seed, 2), g(r, n2, seed, 3), z, zt)


def test_zero_target_zero_sketches():
    m = TensorSketchModel(np.zeros((5, 4, 3)), g(2, 5, 0, 0), g(2, 4, 0, 1))
    y, yt = make_tensor_sketches(m)
    assert not np.any(y) and not np.any(yt)


def test_single_slice_reduces_to_matrix():
    m = tensor_instance(7, 2, 1, 4, seed=3, noise=0.1, n2=6)
    y, yt = make_tensor_sketches(m)
    ym, ytm = make_sketches(SketchModel(m.x0[:, :, 0], m.s, m.s_tilde, m.z[:, :, 0], m.z_tilde[:, :, 0]))
    assert np.allclose(y[:, :, 0], ym, rtol=0, atol=1e-12)
    assert np.allclose(yt[:, :, 0], ytm, rtol=0, atol=1e-12)


def test_fourier_domain_sketch_slices():
    n3 = 5
    m = tensor_instance(8, 2, n3, 3, seed=1, noise=0.2, n2=6)
    y, yt = make_tensor_sketches(m)
    yh, xh, zh = mode3_fft(y), mode3_fft(m.x0), mode3_fft(m.z)
    sh = mode3_fft(first_slice_tensor(m.s, n3))
    for k in range(n3):
        assert np.allclose(sh[:, :, k], m.s / np.sqrt(n3), atol=1e-14)
        expected = np.sqrt(n3) * sh[:, :, k] @ xh[:, :, k] + zh[:, :, k]
        assert np.linalg.norm(yh[:, :, k] - expected) <= 1e-10 * np.linalg.norm(yh[:, :, k])
    eff = effective_sketch_slices(m.s, n3)
    for k in range(n3):
        assert np.allclose(eff[:, :, k], m.s, atol=1e-13)


def test_model_shapes():
    with pytest.raises(ShapeError):
        TensorSketchModel(np.zeros((4, 4, 2)), g(2, 4, 0, 0), g(2, 4, 0, 1), z=np.zeros((2, 4, 3)))


def test_exact_tensor_recovery():
    m = tensor_instance(20, 3, 4, 6, seed=5)
    y, yt = make_tensor_sketches(m)
    x = recover_tensor(y, yt, m.s)
    assert tensor_frobenius(x - m.x0) / tensor_frobenius(m.x0) <= 1e-8


def test_exact_recovery_with_sketch_tensor_argument():
    m = tensor_instance(12, 2, 3, 4, seed=6)
    y, yt = make_tensor_sketches(m)
    x = recover_tensor(y, yt, m.sketch_tensor)
    assert tensor_frobenius(x - m.x0) / tensor_frobenius(m.x0) <= 1e-8


def test_single_slice_matches_matrix_path():
    m = tensor_instance(10, 2, 1, 5, seed=8, noise=0.05)
    y, yt = make_tensor_sketches(m)
    xt = recover_tensor(y, yt, m.s)[:, :, 0]
    xm = recover_qr(y[:, :, 0], yt[:, :, 0], m.s)
    assert np.max(np.abs(xt - xm)) <= 1e-12 * max(1, np.max(np.abs(xm)))


def test_zero_sketch_gives_zero():
    m = tensor_instance(9, 2, 3, 4, seed=2, noise=0.1)
    _, yt = make_tensor_sketches(m)
    assert not np.any(recover_tensor(np.zeros((4, 9, 3)), yt, m.s))


def test_shape_errors():
    m = tensor_instance(9, 2, 3, 4, seed=2)
    y, yt = make_tensor_sketches(m)
    with pytest.raises(ShapeError):
        recover_tensor(y, yt[:, :, :2], m.s)
    with pytest.raises(ShapeError):
        recover_tensor(y, yt, m.s[:, :5])


def test_slicewise_error_decomposition():
    m = tensor_instance(15, 2, 4, 5, seed=4, noise=0.05)
    y, yt = make_tensor_sketches(m)
    rec = recover_tensor_detailed(y, yt, m.s)
    total = tensor_frobenius(rec.x - m.x0) ** 2
    x0h = mode3_fft(m.x0)
    parts = sum(np.linalg.norm(rec.fourier_x[:, :, k] - x0h[:, :, k]) ** 2 for k in range(4))
    assert total == pytest.approx(parts, rel=1e-9)
    assert rec.full_rank


def test_real_target_reports_imaginary_part():
    n, n3, r = 10, 3, 4
    a = sample_real_gaussian(n, 2 * n3, Seed(1, 0)).reshape(n, 2, n3)
    b = sample_real_gaussian(2, n * n3, Seed(1, 1)).reshape(2, n, n3)
    x0 = t_product_fft(a, b).real.astype(complex)
    z = sample_real_gaussian(r, n * n3, Seed(1, 2)).reshape(r, n, n3) * 1e-3
    m = TensorSketchModel(x0, g(r, n, 1, 3), g(r, n, 1, 4), z, z.copy())
    y, yt = make_tensor_sketches(m)
    x = recover_tensor(y, yt, m.s)
    imag = tensor_frobenius(x.imag)
    assert np.isfinite(imag) and imag >= 0


@pytest.mark.parametrize("seed", range(30))
def test_single_slice_reduction_many(seed):
    m = tensor_instance(8, 2, 1, 4, seed=100 + seed, noise=0.01, n2=7)
    y, yt = make_tensor_sketches(m)
    xt = recover_tensor(y, yt, m.s)[:, :, 0]
    ym, ytm = make_sketches(SketchModel(m.x0[:, :, 0], m.s, m.s_tilde, m.z[:, :, 0], m.z_tilde[:, :, 0]))
    xm = recover_qr(ym, ytm, m.s)
    assert np.linalg.norm(xt - xm) <= 1e-10 * max(1, np.linalg.norm(xm))
