"""Recovery of low-rank matrices and low-tubal-rank tensors from two noisy sketches."""

from .linalg_core import (
    NumericalError,
    Seed,
    ShapeError,
    pseudo_inverse,
    qr,
    sample_complex_gaussian,
    sigma_k,
    sigma_min_nonzero,
    svd,
)
from .matrix_sketch import (
    SketchModel,
    SketchPair,
    make_sketches,
    noiseless_output,
    recover,
    recover_naive,
    recover_qr,
    recovery_error,
)
from .tensor_sketch import TensorSketchModel, make_tensor_sketches, recover_tensor

__version__ = "0.1.0"
