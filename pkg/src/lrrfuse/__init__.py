"""Multi-focus noisy image fusion.

Source images are decomposed by a 2-level discrete wavelet transform; the
low band is fused by spatial-frequency choose-max, each high band patchwise
by low-rank representation with nuclear-norm choose-max, and the result is
reconstructed by the inverse transform.
"""

from .cli import SweepSpec, default_lambda, run_eval, run_sweep
from .degrade import (
    FocusSpec,
    NoiseSpec,
    add_noise,
    apply_defocus,
    gaussian_kernel,
    make_focus_pair,
    parse_noise,
    synthetic_pattern,
)
from .fusion import (
    FusionConfig,
    fuse,
    fuse_dwt_baseline,
    fuse_high,
    fuse_low,
    load_config,
    save_config,
    sf_decision_map,
    spatial_frequency,
)
from .imagecore import PatchGrid, load_image, save_image, tile
from .lrr import AlmParams, LrrSolution, l21_norm, l21_shrink, lrr_solve, nuclear_norm, svt
from .metrics import MetricsReport, evaluate, psnr, rmse, ssim
from .wavelet import BASES, WaveletBasis, WaveletPyramid, band_dims, dwt2, get_basis, idwt2

__version__ = "0.1.0"

__all__ = [
    "AlmParams",
    "BASES",
    "FocusSpec",
    "FusionConfig",
    "LrrSolution",
    "MetricsReport",
    "NoiseSpec",
    "PatchGrid",
    "SweepSpec",
    "WaveletBasis",
    "WaveletPyramid",
    "add_noise",
    "apply_defocus",
    "band_dims",
    "default_lambda",
    "dwt2",
    "evaluate",
    "fuse",
    "fuse_dwt_baseline",
    "fuse_high",
    "fuse_low",
    "gaussian_kernel",
    "get_basis",
    "idwt2",
    "l21_norm",
    "l21_shrink",
    "load_config",
    "load_image",
    "lrr_solve",
    "make_focus_pair",
    "nuclear_norm",
    "parse_noise",
    "psnr",
    "rmse",
    "run_eval",
    "run_sweep",
    "save_config",
    "save_image",
    "sf_decision_map",
    "spatial_frequency",
    "ssim",
    "svt",
    "synthetic_pattern",
    "tile",
]
