import numpy as np
import pytest
from skimage.metrics import structural_similarity

from lrrfuse.degrade import synthetic_pattern
from lrrfuse.metrics import PSNR_CAP, evaluate, psnr, rmse, ssim


def noisy_pair(seed, shape=(64, 64), sigma=0.1):
    rng = np.random.default_rng(seed)
    a = np.clip(synthetic_pattern(seed, *shape) + rng.normal(0, sigma, shape), 0, 1)
    return a, synthetic_pattern(seed, *shape)


# ---- rmse -------------------------------------------------------------------


def test_rmse_identical_is_zero():
    x = synthetic_pattern(0, 32, 32)
    assert rmse(x, x) == 0.0


def test_rmse_unit_difference():
    assert rmse(np.zeros((1, 2)), np.ones((1, 2))) == 1.0


def test_rmse_scalar_loop_oracle():
    rng = np.random.default_rng(1)
    a = rng.random((9, 7))
    b = rng.random((9, 7))
    acc = 0.0
    for i in range(9):
        for j in range(7):
            acc += (a[i, j] - b[i, j]) ** 2
    assert abs(rmse(a, b) - np.sqrt(acc / 63)) < 1e-12


def test_rmse_dimension_mismatch():
    with pytest.raises(ValueError):
        rmse(np.zeros((2, 2)), np.zeros((2, 3)))


# ---- psnr -------------------------------------------------------------------


def test_psnr_known_value():
    # mse 0.01 -> 20 dB
    a = np.zeros((10, 10))
    b = np.full((10, 10), 0.1)
    assert abs(psnr(a, b) - 20.0) < 1e-12


def test_psnr_identical_capped():
    x = synthetic_pattern(2, 32, 32)
    assert psnr(x, x) == PSNR_CAP


def test_psnr_rmse_identity():
    for seed in range(10):
        a, b = noisy_pair(seed)
        r = rmse(a, b)
        assert abs(psnr(a, b) + 20.0 * np.log10(r)) < 1e-9


def test_psnr_orders_like_rmse():
    g = synthetic_pattern(3, 48, 48)
    rng = np.random.default_rng(4)
    b1 = np.clip(g + rng.normal(0, 0.02, g.shape), 0, 1)
    b2 = np.clip(g + rng.normal(0, 0.08, g.shape), 0, 1)
    assert rmse(b1, g) < rmse(b2, g)
    assert psnr(b1, g) > psnr(b2, g)


# ---- ssim -------------------------------------------------------------------


def test_ssim_identical_is_one():
    x = synthetic_pattern(5, 32, 32)
    assert abs(ssim(x, x) - 1.0) < 1e-12


def test_ssim_matches_reference_implementation():
    for seed in range(8):
        a, b = noisy_pair(seed, sigma=0.03 * (seed + 1) / 4)
        ref = structural_similarity(
            a, b, win_size=11, gaussian_weights=True, sigma=1.5,
            use_sample_covariance=False, data_range=1.0,
        )
        assert abs(ssim(a, b) - ref) < 1e-9


def test_ssim_anticorrelated_is_negative():
    x = synthetic_pattern(6, 64, 64)
    assert ssim(x, 1.0 - x) < 0.0


def test_ssim_small_constant_shift():
    x = synthetic_pattern(7, 64, 64)
    shifted = np.clip(x + 0.01, 0, 1)
    value = ssim(x, shifted)
    assert 0.9 < value < 1.0


def test_ssim_symmetry_and_range():
    for seed in range(5):
        a, b = noisy_pair(seed, sigma=0.2)
        s1, s2 = ssim(a, b), ssim(b, a)
        assert abs(s1 - s2) < 1e-12
        assert -1.0 <= s1 <= 1.0
    assert abs(rmse(a, b) - rmse(b, a)) < 1e-12


def test_ssim_rejects_small_images():
    with pytest.raises(ValueError, match="window"):
        ssim(np.zeros((10, 30)), np.zeros((10, 30)))


def test_evaluate_report_consistency():
    x = synthetic_pattern(8, 32, 32)
    report = evaluate(x, x)
    assert report.rmse == 0.0
    assert report.psnr == PSNR_CAP
    assert abs(report.ssim - 1.0) < 1e-12
