import numpy as np
import pytest
from PIL import Image as PILImage

from lrrfuse import imagecore
from lrrfuse.imagecore import (
    assemble_patches,
    extract_patches,
    load_image,
    save_image,
    tile,
)


def test_load_pgm_binary_scales_linearly(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = load_image(p)
    assert img.shape == (2, 2)
    np.testing.assert_allclose(img.ravel(), [0.0, 1.0, 128 / 255, 64 / 255], atol=1e-12)


def test_load_pgm_ascii_with_comments(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_text("P2\n# a comment\n3 1\n255\n0 128 255\n")
    img = load_image(p)
    np.testing.assert_allclose(img.ravel(), [0.0, 128 / 255, 1.0])


def test_load_png_rgb_luminance(tmp_path):
    rgb = np.zeros((1, 3, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 255, 255)
    rgb[0, 1] = (255, 0, 0)
    rgb[0, 2] = (0, 255, 0)
    p = tmp_path / "t.png"
    PILImage.fromarray(rgb, mode="RGB").save(p)
    img = load_image(p)
    # luminance weights 0.299 / 0.587 / 0.114 applied to [0,1] channels
    assert abs(img[0, 0] - 1.0) < 1e-12
    assert abs(img[0, 1] - 0.299) < 1e-12
    assert abs(img[0, 2] - 0.587) < 1e-12


def test_load_png_grayscale(tmp_path):
    p = tmp_path / "g.png"
    PILImage.fromarray(np.array([[0, 64], [128, 255]], dtype=np.uint8), mode="L").save(p)
    img = load_image(p)
    np.testing.assert_allclose(img, np.array([[0, 64], [128, 255]]) / 255.0)


def test_save_quantization(tmp_path):
    p = tmp_path / "q.pgm"
    save_image(np.array([[1.0, 0.0, 0.5]]), p)
    raster = p.read_bytes().split(b"\n", 3)[3]
    assert list(raster[:3]) == [255, 0, 128]


def test_save_clamps_out_of_range(tmp_path):
    p = tmp_path / "c.pgm"
    save_image(np.array([[-0.5, 1.5]]), p)
    raster = p.read_bytes().split(b"\n", 3)[3]
    assert list(raster[:2]) == [0, 255]


@pytest.mark.parametrize("suffix", [".pgm", ".png"])
def test_roundtrip_is_byte_exact(tmp_path, suffix):
    rng = np.random.default_rng(11)
    original = rng.integers(0, 256, size=(13, 17), dtype=np.uint8)
    p1 = tmp_path / f"a{suffix}"
    p2 = tmp_path / f"b{suffix}"
    save_image(original / 255.0, p1)
    save_image(load_image(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()
    np.testing.assert_array_equal(np.round(load_image(p2) * 255).astype(np.uint8), original)


def test_load_errors(tmp_path):
    with pytest.raises((OSError, ValueError)):
        load_image(tmp_path / "missing.pgm")
    bad = tmp_path / "bad.dat"
    bad.write_bytes(b"JUNKDATA")
    with pytest.raises(ValueError, match="unsupported"):
        load_image(bad)
    trunc = tmp_path / "trunc.pgm"
    trunc.write_bytes(b"P5\n4 4\n255\n\x00\x01")
    with pytest.raises(ValueError, match="truncated"):
        load_image(trunc)
    zero = tmp_path / "zero.pgm"
    zero.write_bytes(b"P5\n0 2\n255\n")
    with pytest.raises(ValueError, match="zero-dimension"):
        load_image(zero)


def test_save_rejects_unknown_extension(tmp_path):
    with pytest.raises(ValueError, match="unsupported"):
        save_image(np.zeros((2, 2)), tmp_path / "x.tiff")


@pytest.mark.parametrize(
    "width,height,n,rows,cols,pad_r,pad_b",
    [
        (32, 32, 16, 2, 2, 0, 0),
        (33, 32, 16, 2, 3, 15, 0),
        (100, 70, 16, 5, 7, 12, 10),
    ],
)
def test_tile_arithmetic(width, height, n, rows, cols, pad_r, pad_b):
    grid = tile(width, height, n)
    assert (grid.rows, grid.cols) == (rows, cols)
    assert (grid.pad_right, grid.pad_bottom) == (pad_r, pad_b)


def test_tile_covers_minimally():
    rng = np.random.default_rng(5)
    for _ in range(200):
        w, h = rng.integers(1, 200, size=2)
        n = int(rng.integers(2, 40))
        g = tile(int(w), int(h), n)
        assert g.cols * n >= w and (g.cols - 1) * n < w
        assert g.rows * n >= h and (g.rows - 1) * n < h


def test_tile_rejects_small_patch():
    with pytest.raises(ValueError):
        tile(10, 10, 1)


def test_patch_roundtrip_exact():
    rng = np.random.default_rng(7)
    for _ in range(30):
        h, w = rng.integers(3, 60, size=2)
        n = int(rng.integers(2, 20))
        arr = rng.normal(size=(int(h), int(w)))
        grid = tile(int(w), int(h), n)
        patches = extract_patches(arr, grid)
        assert len(patches) == grid.rows * grid.cols
        back = assemble_patches(patches, grid, int(h), int(w))
        np.testing.assert_array_equal(back, arr)


def test_padding_is_symmetric_reflection():
    arr = np.array([[1.0, 2.0], [3.0, 4.0]])
    grid = tile(2, 2, 2)
    assert grid.pad_right == 0 and grid.pad_bottom == 0
    grid3 = imagecore.tile(3, 2, 2)
    padded = imagecore.pad_to_grid(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]), grid3)
    # right edge reflects the last column
    np.testing.assert_array_equal(padded[:, 3], [3.0, 6.0])
