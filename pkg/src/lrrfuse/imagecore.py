"""Grayscale image container conventions, 8-bit raster I/O, and patch tiling.

An image is a float64 array of shape (height, width) with values nominally
in [0, 1]. File I/O and degradation clamp to that range; transform
coefficients may leave it and are handled as bands by the wavelet module.
"""

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as _PILImage

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class PatchGrid:
    """Non-overlapping tiling of a raster into patch_size x patch_size tiles.

    Padding (right/bottom, symmetric reflection) makes the padded raster an
    exact multiple of the patch size in both axes.
    """

    patch_size: int
    rows: int
    cols: int
    pad_right: int
    pad_bottom: int


def tile(width, height, patch_size):
    """Plan a patch tiling of a width x height raster. Stride = patch size."""
    if patch_size < 2:
        raise ValueError(f"patch size must be >= 2, got {patch_size}")
    if width < 1 or height < 1:
        raise ValueError(f"raster dimensions must be positive, got {width}x{height}")
    rows = (height + patch_size - 1) // patch_size
    cols = (width + patch_size - 1) // patch_size
    return PatchGrid(
        patch_size=patch_size,
        rows=rows,
        cols=cols,
        pad_right=cols * patch_size - width,
        pad_bottom=rows * patch_size - height,
    )


def pad_to_grid(arr, grid):
    """Pad an array on the right/bottom by symmetric reflection to fit the grid."""
    return np.pad(arr, ((0, grid.pad_bottom), (0, grid.pad_right)), mode="symmetric")


def patch_slices(grid):
    """Yield row-major 2-D slices addressing each patch of the padded raster."""
    n = grid.patch_size
    for r in range(grid.rows):
        for c in range(grid.cols):
            yield np.s_[r * n : (r + 1) * n, c * n : (c + 1) * n]


def extract_patches(arr, grid):
    """All patches of `arr` under `grid`, row-major, as copies."""
    padded = pad_to_grid(np.asarray(arr, dtype=float), grid)
    return [padded[s].copy() for s in patch_slices(grid)]


def assemble_patches(patches, grid, height, width):
    """Inverse of extract_patches: mosaic the patches and drop the padding."""
    n = grid.patch_size
    out = np.empty((grid.rows * n, grid.cols * n))
    for s, p in zip(patch_slices(grid), patches):
        out[s] = p
    return out[:height, :width]


def load_image(path):
    """Read an 8-bit PGM (P2/P5) or PNG file as a grayscale image in [0, 1].

    Multi-channel input is collapsed to luminance 0.299 R + 0.587 G + 0.114 B.
    """
    path = Path(path)
    with open(path, "rb") as f:
        head = f.read(2)
    if head in (b"P2", b"P5"):
        arr = _read_pgm(path)
    elif head == b"\x89P":
        arr = _read_png(path)
    else:
        raise ValueError(f"unsupported image format: {path} (PGM P2/P5 or 8-bit PNG)")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"zero-dimension image: {path}")
    return np.clip(arr, 0.0, 1.0)


def save_image(img, path):
    """Write an image as 8-bit grayscale; the extension picks .pgm or .png.

    Values are clamped to [0, 1] and quantized as round(v * 255).
    """
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("image must be a non-empty 2-D array")
    q = np.round(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
        path.write_bytes(header + q.tobytes())
    elif suffix == ".png":
        _PILImage.fromarray(q, mode="L").save(path)
    else:
        raise ValueError(f"unsupported output format {suffix!r} (use .pgm or .png)")


_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def _read_pgm(path):
    data = path.read_bytes()
    pos = 0
    tokens = []
    # magic, width, height, maxval; '#' comments may appear between tokens
    while len(tokens) < 4:
        m = _PGM_TOKEN.match(data, pos)
        if m is None:
            raise ValueError(f"truncated PGM header: {path}")
        tokens.append(m.group(1))
        pos = m.end()
    magic = tokens[0]
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ValueError(f"malformed PGM header: {path}") from None
    if width < 1 or height < 1:
        raise ValueError(f"zero-dimension image: {path}")
    if not 0 < maxval <= 255:
        raise ValueError(f"unsupported PGM maxval {maxval} (8-bit only): {path}")
    if magic == b"P5":
        raster = data[pos + 1 : pos + 1 + width * height]  # single whitespace after maxval
        if len(raster) < width * height:
            raise ValueError(f"truncated PGM raster: {path}")
        values = np.frombuffer(raster, dtype=np.uint8).astype(float)
    else:
        fields = data[pos:].split()
        if len(fields) < width * height:
            raise ValueError(f"truncated PGM raster: {path}")
        values = np.array([int(v) for v in fields[: width * height]], dtype=float)
    if values.max(initial=0.0) > maxval:
        raise ValueError(f"PGM sample exceeds maxval: {path}")
    return values.reshape(height, width) / float(maxval)


def _read_png(path):
    with _PILImage.open(path) as im:
        if im.mode == "L":
            return np.asarray(im, dtype=float) / 255.0
        if im.mode in ("1", "LA", "P", "RGB", "RGBA"):
            rgb = np.asarray(im.convert("RGB"), dtype=float) / 255.0
            return rgb @ LUMA_WEIGHTS
        raise ValueError(f"unsupported PNG mode {im.mode!r} (8-bit only): {path}")
