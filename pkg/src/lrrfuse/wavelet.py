"""Separable 2-D discrete wavelet transform with exact inversion.

Band dimensions halve per level with ceiling: an odd-length axis is first
extended by one reflected sample, then filtered with periodized convolution
and downsampled. Periodization keeps the orthonormal filter banks orthogonal
at every even length, so the synthesis step is the exact adjoint of the
analysis step and reconstruction is exact to machine precision; the inverse
crops each level back to its recorded input size.

Orientation labels follow the energy they capture: H responds to variation
along x (vertical stripes), V to variation along y, D to both.
"""

from dataclasses import dataclass

import numpy as np

ORIENTATIONS = ("H", "V", "D")


@dataclass(frozen=True)
class WaveletBasis:
    """Analysis/synthesis filter quadruple for one wavelet family."""

    name: str
    analysis_lowpass: tuple
    analysis_highpass: tuple
    synthesis_lowpass: tuple
    synthesis_highpass: tuple


@dataclass
class WaveletPyramid:
    """One low band plus three orientation bands (H, V, D) per level.

    highs[i] holds level i+1; level 1 is the finest (derived from the input
    image), level `levels` is the coarsest and pairs with `low`.
    """

    levels: int
    low: np.ndarray
    highs: list


def _qmf(lo):
    n = len(lo)
    return tuple((-1.0) ** m * lo[n - 1 - m] for m in range(n))


def _orthogonal(name, lo):
    lo = tuple(float(c) for c in lo)
    hi = _qmf(lo)
    return WaveletBasis(name, lo, hi, lo, hi)


_SQRT2 = float(np.sqrt(2.0))
_SQRT3 = float(np.sqrt(3.0))

BASES = {
    "haar": _orthogonal("haar", (1.0 / _SQRT2, 1.0 / _SQRT2)),
    "db2": _orthogonal(
        "db2",
        (
            (1.0 + _SQRT3) / (4.0 * _SQRT2),
            (3.0 + _SQRT3) / (4.0 * _SQRT2),
            (3.0 - _SQRT3) / (4.0 * _SQRT2),
            (1.0 - _SQRT3) / (4.0 * _SQRT2),
        ),
    ),
}


def get_basis(basis):
    """Resolve a basis name ("haar", "db2") or pass a WaveletBasis through."""
    if isinstance(basis, WaveletBasis):
        return basis
    try:
        return BASES[basis]
    except KeyError:
        raise ValueError(f"unknown wavelet basis {basis!r}; available: {sorted(BASES)}") from None


def band_dims(height, width, levels):
    """(height, width) of each level's input: index 0 is the image, index i
    the level-i output bands."""
    dims = [(int(height), int(width))]
    for _ in range(levels):
        h, w = dims[-1]
        dims.append(((h + 1) // 2, (w + 1) // 2))
    return dims


def _analyze(x, lo, hi):
    # periodized correlate + downsample along the last axis; length must be even
    n = x.shape[-1]
    base = 2 * np.arange(n // 2)
    a = np.zeros(x.shape[:-1] + (n // 2,))
    d = np.zeros_like(a)
    for m, (cl, ch) in enumerate(zip(lo, hi)):
        cols = (base + m) % n
        a += cl * x[..., cols]
        d += ch * x[..., cols]
    return a, d


def _synthesize(a, d, lo, hi, n):
    # adjoint of _analyze: upsample + periodized overlap-add to length n
    out = np.zeros(a.shape[:-1] + (n,))
    base = 2 * np.arange(n // 2)
    for m, (cl, ch) in enumerate(zip(lo, hi)):
        cols = (base + m) % n
        out[..., cols] += cl * a + ch * d
    return out


def _pad_even(arr, axis):
    if arr.shape[axis] % 2 == 0:
        return arr
    pad = [(0, 0), (0, 0)]
    pad[axis] = (0, 1)
    return np.pad(arr, pad, mode="symmetric")


def _dwt_level(arr, basis):
    lo, hi = basis.analysis_lowpass, basis.analysis_highpass
    arr = _pad_even(arr, axis=1)
    a_low, a_high = _analyze(arr, lo, hi)  # along x
    a_low = _pad_even(a_low, axis=0)
    a_high = _pad_even(a_high, axis=0)
    low, v = _analyze(a_low.T, lo, hi)  # along y
    h, d = _analyze(a_high.T, lo, hi)
    return low.T, {"H": h.T, "V": v.T, "D": d.T}


def _idwt_level(low, bands, basis, out_h, out_w):
    lo, hi = basis.synthesis_lowpass, basis.synthesis_highpass
    ph, pw = out_h + out_h % 2, out_w + out_w % 2
    a_low = _synthesize(low.T, bands["V"].T, lo, hi, ph).T[:out_h]
    a_high = _synthesize(bands["H"].T, bands["D"].T, lo, hi, ph).T[:out_h]
    return _synthesize(a_low, a_high, lo, hi, pw)[:, :out_w]


def dwt2(img, levels, basis="db2"):
    """Decompose an image into a WaveletPyramid of `levels` levels."""
    basis = get_basis(basis)
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 2:
        raise ValueError("dwt2 expects a 2-D array")
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if min(arr.shape) < 2**levels:
        raise ValueError(
            f"image {arr.shape[1]}x{arr.shape[0]} too small for {levels} decomposition levels"
        )
    highs = []
    cur = arr
    for _ in range(levels):
        cur, bands = _dwt_level(cur, basis)
        highs.append(bands)
    return WaveletPyramid(levels=levels, low=cur, highs=highs)


def idwt2(pyr, basis, out_width, out_height):
    """Invert a WaveletPyramid back to an out_height x out_width array.

    Output values are not clamped; display code clamps as needed.
    """
    basis = get_basis(basis)
    dims = band_dims(out_height, out_width, pyr.levels)
    if tuple(pyr.low.shape) != dims[-1]:
        raise ValueError(
            f"low band shape {pyr.low.shape} inconsistent with target "
            f"{out_width}x{out_height} at {pyr.levels} levels (expected {dims[-1]})"
        )
    if len(pyr.highs) != pyr.levels:
        raise ValueError(f"pyramid claims {pyr.levels} levels but has {len(pyr.highs)} band sets")
    for i, bands in enumerate(pyr.highs):
        for o in ORIENTATIONS:
            if o not in bands:
                raise ValueError(f"level {i + 1} missing orientation {o!r}")
            if tuple(bands[o].shape) != dims[i + 1]:
                raise ValueError(
                    f"level {i + 1} band {o} shape {bands[o].shape} != expected {dims[i + 1]}"
                )
    cur = pyr.low
    for i in range(pyr.levels - 1, -1, -1):
        cur = _idwt_level(cur, pyr.highs[i], basis, *dims[i])
    return cur
