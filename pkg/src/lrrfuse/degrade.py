"""Synthetic degradation: half-plane defocus blur, seeded noise models, and
deterministic structured test patterns.

All randomness flows through the counter-based Philox generator keyed by the
spec's seed, so outputs are reproducible across platforms and independent of
evaluation order.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

NOISE_KINDS = ("gaussian", "salt_pepper", "poisson")
FOCUS_SIDES = ("left", "right")


@dataclass(frozen=True)
class NoiseSpec:
    """One noise model instance; fields unused by `kind` are ignored."""

    kind: str
    variance: float = 0.0  # gaussian sigma^2
    mean: float = 0.0
    density: float = 0.0  # salt & pepper corruption probability
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.variance < 0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {self.density}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")

    @property
    def param(self):
        """The sweep-relevant scalar: variance, density, or None for poisson."""
        if self.kind == "gaussian":
            return self.variance
        if self.kind == "salt_pepper":
            return self.density
        return None


@dataclass(frozen=True)
class FocusSpec:
    """Half-plane defocus: `side` stays sharp, the other half is blurred."""

    side: str = "right"
    kernel_size: int = 3
    kernel_sigma: float = 7.0

    def __post_init__(self):
        if self.side not in FOCUS_SIDES:
            raise ValueError(f"side must be 'left' or 'right', got {self.side!r}")
        if self.kernel_size < 3 or self.kernel_size % 2 == 0:
            raise ValueError(f"kernel size must be odd and >= 3, got {self.kernel_size}")
        if self.kernel_sigma <= 0:
            raise ValueError(f"kernel sigma must be positive, got {self.kernel_sigma}")


def parse_noise(text, seed=0):
    """Parse CLI noise syntax: gaussian:VAR, sp:DENSITY / salt_pepper:DENSITY,
    or poisson."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind in ("sp", "salt_pepper", "s&p"):
        if not arg:
            raise ValueError("salt & pepper noise needs a density, e.g. sp:0.02")
        return NoiseSpec(kind="salt_pepper", density=float(arg), seed=seed)
    if kind == "gaussian":
        if not arg:
            raise ValueError("gaussian noise needs a variance, e.g. gaussian:0.001")
        return NoiseSpec(kind="gaussian", variance=float(arg), seed=seed)
    if kind == "poisson":
        if arg:
            raise ValueError("poisson noise takes no parameter")
        return NoiseSpec(kind="poisson", seed=seed)
    raise ValueError(f"unknown noise kind {kind!r} (gaussian:VAR, sp:DENSITY, poisson)")


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def child_seed(base, *key):
    """Derive an independent child seed from a base seed and index tuple."""
    return int(np.random.SeedSequence((int(base),) + tuple(int(k) for k in key)).generate_state(1)[0])


def gaussian_kernel(size, sigma):
    """size x size kernel with entries proportional to exp(-r^2 / (2 sigma^2)),
    normalized to sum 1."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd, got {size}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    half = size // 2
    ax = np.arange(-half, half + 1, dtype=float)
    grid = ax[:, None] ** 2 + ax[None, :] ** 2
    k = np.exp(-grid / (2.0 * sigma * sigma))
    return k / k.sum()


def apply_defocus(img, spec=FocusSpec()):
    """Blur the half-plane opposite spec.side; the focused half is untouched.

    The split is a hard column boundary at width / 2; convolution uses
    symmetric boundary extension.
    """
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("expected a non-empty 2-D image")
    kernel = gaussian_kernel(spec.kernel_size, spec.kernel_sigma)
    blurred = ndimage.convolve(arr, kernel, mode="reflect")
    split = (arr.shape[1] + 1) // 2  # columns < width/2
    out = arr.copy()
    if spec.side == "right":
        out[:, :split] = blurred[:, :split]
    else:
        out[:, split:] = blurred[:, split:]
    return np.clip(out, 0.0, 1.0)


def make_focus_pair(img, spec=FocusSpec()):
    """(focus-right, focus-left) sources synthesized from one ground truth."""
    right = apply_defocus(img, FocusSpec("right", spec.kernel_size, spec.kernel_sigma))
    left = apply_defocus(img, FocusSpec("left", spec.kernel_size, spec.kernel_sigma))
    return right, left


def add_noise(img, spec):
    """Corrupt an image per `spec`, clamped back to [0, 1].

    gaussian: add N(mean, variance) per pixel. salt_pepper: each pixel is
    independently replaced by 0 or 1 (equal odds) with probability density.
    poisson: pixel v becomes Poisson(v * 255) / 255.
    """
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("expected a non-empty 2-D image")
    rng = _rng(spec.seed)
    if spec.kind == "gaussian":
        out = arr + rng.normal(spec.mean, np.sqrt(spec.variance), size=arr.shape)
    elif spec.kind == "salt_pepper":
        hit = rng.random(arr.shape) < spec.density
        salt = rng.random(arr.shape) < 0.5
        out = np.where(hit, np.where(salt, 1.0, 0.0), arr)
    else:  # poisson
        out = rng.poisson(arr * 255.0).astype(float) / 255.0
    return np.clip(out, 0.0, 1.0)


def synthetic_pattern(index, height=128, width=128):
    """Deterministic structured test image: smooth background, blobs, and
    oriented gratings. `index` selects the (seeded) pattern family."""
    rng = _rng(child_seed(0xF0C05, index))
    y, x = np.mgrid[0:height, 0:width]
    u = x / max(width - 1, 1)
    v = y / max(height - 1, 1)

    a, b = rng.uniform(0.5, 2.0, size=2)
    img = 0.5 + 0.22 * np.cos(2 * np.pi * (a * u + b * v) + rng.uniform(0, 2 * np.pi))

    for _ in range(4):  # mid-scale blobs
        cx, cy = rng.uniform(0.15, 0.85, size=2)
        s = rng.uniform(0.04, 0.14)
        amp = rng.uniform(0.15, 0.4) * rng.choice((-1.0, 1.0))
        img += amp * np.exp(-((u - cx) ** 2 + (v - cy) ** 2) / (2 * s * s))

    for _ in range(3):  # oriented gratings: detail that defocus destroys
        freq = rng.uniform(6.0, 22.0)
        theta = rng.uniform(0, np.pi)
        amp = rng.uniform(0.08, 0.16)
        phase = rng.uniform(0, 2 * np.pi)
        img += amp * np.sin(2 * np.pi * freq * (u * np.cos(theta) + v * np.sin(theta)) + phase)

    texture = ndimage.gaussian_filter(rng.normal(size=(height, width)), sigma=0.8)
    img += 0.05 * texture / max(np.abs(texture).max(), 1e-12)

    img = (img - img.min()) / max(img.max() - img.min(), 1e-12)
    return 0.02 + 0.96 * img
