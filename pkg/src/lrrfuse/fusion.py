"""Fusion pipeline: decompose two source images, fuse the low band by
spatial-frequency choose-max, fuse each high band patchwise by comparing
nuclear norms of low-rank representation coefficients, reconstruct.

Patches are copied whole, never blended. A winning high-band patch is
written as its denoised low-rank reconstruction X @ Z (the column-sparse
noise split E is dropped); set raw_high_patches to copy the raw patch
instead. A plain choose-abs-max wavelet fuser is included as a baseline.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import imagecore, wavelet
from .lrr import AlmParams, lrr_solve, nuclear_norm

TIE_BREAKS = ("second", "first")


@dataclass(frozen=True)
class FusionConfig:
    """Everything the parameter sweeps vary.

    lam balances low-rank structure against noise separation in the
    patchwise solves; tie_break names the source that wins exact ties
    ("second" is the literal otherwise-branch of the choose-max rules).
    """

    lam: float = 1.0
    patch_size: int = 16
    levels: int = 2
    basis: str = "db2"
    alm: AlmParams = field(default_factory=AlmParams)
    tie_break: str = "second"
    raw_high_patches: bool = False

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.patch_size < 2:
            raise ValueError(f"patch_size must be >= 2, got {self.patch_size}")
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {self.tie_break!r}")


def spatial_frequency(patch):
    """Root-mean-square of horizontal and vertical first differences:
    sqrt(f_x^2 + f_y^2) with f_x^2 = sum of squared column diffs / (M N)."""
    p = np.asarray(patch, dtype=float)
    if p.ndim != 2 or p.shape[0] < 2 or p.shape[1] < 2:
        raise ValueError("spatial frequency needs a patch of at least 2x2")
    return _sf(p)


def _sf(p):
    mn = p.size
    fx2 = np.sum(np.diff(p, axis=1) ** 2) / mn
    fy2 = np.sum(np.diff(p, axis=0) ** 2) / mn
    return float(np.sqrt(fx2 + fy2))


def _check_pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("expected 2-D arrays")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[1]}x{a.shape[0]} vs {b.shape[1]}x{b.shape[0]}")
    return a, b


def _tiled_pair(a, b, patch_size):
    # a patch larger than the band degrades to tiling by the band's short side,
    # so a small band becomes a single whole-band patch
    h, w = a.shape
    n = max(2, min(patch_size, h, w))
    grid = imagecore.tile(w, h, n)
    return grid, imagecore.pad_to_grid(a, grid), imagecore.pad_to_grid(b, grid)


def sf_decision_map(band1, band2, cfg):
    """Per-patch boolean map: True where source 1 wins the spatial-frequency
    comparison under cfg.tie_break."""
    b1, b2 = _check_pair(band1, band2)
    grid, p1, p2 = _tiled_pair(b1, b2, cfg.patch_size)
    wins = np.empty((grid.rows, grid.cols), dtype=bool)
    for idx, s in enumerate(imagecore.patch_slices(grid)):
        sf1, sf2 = _sf(p1[s]), _sf(p2[s])
        wins.flat[idx] = sf1 > sf2 if cfg.tie_break == "second" else sf1 >= sf2
    return wins


def fuse_low(band1, band2, cfg):
    """Choose-max on spatial frequency: each output patch is a verbatim copy
    of the winning source's patch."""
    b1, b2 = _check_pair(band1, band2)
    h, w = b1.shape
    grid, p1, p2 = _tiled_pair(b1, b2, cfg.patch_size)
    wins = sf_decision_map(b1, b2, cfg)
    out = np.empty_like(p1)
    for idx, s in enumerate(imagecore.patch_slices(grid)):
        out[s] = p1[s] if wins.flat[idx] else p2[s]
    return out[:h, :w]


def fuse_high(band1, band2, cfg, workers=1):
    """Patchwise low-rank fusion of one high-band pair.

    Each patch is solved with itself as the dictionary; the source whose
    coefficient matrix has the larger nuclear norm wins, and its low-rank
    reconstruction (or raw patch, per config) is written to the output.
    Patch solves are independent; `workers` > 1 runs them on a thread pool
    with results assembled in deterministic patch order.
    """
    b1, b2 = _check_pair(band1, band2)
    h, w = b1.shape
    grid, p1, p2 = _tiled_pair(b1, b2, cfg.patch_size)
    alm = replace(cfg.alm, lam=cfg.lam)
    prefer_first_on_tie = cfg.tie_break == "first"

    def fuse_patch(s):
        x1, x2 = p1[s], p2[s]
        sol1 = lrr_solve(x1, alm)
        sol2 = lrr_solve(x2, alm)
        n1, n2 = nuclear_norm(sol1.Z), nuclear_norm(sol2.Z)
        take1 = n1 >= n2 if prefer_first_on_tie else n1 > n2
        x, z = (x1, sol1.Z) if take1 else (x2, sol2.Z)
        return x.copy() if cfg.raw_high_patches else x @ z

    slices = list(imagecore.patch_slices(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            patches = list(pool.map(fuse_patch, slices))
    else:
        patches = [fuse_patch(s) for s in slices]
    out = np.empty_like(p1)
    for s, patch in zip(slices, patches):
        out[s] = patch
    if not np.all(np.isfinite(out)):
        raise ValueError("fuse_high produced non-finite values")
    return out[:h, :w]


def fuse(img1, img2, cfg=FusionConfig(), workers=1):
    """Full pipeline on an image pair; returns the fused image in [0, 1]."""
    i1, i2 = _check_pair(img1, img2)
    basis = wavelet.get_basis(cfg.basis)
    pyr1 = wavelet.dwt2(i1, cfg.levels, basis)
    pyr2 = wavelet.dwt2(i2, cfg.levels, basis)
    low = fuse_low(pyr1.low, pyr2.low, cfg)
    highs = [
        {o: fuse_high(h1[o], h2[o], cfg, workers=workers) for o in wavelet.ORIENTATIONS}
        for h1, h2 in zip(pyr1.highs, pyr2.highs)
    ]
    fused = wavelet.WaveletPyramid(levels=cfg.levels, low=low, highs=highs)
    h, w = i1.shape
    return np.clip(wavelet.idwt2(fused, basis, w, h), 0.0, 1.0)


def fuse_dwt_baseline(img1, img2, cfg=FusionConfig()):
    """Plain wavelet fusion baseline: average the low bands, take the
    elementwise absolute-max of each high-band pair, reconstruct."""
    i1, i2 = _check_pair(img1, img2)
    basis = wavelet.get_basis(cfg.basis)
    pyr1 = wavelet.dwt2(i1, cfg.levels, basis)
    pyr2 = wavelet.dwt2(i2, cfg.levels, basis)
    low = (pyr1.low + pyr2.low) / 2.0
    highs = [
        {
            o: np.where(np.abs(h1[o]) >= np.abs(h2[o]), h1[o], h2[o])
            for o in wavelet.ORIENTATIONS
        }
        for h1, h2 in zip(pyr1.highs, pyr2.highs)
    ]
    fused = wavelet.WaveletPyramid(levels=cfg.levels, low=low, highs=highs)
    h, w = i1.shape
    return np.clip(wavelet.idwt2(fused, basis, w, h), 0.0, 1.0)


# flat key=value config format; keys mirror the CLI flags
_CONFIG_KEYS = {
    "lambda": ("lam", float),
    "patch_size": ("patch_size", int),
    "levels": ("levels", int),
    "basis": ("basis", str),
    "tie_break": ("tie_break", str),
    "raw_high_patches": ("raw_high_patches", None),  # bool, parsed below
    "alm.tol": ("tol", float),
    "alm.max_iter": ("max_iter", int),
    "alm.mu0": ("mu0", float),
    "alm.rho": ("rho", float),
    "alm.mu_max": ("mu_max", float),
}


def save_config(cfg, path):
    """Write a FusionConfig as flat key = value lines."""
    lines = [
        f"lambda = {cfg.lam!r}",
        f"patch_size = {cfg.patch_size}",
        f"levels = {cfg.levels}",
        f"basis = {cfg.basis}",
        f"tie_break = {cfg.tie_break}",
        f"raw_high_patches = {'true' if cfg.raw_high_patches else 'false'}",
        f"alm.tol = {cfg.alm.tol!r}",
        f"alm.max_iter = {cfg.alm.max_iter}",
        f"alm.mu0 = {cfg.alm.mu0!r}",
        f"alm.rho = {cfg.alm.rho!r}",
        f"alm.mu_max = {cfg.alm.mu_max!r}",
    ]
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_config(path, base=None):
    """Read a flat key = value config file into a FusionConfig.

    Unset keys keep the values of `base` (default FusionConfig() defaults).
    """
    cfg = base if base is not None else FusionConfig()
    top = {}
    alm = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            attr, cast = _CONFIG_KEYS[key]
            if key == "raw_high_patches":
                if value.lower() not in ("true", "false"):
                    raise ValueError(f"{path}:{lineno}: expected true/false, got {value!r}")
                parsed = value.lower() == "true"
            else:
                try:
                    parsed = cast(value)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
            (alm if key.startswith("alm.") else top)[attr] = parsed
    out = replace(cfg, **top)
    # the single lambda key governs both the pipeline and the solver
    return replace(out, alm=replace(out.alm, lam=out.lam, **alm))
