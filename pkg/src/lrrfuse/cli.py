"""Command-line front end: fuse image pairs, synthesize degraded corpora,
run parameter sweeps, and score fusion methods against references.

Exit codes: 0 success, 1 internal or partial failure, 2 usage error.
"""

import argparse
import csv
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import degrade, fusion, imagecore, metrics
from .degrade import FocusSpec, NoiseSpec, child_seed, parse_noise
from .fusion import FusionConfig
from .lrr import AlmParams

SWEEP_HEADER = ["noise_kind", "noise_param", "lambda", "patch", "level", "seed", "rmse", "psnr", "ssim", "error"]
EVAL_HEADER = ["method", "image"] + SWEEP_HEADER
MANIFEST_HEADER = ["gt", "source1", "source2", "noise_kind", "noise_param", "seed"]
METHODS = {"proposed": fusion.fuse, "dwt_baseline": fusion.fuse_dwt_baseline}

# recommended balance coefficients per noise setting; unlisted parameters
# snap to the nearest listed one
GAUSSIAN_LAMBDAS = {0.0005: 4.5, 0.001: 3.0, 0.005: 1.0, 0.01: 1.0}
SALT_PEPPER_LAMBDAS = {0.01: 1.5, 0.02: 1.0}
POISSON_LAMBDA = 2.0


def default_lambda(noise):
    """Recommended lambda for a noise setting."""
    if noise.kind == "gaussian":
        table, key = GAUSSIAN_LAMBDAS, noise.variance
    elif noise.kind == "salt_pepper":
        table, key = SALT_PEPPER_LAMBDAS, noise.density
    elif noise.kind == "poisson":
        return POISSON_LAMBDA
    else:
        raise ValueError(f"no default lambda for noise kind {noise.kind!r}")
    return table[min(table, key=lambda p: abs(p - key))]


@dataclass
class SweepSpec:
    """One full sweep: the grids, the noise settings, and the corpus."""

    lambda_grid: list
    patch_grid: list
    level_grid: list
    noise_specs: list
    corpus: list
    seed: int = 0
    crop: int = 128  # center-crop size; None runs full resolution
    basis: str = "db2"
    workers: int = 1
    alm: AlmParams = field(default_factory=AlmParams)

    def __post_init__(self):
        for name in ("lambda_grid", "patch_grid", "level_grid", "noise_specs", "corpus"):
            if not getattr(self, name):
                raise ValueError(f"sweep needs a non-empty {name}")


def _center_crop(arr, size):
    if size is None:
        return arr
    h, w = arr.shape
    ch, cw = min(size, h), min(size, w)
    top, left = (h - ch) // 2, (w - cw) // 2
    return arr[top : top + ch, left : left + cw]


def _degraded_pair(gt, noise, base_seed, image_index):
    right, left = degrade.make_focus_pair(gt)
    n1 = degrade.add_noise(right, replace(noise, seed=child_seed(base_seed, image_index, 0)))
    n2 = degrade.add_noise(left, replace(noise, seed=child_seed(base_seed, image_index, 1)))
    return n1, n2


def _avg(values):
    return float(np.mean(values))


def run_sweep(spec, out_csv=None):
    """Degrade, fuse, and score every grid cell; returns the CSV rows.

    Each data row averages the metrics over the corpus for one
    (noise, lambda, patch, level) cell; a per-(noise, patch, level) summary
    row marks the SSIM-argmax lambda with 'argmax_lambda' in the error
    column. Cell failures are recorded in the error column instead of
    aborting the sweep.
    """
    gts = [_center_crop(imagecore.load_image(p), spec.crop) for p in spec.corpus]
    rows = []
    for noise in spec.noise_specs:
        pairs = [_degraded_pair(gt, noise, spec.seed, i) for i, gt in enumerate(gts)]
        cells = [
            (lam, patch, level)
            for lam in spec.lambda_grid
            for patch in spec.patch_grid
            for level in spec.level_grid
        ]

        def run_cell(cell):
            lam, patch, level = cell
            row = {
                "noise_kind": noise.kind,
                "noise_param": noise.param,
                "lambda": lam,
                "patch": patch,
                "level": level,
                "seed": spec.seed,
                "rmse": None,
                "psnr": None,
                "ssim": None,
                "error": "",
            }
            try:
                cfg = FusionConfig(lam=lam, patch_size=patch, levels=level, basis=spec.basis, alm=spec.alm)
                reports = [
                    metrics.evaluate(fusion.fuse(n1, n2, cfg), gt)
                    for gt, (n1, n2) in zip(gts, pairs)
                ]
                row["rmse"] = _avg([r.rmse for r in reports])
                row["psnr"] = _avg([r.psnr for r in reports])
                row["ssim"] = _avg([r.ssim for r in reports])
            except Exception as exc:  # recorded per row; sweep continues
                row["error"] = str(exc)
            return row

        if spec.workers > 1:
            with ThreadPoolExecutor(max_workers=spec.workers) as pool:
                noise_rows = list(pool.map(run_cell, cells))
        else:
            noise_rows = [run_cell(c) for c in cells]
        rows.extend(noise_rows)

        for patch in spec.patch_grid:
            for level in spec.level_grid:
                group = [
                    r for r in noise_rows
                    if r["patch"] == patch and r["level"] == level and not r["error"]
                ]
                if group:
                    best = max(group, key=lambda r: r["ssim"])
                    rows.append({**best, "error": "argmax_lambda"})
    if out_csv is not None:
        _write_csv(out_csv, SWEEP_HEADER, rows)
    return rows


def run_eval(manifest_path, methods, out_csv=None, base_cfg=None, workers=1):
    """Fuse every manifest tuple with every method and score against the
    ground truth; per-image rows plus one average row per method."""
    base_cfg = base_cfg if base_cfg is not None else FusionConfig()
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; expected one of {sorted(METHODS)}")
    entries = _read_manifest(manifest_path)

    def run_entry(job):
        method, entry = job
        noise_kind, noise_param = entry["noise_kind"], entry["noise_param"]
        row = {
            "method": method,
            "image": entry["gt"],
            "noise_kind": noise_kind,
            "noise_param": noise_param,
            "lambda": None,
            "patch": base_cfg.patch_size,
            "level": base_cfg.levels,
            "seed": entry["seed"],
            "rmse": None,
            "psnr": None,
            "ssim": None,
            "error": "",
        }
        try:
            noise = _noise_from_fields(noise_kind, noise_param)
            lam = default_lambda(noise) if noise is not None else base_cfg.lam
            cfg = replace(base_cfg, lam=lam)
            row["lambda"] = lam
            gt = imagecore.load_image(entry["gt"])
            s1 = imagecore.load_image(entry["source1"])
            s2 = imagecore.load_image(entry["source2"])
            report = metrics.evaluate(METHODS[method](s1, s2, cfg), gt)
            row.update(rmse=report.rmse, psnr=report.psnr, ssim=report.ssim)
        except Exception as exc:
            row["error"] = str(exc)
        return row

    jobs = [(method, entry) for method in methods for entry in entries]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_entry, jobs))
    else:
        rows = [run_entry(j) for j in jobs]

    for method in methods:
        good = [r for r in rows if r["method"] == method and not r["error"]]
        avg_row = {
            "method": method,
            "image": "average",
            "noise_kind": "",
            "noise_param": None,
            "lambda": None,
            "patch": base_cfg.patch_size,
            "level": base_cfg.levels,
            "seed": "",
            "rmse": _avg([r["rmse"] for r in good]) if good else None,
            "psnr": _avg([r["psnr"] for r in good]) if good else None,
            "ssim": _avg([r["ssim"] for r in good]) if good else None,
            "error": "" if good else "no successful rows",
        }
        rows.append(avg_row)
    if out_csv is not None:
        _write_csv(out_csv, EVAL_HEADER, rows)
    return rows


def _noise_from_fields(kind, param):
    if kind in ("", "none"):
        return None
    value = float(param) if param not in (None, "") else 0.0
    if kind == "gaussian":
        return NoiseSpec(kind="gaussian", variance=value)
    if kind == "salt_pepper":
        return NoiseSpec(kind="salt_pepper", density=value)
    if kind == "poisson":
        return NoiseSpec(kind="poisson")
    raise ValueError(f"unknown noise kind {kind!r} in manifest")


def _read_manifest(path):
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = set(MANIFEST_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"manifest {path} missing columns: {sorted(missing)}")
        return list(reader)


def _fmt(key, value):
    if value is None or value == "":
        return ""
    if key in ("rmse", "psnr", "ssim"):
        return f"{value:.6f}"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(k, row.get(k)) for k in header])


def _build_cfg(args):
    cfg = FusionConfig()
    noise = parse_noise(args.noise, seed=getattr(args, "seed", 0)) if getattr(args, "noise", None) else None
    if noise is not None:
        cfg = replace(cfg, lam=default_lambda(noise))
    if getattr(args, "config", None):
        cfg = fusion.load_config(args.config, base=cfg)
    overrides = {}
    if args.lam is not None:
        overrides["lam"] = args.lam
    if args.patch is not None:
        overrides["patch_size"] = args.patch
    if args.levels is not None:
        overrides["levels"] = args.levels
    if args.basis is not None:
        overrides["basis"] = args.basis
    if getattr(args, "tie_break", None) is not None:
        overrides["tie_break"] = args.tie_break
    if getattr(args, "raw_high_patches", False):
        overrides["raw_high_patches"] = True
    return replace(cfg, **overrides) if overrides else cfg


def cmd_fuse(args):
    cfg = _build_cfg(args)
    img1 = imagecore.load_image(args.input1)
    img2 = imagecore.load_image(args.input2)
    if img1.shape != img2.shape:
        raise ValueError(
            f"size mismatch: {args.input1} is {img1.shape[1]}x{img1.shape[0]}, "
            f"{args.input2} is {img2.shape[1]}x{img2.shape[0]}"
        )
    start = time.perf_counter()
    fused = fusion.fuse(img1, img2, cfg, workers=args.workers)
    elapsed = time.perf_counter() - start
    imagecore.save_image(fused, args.output)
    print(
        f"fused {args.input1} + {args.input2} -> {args.output} "
        f"[lambda={cfg.lam:g} patch={cfg.patch_size} levels={cfg.levels} "
        f"basis={cfg.basis} time={elapsed:.2f}s]"
    )
    return 0


def cmd_degrade(args):
    gt = imagecore.load_image(args.input)
    noise = parse_noise(args.noise, seed=args.seed)
    focus = FocusSpec(side=args.focus, kernel_size=args.kernel_size, kernel_sigma=args.kernel_sigma)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    right, left = degrade.make_focus_pair(gt, focus)
    noisy_right = degrade.add_noise(right, replace(noise, seed=child_seed(args.seed, 0)))
    noisy_left = degrade.add_noise(left, replace(noise, seed=child_seed(args.seed, 1)))

    stem = Path(args.input).stem
    ext = Path(args.input).suffix.lower() if Path(args.input).suffix.lower() in (".png", ".pgm") else ".png"
    tag = noise.kind if noise.param is None else f"{noise.kind}{noise.param:g}"
    path_right = outdir / f"{stem}_{tag}_seed{args.seed}_right{ext}"
    path_left = outdir / f"{stem}_{tag}_seed{args.seed}_left{ext}"
    imagecore.save_image(noisy_right, path_right)
    imagecore.save_image(noisy_left, path_left)

    # source1 is the side named by --focus
    source1, source2 = (path_right, path_left) if args.focus == "right" else (path_left, path_right)
    manifest = outdir / args.manifest
    new_file = not manifest.exists()
    with open(manifest, "a", newline="") as f:
        writer = csv.writer(f)
        if new_file:
            writer.writerow(MANIFEST_HEADER)
        writer.writerow(
            [str(Path(args.input)), str(source1), str(source2), noise.kind, _fmt("noise_param", noise.param), args.seed]
        )
    print(f"wrote {path_right} and {path_left}; manifest {manifest}")
    return 0


def _parse_grid(text, cast):
    values = [cast(part) for part in text.split(",") if part.strip()]
    if not values:
        raise ValueError(f"empty grid {text!r}")
    return values


def cmd_sweep(args):
    spec = SweepSpec(
        lambda_grid=_parse_grid(args.lambdas, float),
        patch_grid=_parse_grid(args.patches, int),
        level_grid=_parse_grid(args.levels, int),
        noise_specs=[parse_noise(t) for t in args.noises.split(",") if t.strip()],
        corpus=args.corpus,
        seed=args.seed,
        crop=None if args.full else args.crop,
        basis=args.basis,
        workers=args.workers,
    )
    rows = run_sweep(spec, out_csv=args.out)
    data_rows = [r for r in rows if r["error"] != "argmax_lambda"]
    for row in rows:
        if row["error"] == "argmax_lambda":
            print(
                f"best lambda for {row['noise_kind']}"
                f"{'' if row['noise_param'] is None else ':' + format(row['noise_param'], 'g')}"
                f" (patch {row['patch']}, level {row['level']}): {row['lambda']:g}"
                f" [ssim={row['ssim']:.6f}]"
            )
    failed = [r for r in data_rows if r["error"]]
    print(f"wrote {len(rows)} rows ({len(failed)} failed cells) to {args.out}")
    return 1 if data_rows and len(failed) == len(data_rows) else 0


def cmd_eval(args):
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    rows = run_eval(args.manifest, methods, out_csv=args.out, workers=args.workers)
    per_image = [r for r in rows if r["image"] != "average"]
    failed = [r for r in per_image if r["error"]]
    for row in rows:
        if row["image"] == "average" and not row["error"]:
            print(f"{row['method']}: avg rmse={row['rmse']:.6f} psnr={row['psnr']:.6f} ssim={row['ssim']:.6f}")
    print(f"wrote {len(rows)} rows ({len(failed)} failed) to {args.out}")
    return 1 if per_image and len(failed) == len(per_image) else 0


def _add_cfg_flags(p):
    p.add_argument("--config", help="flat key=value fusion config file")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, help="balance coefficient")
    p.add_argument("--patch", type=int, help="patch size")
    p.add_argument("--levels", type=int, help="decomposition levels")
    p.add_argument("--basis", choices=("haar", "db2"), help="wavelet basis")
    p.add_argument("--tie-break", dest="tie_break", choices=("second", "first"))
    p.add_argument("--raw-high-patches", dest="raw_high_patches", action="store_true",
                   help="copy winning high-band patches raw instead of their low-rank reconstruction")
    p.add_argument("--workers", type=int, default=1, help="worker threads")


def _build_parser():
    parser = argparse.ArgumentParser(prog="lrrfuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="fuse two source images")
    p.add_argument("input1")
    p.add_argument("input2")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--noise", help="noise context for the default lambda, e.g. gaussian:0.001")
    p.add_argument("--seed", type=int, default=0)
    _add_cfg_flags(p)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("degrade", help="synthesize a degraded focus pair")
    p.add_argument("input")
    p.add_argument("--outdir", required=True)
    p.add_argument("--noise", required=True, help="gaussian:VAR | sp:DENSITY | poisson")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--focus", choices=("left", "right"), default="right",
                   help="focus side listed as source1 in the manifest")
    p.add_argument("--kernel-size", type=int, default=3)
    p.add_argument("--kernel-sigma", type=float, default=7.0)
    p.add_argument("--manifest", default="manifest.csv")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("sweep", help="parameter sweep over a degraded corpus")
    p.add_argument("--corpus", nargs="+", required=True, help="ground-truth image paths")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--lambdas", default="1,2,3,4.5,10,20")
    p.add_argument("--patches", default="16")
    p.add_argument("--levels", default="2")
    p.add_argument("--noises", default="gaussian:0.001")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crop", type=int, default=128, help="center-crop size for desk-scale runs")
    p.add_argument("--full", action="store_true", help="run at full resolution")
    p.add_argument("--basis", choices=("haar", "db2"), default="db2")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval", help="score fusion methods over a degraded-pair manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--methods", default="proposed,dwt_baseline")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, IsADirectoryError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
