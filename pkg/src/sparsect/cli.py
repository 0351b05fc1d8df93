"""Command-line surface: phantom generation, simulation, sample extraction,
prediction stand-ins, and scoring.

Output tree rooted at ``--out``::

    manifest.json
    cases/<case>/full.spct, sparse_<views>.spct, target_<views>.spct
    samples/<mode>/<views>/<case>_<idx>_{input,target}.spct
    scores.csv

Targets on disk are the artifact sparse - full; correction is
``corrected = sparse - prediction``. Prediction files mirror the sample
layout under the predictions directory with ``_pred`` in place of ``_input``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset_io
from .blocks import (
    AXES,
    Block,
    decompose,
    extract_25d,
    extract_2d3ch,
    extract_directional_patch,
    plan_grid,
    reassemble,
)
from .metrics import SsimParams, mse, ssim, volume_scores
from .phantom import EllipsoidSpec, default_phantom_specs, generate_phantom, random_phantom_specs
from .recon import FilterSpec
from .simulate import simulate_case, window_normalize_array
from .types import VoxelVolume, WindowSpec, default_geometry

MODES = ("2d", "2d3ch", "25d", "3d", "patch-axial", "patch-coronal", "patch-sagittal")


def _parse_window(text: str) -> WindowSpec:
    try:
        width, level = text.lower().split("x")
        return WindowSpec(width=float(width), level=float(level))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"window must look like 2048x0, got {text!r}") from exc


def _parse_shape(text: str) -> tuple[int, int, int]:
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 1:
        return (parts[0], parts[0], parts[0])
    if len(parts) == 3:
        return tuple(parts)
    raise argparse.ArgumentTypeError(f"shape must be N or NX,NY,NZ, got {text!r}")


def _load_specs(path: Path) -> list[EllipsoidSpec]:
    data = json.loads(path.read_text())
    return [
        EllipsoidSpec(
            center=tuple(e["center"]),
            semi_axes=tuple(e["semi_axes"]),
            value=float(e["value"]),
            rotation=float(e.get("rotation", 0.0)),
        )
        for e in data
    ]


def cmd_phantom(args) -> int:
    shape = args.shape
    spacing = (args.spacing, args.spacing, args.spacing)
    radius = 0.42 * shape[0] * args.spacing
    if args.spec:
        specs = _load_specs(Path(args.spec))
    elif args.random:
        specs = random_phantom_specs(radius, args.random, args.seed)
    else:
        specs = default_phantom_specs(radius)
    vol = generate_phantom(shape, spacing, specs, seed=args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dataset_io.write_tensor(out, vol.values, {"unit": "HU", "spacing": list(spacing),
                                              "provenance": {"seed": args.seed}})
    print(f"wrote phantom {shape} to {out}")
    return 0


def _load_volume(path: Path) -> VoxelVolume:
    values, meta = dataset_io.read_tensor(path)
    spacing = tuple(meta.get("spacing", (1.0, 1.0, 1.0)))
    return VoxelVolume(values=np.asarray(values, dtype=np.float64), spacing=spacing,
                       unit=meta.get("unit", "HU"))


def _manifest(root: Path, seed: int = 0) -> dict:
    path = root / "manifest.json"
    if path.exists():
        return dataset_io.load_manifest(path)
    return {"seed": seed, "subjects": {}, "cases": [], "samples": []}


def cmd_simulate(args) -> int:
    root = Path(args.out)
    root.mkdir(parents=True, exist_ok=True)
    vol = _load_volume(Path(args.volume))
    views = sorted(int(v) for v in args.views.split(","))
    geometry = default_geometry(args.geometry, n_pixels=vol.shape[0], pixel_mm=vol.spacing[0],
                                nz=vol.shape[2], slice_mm=vol.spacing[2])
    bundle = simulate_case(
        vol, args.geometry, window=args.window, geometry=geometry,
        sparse_views=tuple(views), full_views=args.full_views,
        filter_spec=FilterSpec(kind=args.filter),
        provenance={"subject": args.subject, "case": args.case_id},
    )
    case_dir = root / "cases" / args.case_id
    case_dir.mkdir(parents=True, exist_ok=True)
    meta_common = {"unit": "normalized", "spacing": list(vol.spacing),
                   "geometry": args.geometry,
                   "window": {"width": args.window.width, "level": args.window.level}}
    files = {"full": f"cases/{args.case_id}/full.spct"}
    shapes = {"full": list(bundle.full.shape)}
    dataset_io.write_tensor(case_dir / "full.spct", bundle.full.values, meta_common)
    for v in views:
        files[f"sparse_{v}"] = f"cases/{args.case_id}/sparse_{v:04d}.spct"
        files[f"target_{v}"] = f"cases/{args.case_id}/target_{v:04d}.spct"
        shapes[f"sparse_{v}"] = list(bundle.sparse[v].shape)
        shapes[f"target_{v}"] = list(bundle.sparse[v].shape)
        dataset_io.write_tensor(case_dir / f"sparse_{v:04d}.spct",
                                bundle.sparse[v].values, {**meta_common, "views": v})
        # persisted training target is the artifact sparse - full
        dataset_io.write_tensor(case_dir / f"target_{v:04d}.spct",
                                -bundle.residual[v].values,
                                {**meta_common, "unit": "residual", "views": v})
    manifest = _manifest(root, args.seed)
    manifest["subjects"].setdefault(args.subject, args.split)
    manifest["cases"] = [c for c in manifest["cases"] if c["case"] != args.case_id]
    manifest["cases"].append({
        "case": args.case_id,
        "subject": args.subject,
        "geometry": args.geometry,
        "views": views,
        "full_views": args.full_views,
        "window": {"width": args.window.width, "level": args.window.level},
        "spacing": list(vol.spacing),
        "files": files,
        "shapes": shapes,
    })
    dataset_io.save_manifest(manifest, root / "manifest.json")
    print(f"simulated case {args.case_id} ({args.geometry}, views {views}) -> {case_dir}")
    return 0


def _case_volumes(root: Path, case: dict, views: int):
    sparse = _load_volume(root / case["files"][f"sparse_{views}"])
    target = _load_volume(root / case["files"][f"target_{views}"])
    full = _load_volume(root / case["files"]["full"])
    return full, sparse, target


def _extract_samples(root: Path, case: dict, views: int, mode: str,
                     block_size: int, margin: int):
    """Yield (index, input array, target array) pairs for one case/view level."""
    full, sparse, target = _case_volumes(root, case, views)
    if mode == "2d":
        for z in range(sparse.shape[2]):
            yield z, sparse.axial(z), target.axial(z)
    elif mode == "2d3ch":
        for z in range(sparse.shape[2]):
            yield z, extract_2d3ch(sparse, z), target.axial(z)
    else:
        grid = plan_grid(sparse.shape, block_size, margin)
        s_blocks = decompose(sparse, grid)
        t_blocks = decompose(target, grid)
        for i, (sb, tb) in enumerate(zip(s_blocks, t_blocks)):
            if mode == "3d":
                yield i, sb.values, tb.values
            elif mode == "25d":
                # network predicts the axial center cut's artifact
                yield i, extract_25d(sb), extract_25d(tb)[..., 0]
            else:
                axis = mode.removeprefix("patch-")
                yield i, extract_directional_patch(sb, axis), \
                    extract_directional_patch(tb, axis)


def cmd_extract(args) -> int:
    root = Path(args.out)
    manifest = dataset_io.load_manifest(root / "manifest.json")
    mode = args.mode
    n_written = 0
    manifest["samples"] = [
        s for s in manifest.get("samples", []) if s["mode"] != mode
    ]
    for case in manifest["cases"]:
        for views in case["views"]:
            if args.views and views not in args.views:
                continue
            out_dir = root / "samples" / mode / f"{views:04d}"
            out_dir.mkdir(parents=True, exist_ok=True)
            for idx, inp, tgt in _extract_samples(root, case, views, mode,
                                                  args.block_size, args.margin):
                stem = f"{case['case']}_{idx:05d}"
                rel_in = f"samples/{mode}/{views:04d}/{stem}_input.spct"
                rel_tg = f"samples/{mode}/{views:04d}/{stem}_target.spct"
                meta = {"case": case["case"], "views": views, "mode": mode, "index": idx}
                dataset_io.write_tensor(root / rel_in, inp, {**meta, "role": f"input-{mode}"})
                dataset_io.write_tensor(root / rel_tg, tgt, {**meta, "role": "target"})
                manifest["samples"].append({
                    "case": case["case"], "subject": case["subject"], "views": views,
                    "mode": mode, "index": idx,
                    "input": rel_in, "input_shape": list(inp.shape),
                    "target": rel_tg, "target_shape": list(tgt.shape),
                })
                n_written += 1
    dataset_io.save_manifest(manifest, root / "manifest.json")
    print(f"extracted {n_written} {mode} samples under {root / 'samples' / mode}")
    return 0


def _pred_rel(sample: dict) -> str:
    return sample["input"].replace("samples/", "", 1).replace("_input.spct", "_pred.spct")


def cmd_make_predictions(args) -> int:
    """Write stand-in prediction files: zeros or the oracle targets."""
    root = Path(args.out)
    manifest = dataset_io.load_manifest(root / "manifest.json")
    pred_root = Path(args.predictions)
    n = 0
    for sample in manifest["samples"]:
        if args.mode and sample["mode"] != args.mode:
            continue
        target, _ = dataset_io.read_tensor(root / sample["target"])
        pred = target if args.kind == "oracle" else np.zeros_like(target)
        path = pred_root / _pred_rel(sample)
        path.parent.mkdir(parents=True, exist_ok=True)
        dataset_io.write_tensor(path, pred, {"kind": args.kind})
        n += 1
    print(f"wrote {n} {args.kind} predictions under {pred_root}")
    return 0


def _write_pgm(path: Path, image: np.ndarray, lo: float, hi: float) -> None:
    scaled = np.clip((image - lo) / (hi - lo), 0, 1)
    data = (scaled * 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{data.shape[1]} {data.shape[0]}\n255\n".encode())
        f.write(data.tobytes())


def _score_volume_mode(root: Path, pred_root: Path, case: dict, views: int, mode: str,
                       samples: list[dict], block_size: int, margin: int,
                       params: SsimParams):
    full, sparse, _ = _case_volumes(root, case, views)
    if mode in ("2d", "2d3ch"):
        artifact = np.empty_like(sparse.values)
        for s in samples:
            pred, _ = dataset_io.read_tensor(pred_root / _pred_rel(s))
            artifact[:, :, s["index"]] = np.squeeze(np.asarray(pred, dtype=np.float64))
    else:  # 3d
        grid = plan_grid(sparse.shape, block_size, margin)
        coords = list(grid.block_coords())
        blks = []
        for s in samples:
            pred, _ = dataset_io.read_tensor(pred_root / _pred_rel(s))
            blks.append(Block(values=np.asarray(pred, dtype=np.float64),
                              grid_coords=coords[s["index"]]))
        artifact = reassemble(blks, grid, spacing=sparse.spacing).values
    corrected = np.clip(sparse.values - artifact, 0.0, 1.0)
    corr_vol = VoxelVolume(values=corrected, spacing=sparse.spacing, unit="normalized")
    sp = volume_scores(sparse, full, params)
    co = volume_scores(corr_vol, full, params)
    return sp, co, corr_vol, full, sparse


def _score_patch_mode(root: Path, pred_root: Path, samples: list[dict],
                      params: SsimParams):
    sp_mse, sp_ssim, co_mse, co_ssim = [], [], [], []
    for s in samples:
        inp, _ = dataset_io.read_tensor(root / s["input"])
        tgt, _ = dataset_io.read_tensor(root / s["target"])
        pred, _ = dataset_io.read_tensor(pred_root / _pred_rel(s))
        inp = np.asarray(inp, dtype=np.float64)
        tgt = np.asarray(tgt, dtype=np.float64)
        pred = np.asarray(pred, dtype=np.float64)
        axial = inp[..., 0] if inp.ndim == 3 else inp
        clean = axial - tgt
        corrected = np.clip(axial - pred, 0.0, 1.0)
        sp_mse.append(mse(axial, clean))
        co_mse.append(mse(corrected, clean))
        sp_ssim.append(ssim(axial, clean, params))
        co_ssim.append(ssim(corrected, clean, params))
    return (float(np.mean(sp_mse)), float(np.mean(sp_ssim))), \
        (float(np.mean(co_mse)), float(np.mean(co_ssim)))


def cmd_score(args) -> int:
    root = Path(args.out)
    manifest = dataset_io.load_manifest(root / "manifest.json")
    pred_root = Path(args.predictions)
    params = SsimParams()
    groups: dict[tuple, list[dict]] = {}
    for s in manifest["samples"]:
        groups.setdefault((s["mode"], s["case"], s["views"]), []).append(s)
    if not groups:
        print("no samples in manifest; run `sparsect extract` first", file=sys.stderr)
        return 1
    cases = {c["case"]: c for c in manifest["cases"]}
    rows = []
    for (mode, case_id, views), samples in sorted(groups.items()):
        for s in samples:
            if not (pred_root / _pred_rel(s)).exists():
                raise FileNotFoundError(
                    f"missing prediction {pred_root / _pred_rel(s)} for sample "
                    f"{s['input']}"
                )
        case = cases[case_id]
        if mode in ("2d", "2d3ch", "3d"):
            sp, co, corr_vol, full, sparse = _score_volume_mode(
                root, pred_root, case, views, mode, samples,
                args.block_size, args.margin, params,
            )
            if args.export_images:
                img_dir = Path(args.export_images) / f"{case_id}_{mode}_{views:04d}"
                img_dir.mkdir(parents=True, exist_ok=True)
                z = full.shape[2] // 2
                _write_pgm(img_dir / "full.pgm", full.axial(z), 0, 1)
                _write_pgm(img_dir / "sparse.pgm", sparse.axial(z), 0, 1)
                _write_pgm(img_dir / "corrected.pgm", corr_vol.axial(z), 0, 1)
                _write_pgm(img_dir / "difference.pgm",
                           corr_vol.axial(z) - full.axial(z), -0.3, 0.3)
        else:
            sp, co = _score_patch_mode(root, pred_root, samples, params)
        rows.append({
            "geometry": case["geometry"], "case": case_id, "mode": mode, "views": views,
            "sparse_mse": sp[0], "sparse_ssim": sp[1],
            "corrected_mse": co[0], "corrected_ssim": co[1],
        })
    header = ["geometry", "case", "mode", "views",
              "sparse_mse", "sparse_ssim", "corrected_mse", "corrected_ssim"]
    lines = ["\t".join(header)]
    for r in rows:
        lines.append("\t".join(str(r[k]) for k in header))
    table = "\n".join(lines) + "\n"
    (root / "scores.csv").write_text(table)
    manifest["scores"] = rows
    dataset_io.save_manifest(manifest, root / "manifest.json")
    print(table, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sparsect",
                                description="Sparse-view CT simulation toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    ph = sub.add_parser("phantom", help="generate an ellipsoid phantom volume")
    ph.add_argument("--out", required=True)
    ph.add_argument("--shape", type=_parse_shape, default=(128, 128, 32))
    ph.add_argument("--spacing", type=float, default=1.0)
    ph.add_argument("--spec", help="JSON file with ellipsoid specs")
    ph.add_argument("--random", type=int, default=0,
                    help="number of random inclusions (0 = default layout)")
    ph.add_argument("--seed", type=int, default=0)
    ph.set_defaults(func=cmd_phantom)

    sim = sub.add_parser("simulate", help="simulate full- and sparse-view scans")
    sim.add_argument("--volume", required=True, help="HU volume container")
    sim.add_argument("--geometry", choices=("parallel", "fan", "cone"), required=True)
    sim.add_argument("--views", default="32,64,128")
    sim.add_argument("--full-views", type=int, default=2048)
    sim.add_argument("--window", type=_parse_window, default=WindowSpec())
    sim.add_argument("--filter", choices=("ram-lak", "hann"), default="ram-lak")
    sim.add_argument("--out", required=True)
    sim.add_argument("--case-id", default="case000")
    sim.add_argument("--subject", default="subject000")
    sim.add_argument("--split", choices=("train", "validation", "test"), default="test")
    sim.add_argument("--seed", type=int, default=0)
    sim.set_defaults(func=cmd_simulate)

    ex = sub.add_parser("extract", help="extract training samples from cases")
    ex.add_argument("--out", required=True, help="root directory with manifest.json")
    ex.add_argument("--mode", choices=MODES, required=True)
    ex.add_argument("--views", type=lambda t: [int(v) for v in t.split(",")], default=None)
    ex.add_argument("--block-size", type=int, default=64)
    ex.add_argument("--margin", type=int, default=8)
    ex.set_defaults(func=cmd_extract)

    mp = sub.add_parser("make-predictions",
                        help="write zero or oracle prediction stand-ins")
    mp.add_argument("--out", required=True, help="root directory with manifest.json")
    mp.add_argument("--predictions", required=True)
    mp.add_argument("--kind", choices=("zero", "oracle"), default="zero")
    mp.add_argument("--mode", choices=MODES, default=None)
    mp.set_defaults(func=cmd_make_predictions)

    sc = sub.add_parser("score", help="score predictions against full-view data")
    sc.add_argument("--out", required=True, help="root directory with manifest.json")
    sc.add_argument("--predictions", required=True)
    sc.add_argument("--block-size", type=int, default=64)
    sc.add_argument("--margin", type=int, default=8)
    sc.add_argument("--export-images", default=None,
                    help="directory for PGM image grids (full/sparse/corrected/difference)")
    sc.set_defaults(func=cmd_score)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
