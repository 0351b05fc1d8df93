"""Image-quality scoring: MSE and SSIM, plus per-case score tables.

SSIM follows the standard luminance-contrast-structure form with a uniform 7x7 window,
k1 = 0.01, k2 = 0.03, data_range 1.0, averaged over valid window positions.
Volumes are scored slice-wise on axial planes and averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from .simulate import CaseBundle, clip_normalized
from .types import VoxelVolume


@dataclass(frozen=True)
class SsimParams:
    window: int = 7
    k1: float = 0.01
    k2: float = 0.03
    data_range: float = 1.0

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and positive, got {self.window}")
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("k1 and k2 must be > 0")


def mse(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def ssim(a: np.ndarray, b: np.ndarray, params: SsimParams = SsimParams()) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 2:
        raise ValueError(f"ssim expects 2D images, got {a.ndim}D")
    w = params.window
    if min(a.shape) < w:
        raise ValueError(f"image {a.shape} smaller than {w}x{w} window")
    c1 = (params.k1 * params.data_range) ** 2
    c2 = (params.k2 * params.data_range) ** 2

    mu_a = uniform_filter(a, w)
    mu_b = uniform_filter(b, w)
    mu_aa = uniform_filter(a * a, w)
    mu_bb = uniform_filter(b * b, w)
    mu_ab = uniform_filter(a * b, w)
    var_a = mu_aa - mu_a * mu_a
    var_b = mu_bb - mu_b * mu_b
    cov = mu_ab - mu_a * mu_b

    s = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    )
    h = w // 2
    valid = s[h:s.shape[0] - h, h:s.shape[1] - h]
    return float(valid.mean())


def volume_scores(a: VoxelVolume, b: VoxelVolume,
                  params: SsimParams = SsimParams()) -> tuple[float, float]:
    """Mean slice-wise (MSE, SSIM) over axial planes."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    nz = a.shape[2]
    mses = [mse(a.axial(z), b.axial(z)) for z in range(nz)]
    ssims = [ssim(a.axial(z), b.axial(z), params) for z in range(nz)]
    return float(np.mean(mses)), float(np.mean(ssims))


def score_case(bundle: CaseBundle, corrected: dict[int, VoxelVolume],
               params: SsimParams = SsimParams()) -> dict:
    """Per view level: mean slice-wise MSE/SSIM of sparse and corrected vs full.

    Corrected volumes are clipped to [0, 1] for reporting. The returned dict
    mirrors the supplementary-table arrangement: one row per view count with
    sparse and corrected columns for each metric.
    """
    rows = []
    for views in sorted(bundle.sparse):
        sp_mse, sp_ssim = volume_scores(bundle.sparse[views], bundle.full, params)
        row = {"views": views, "sparse_mse": sp_mse, "sparse_ssim": sp_ssim}
        if views in corrected:
            corr = clip_normalized(corrected[views])
            c_mse, c_ssim = volume_scores(corr, bundle.full, params)
            row["corrected_mse"] = c_mse
            row["corrected_ssim"] = c_ssim
        rows.append(row)
    return {"geometry": bundle.geometry_kind, "rows": rows}
