"""Analytic reconstruction: ramp-filtered backprojection and FDK.

Filtering is frequency-domain multiplication on zero-padded detector rows
with the band-limited (discrete) Ram-Lak kernel; an optional Hann window
apodizes the response. Fan and cone backprojections work in detector
coordinates rescaled to the isocenter plane and weight by 1/U^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft

from . import _kernels
from .types import BeamGeometry, Sinogram, VoxelVolume

FILTER_KINDS = ("ram-lak", "hann")


@dataclass(frozen=True)
class FilterSpec:
    """Ramp filter configuration: kernel kind and zero-padding factor."""

    kind: str = "ram-lak"
    padding: int = 2

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise ValueError(f"filter kind must be one of {FILTER_KINDS}, got {self.kind!r}")
        if self.padding < 2 or (self.padding & (self.padding - 1)) != 0:
            raise ValueError(f"padding factor must be a power of two >= 2, got {self.padding}")


def ramp_kernel(n: int, spacing: float) -> np.ndarray:
    """Discrete band-limited Ram-Lak kernel h[-n//2 .. n//2).

    h[0] = 1/(4*ds^2), h[k] = -1/(pi*k*ds)^2 for odd k, 0 for even k != 0.
    """
    k = np.arange(-(n // 2), n - n // 2)
    h = np.zeros(n, dtype=np.float64)
    h[k == 0] = 1.0 / (4.0 * spacing**2)
    odd = (k % 2) != 0
    h[odd] = -1.0 / (np.pi * k[odd] * spacing) ** 2
    return h


def _filter_rows(rows: np.ndarray, spacing: float, spec: FilterSpec) -> np.ndarray:
    """Convolve each row (last axis) with the discrete ramp kernel.

    Pure discrete convolution: a unit impulse row comes back as the kernel
    itself. Callers multiply by the detector spacing where the Riemann-sum
    factor is needed.
    """
    n = rows.shape[-1]
    m = spec.padding * n
    h = np.zeros(m, dtype=np.float64)
    base = ramp_kernel(2 * n - 1, spacing)  # offsets -(n-1) .. n-1
    h[: n] = base[n - 1 :]          # offsets 0 .. n-1
    h[m - (n - 1):] = base[: n - 1]  # offsets -(n-1) .. -1 wrapped
    hf = fft.rfft(h)
    if spec.kind == "hann":
        f = np.arange(hf.size) / (m / 2)
        hf = hf * 0.5 * (1 + np.cos(np.pi * np.clip(f, 0, 1)))
    padded = np.zeros(rows.shape[:-1] + (m,), dtype=np.float64)
    padded[..., :n] = rows
    out = fft.irfft(fft.rfft(padded, axis=-1) * hf, n=m, axis=-1)
    return out[..., :n]


def ramp_filter(sino: Sinogram, spec: FilterSpec = FilterSpec()) -> Sinogram:
    """Ramp-filter every view along the detector axis (per row for cone)."""
    filtered = _filter_rows(sino.values, sino.geometry.det_spacing, spec)
    return Sinogram(angles=sino.angles, values=filtered, geometry=sino.geometry)


def fbp_parallel(
    sino: Sinogram,
    out_shape: tuple[int, int],
    spec: FilterSpec = FilterSpec(),
    pixel_size: float = 1.0,
) -> np.ndarray:
    """Filtered backprojection for parallel-beam sinograms over [0, pi)."""
    g = sino.geometry
    if g.kind != "parallel":
        raise ValueError(f"fbp_parallel needs a parallel sinogram, got {g.kind!r}")
    q = _filter_rows(sino.values, g.det_spacing, spec) * g.det_spacing
    out = np.empty(out_shape, dtype=np.float64)
    _kernels.backproject_parallel_pixel(
        np.ascontiguousarray(q), pixel_size, sino.angles, g.det_count, g.det_spacing, out
    )
    out *= np.pi / sino.n_views
    return out


def fbp_fan(
    sino: Sinogram,
    out_shape: tuple[int, int],
    spec: FilterSpec = FilterSpec(),
    pixel_size: float = 1.0,
) -> np.ndarray:
    """Fan-beam FBP (flat detector, full 2*pi scan).

    Cosine pre-weighting, ramp filtering in isocenter-rescaled detector
    coordinates, then 1/U^2-weighted pixel-driven backprojection.
    """
    g = sino.geometry
    if g.kind != "fan":
        raise ValueError(f"fbp_fan needs a fan sinogram, got {g.kind!r}")
    du = g.det_spacing * g.sod / g.sdd  # detector pitch rescaled to isocenter
    u = (np.arange(g.det_count) - (g.det_count - 1) / 2.0) * du
    cosw = g.sod / np.sqrt(g.sod**2 + u**2)
    q = _filter_rows(sino.values * cosw, du, spec) * du
    out = np.empty(out_shape, dtype=np.float64)
    _kernels.backproject_fan_pixel(
        np.ascontiguousarray(q), pixel_size, sino.angles, g.det_count, du, g.sod, out
    )
    out *= sino.geometry.angular_range / sino.n_views / 2.0
    return out


def fdk_cone(
    sino: Sinogram,
    out_shape: tuple[int, int, int],
    spec: FilterSpec = FilterSpec(),
    pixel_size: float = 1.0,
    slice_size: float | None = None,
) -> VoxelVolume:
    """Feldkamp-Davis-Kress cone-beam reconstruction (flat detector, 2*pi)."""
    g = sino.geometry
    if g.kind != "cone":
        raise ValueError(f"fdk_cone needs a cone sinogram, got {g.kind!r}")
    pz = pixel_size if slice_size is None else slice_size
    du = g.det_spacing * g.sod / g.sdd
    dv = g.det_row_spacing * g.sod / g.sdd
    u = (np.arange(g.det_count) - (g.det_count - 1) / 2.0) * du
    v = (np.arange(g.det_rows) - (g.det_rows - 1) / 2.0) * dv
    cosw = g.sod / np.sqrt(g.sod**2 + u[None, :] ** 2 + v[:, None] ** 2)
    q = _filter_rows(sino.values * cosw[None, :, :], du, spec) * du
    out = np.empty(out_shape, dtype=np.float64)
    _kernels.backproject_cone_voxel(
        np.ascontiguousarray(q), pixel_size, pz, sino.angles,
        g.det_rows, g.det_count, du, dv, g.sod, out,
    )
    out *= sino.geometry.angular_range / sino.n_views / 2.0
    return VoxelVolume(values=out, spacing=(pixel_size, pixel_size, pz), unit="HU")
