"""End-to-end sparse-view simulation.

Pipeline per case: forward project to a 2048-view sinogram, reconstruct the
full-view reference, subsample to 32/64/128 views and reconstruct each,
window/normalize everything, and form residual targets. Parallel and fan
geometries run slice by slice; cone projects and reconstructs the whole
volume.

Sign convention: ``CaseBundle.residual`` stores the ground-truth difference
full - sparse; the training target persisted for the network is
the artifact sparse - full, and correction is ``sparse - prediction``, so an
exact prediction recovers the full-view volume identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .projector import forward_project_cone, forward_project_slice
from .recon import FilterSpec, fbp_fan, fbp_parallel, fdk_cone
from .types import (
    HU_AIR,
    BeamGeometry,
    Sinogram,
    ViewSubset,
    VoxelVolume,
    WindowSpec,
    default_geometry,
    view_angles,
)

DEFAULT_SPARSE_VIEWS = (32, 64, 128)
DEFAULT_FULL_VIEWS = 2048


@dataclass(frozen=True)
class CaseBundle:
    """Full- and sparse-view reconstructions of one case, plus residuals."""

    full: VoxelVolume
    sparse: dict[int, VoxelVolume]
    residual: dict[int, VoxelVolume]
    geometry_kind: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.full.unit != "normalized":
            raise ValueError("bundle volumes must be normalized")
        for v, vol in self.sparse.items():
            if vol.unit != "normalized":
                raise ValueError("bundle volumes must be normalized")
            if not np.array_equal(self.residual[v].values,
                                  self.full.values - vol.values):
                raise ValueError(f"residual[{v}] != full - sparse[{v}]")


def subsample_views(sino: Sinogram, kept: int) -> Sinogram:
    """Keep every (total/kept)-th view starting at view 0."""
    subset = ViewSubset(total_views=sino.n_views, kept_views=kept)
    return Sinogram(
        angles=sino.angles[subset.indices],
        values=sino.values[subset.indices],
        geometry=sino.geometry,
    )


def window_normalize_array(values: np.ndarray, window: WindowSpec) -> np.ndarray:
    """Clip to the HU window and map affinely to [0, 1]."""
    return (np.clip(values, window.lo, window.hi) - window.lo) / window.width


def window_normalize(vol: VoxelVolume, window: WindowSpec) -> VoxelVolume:
    if vol.unit != "HU":
        raise ValueError(f"window_normalize expects an HU volume, got unit {vol.unit!r}")
    return VoxelVolume(
        values=window_normalize_array(vol.values, window),
        spacing=vol.spacing,
        unit="normalized",
    )


def residual_target(full: VoxelVolume, sparse: VoxelVolume) -> VoxelVolume:
    """Ground-truth difference full - sparse (range [-1, 1])."""
    if full.unit != "normalized" or sparse.unit != "normalized":
        raise ValueError("residual_target expects normalized volumes")
    if full.shape != sparse.shape:
        raise ValueError(f"shape mismatch: {full.shape} vs {sparse.shape}")
    return VoxelVolume(values=full.values - sparse.values, spacing=full.spacing,
                       unit="residual")


def apply_correction(sparse: VoxelVolume, predicted_artifact: VoxelVolume) -> VoxelVolume:
    """Corrected volume = sparse - predicted artifact (artifact = sparse - full)."""
    if sparse.shape != predicted_artifact.shape:
        raise ValueError(f"shape mismatch: {sparse.shape} vs {predicted_artifact.shape}")
    corrected = sparse.values - predicted_artifact.values
    # unconstrained range until clipped for reporting
    return VoxelVolume(values=corrected, spacing=sparse.spacing, unit="arbitrary")


def clip_normalized(vol: VoxelVolume) -> VoxelVolume:
    """Clip to [0, 1] for metric reporting."""
    return VoxelVolume(values=np.clip(vol.values, 0.0, 1.0), spacing=vol.spacing,
                       unit="normalized")


def simulate_case(
    vol: VoxelVolume,
    kind: str,
    window: WindowSpec = WindowSpec(),
    geometry: BeamGeometry | None = None,
    sparse_views: tuple[int, ...] = DEFAULT_SPARSE_VIEWS,
    full_views: int = DEFAULT_FULL_VIEWS,
    filter_spec: FilterSpec = FilterSpec(),
    provenance: dict | None = None,
) -> CaseBundle:
    """Run the whole simulation pipeline on an HU volume."""
    if vol.unit != "HU":
        raise ValueError("simulate_case expects an HU volume")
    nx, ny, nz = vol.shape
    if nx != ny:
        raise ValueError(f"volume must be square in-plane, got {vol.shape}")
    px, _, pz = vol.spacing
    if geometry is None:
        geometry = default_geometry(kind, n_pixels=nx, pixel_mm=px, nz=nz, slice_mm=pz)
    if geometry.kind != kind:
        raise ValueError(f"geometry kind {geometry.kind!r} does not match {kind!r}")
    levels = sorted(set(sparse_views))
    if any(full_views % v for v in levels):
        raise ValueError(f"sparse view counts {levels} must divide {full_views}")

    # project attenuation above air so the region outside the grid reads as air
    mu = vol.values - HU_AIR
    angles = view_angles(geometry, full_views)

    recon_full = np.empty_like(vol.values)
    recon_sparse = {v: np.empty_like(vol.values) for v in levels}

    if kind in ("parallel", "fan"):
        fbp = fbp_parallel if kind == "parallel" else fbp_fan
        for iz in range(nz):
            sino = forward_project_slice(mu[:, :, iz], geometry, angles, pixel_size=px)
            recon_full[:, :, iz] = fbp(sino, (nx, ny), filter_spec, pixel_size=px)
            for v in levels:
                sub = subsample_views(sino, v)
                recon_sparse[v][:, :, iz] = fbp(sub, (nx, ny), filter_spec, pixel_size=px)
    else:
        mu_vol = VoxelVolume(values=mu, spacing=vol.spacing, unit="HU")
        sino = forward_project_cone(mu_vol, geometry, angles)
        recon_full[:] = fdk_cone(sino, vol.shape, filter_spec, pixel_size=px,
                                 slice_size=pz).values
        for v in levels:
            sub = subsample_views(sino, v)
            recon_sparse[v][:] = fdk_cone(sub, vol.shape, filter_spec, pixel_size=px,
                                          slice_size=pz).values

    def to_normalized(values: np.ndarray) -> VoxelVolume:
        hu = VoxelVolume(values=values + HU_AIR, spacing=vol.spacing, unit="HU")
        return window_normalize(hu, window)

    full_n = to_normalized(recon_full)
    sparse_n = {v: to_normalized(recon_sparse[v]) for v in levels}
    residuals = {v: residual_target(full_n, sparse_n[v]) for v in levels}
    prov = dict(provenance or {})
    prov.setdefault("window", {"width": window.width, "level": window.level})
    return CaseBundle(full=full_n, sparse=sparse_n, residual=residuals,
                      geometry_kind=kind, provenance=prov)
