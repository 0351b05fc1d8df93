"""Forward projection and matched adjoint backprojection.

The forward operators march rays at a fixed step (half the pixel pitch) with
linear interpolation; :func:`backproject` is the exact transpose of the
forward discretization (same sample positions and weights, scatter instead of
gather), so ``<A x, y> == <x, A^T y>`` holds to floating-point rounding.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .types import BeamGeometry, GeometryError, Sinogram, VoxelVolume


def _check_fov(geometry: BeamGeometry, n_pixels: int, pixel_size: float, nz: int = 0,
               slice_size: float = 0.0) -> None:
    if geometry.kind == "parallel":
        return
    radius = 0.5 * pixel_size * n_pixels * np.sqrt(2.0)
    if nz:
        radius = np.hypot(radius, 0.5 * nz * slice_size)
    if radius >= geometry.sod:
        raise GeometryError(
            f"object radius {radius:.1f} mm exceeds source distance {geometry.sod:.1f} mm"
        )


def _step(pixel_size: float) -> float:
    return 0.5 * pixel_size


def forward_project_slice(
    slice_2d: np.ndarray,
    geometry: BeamGeometry,
    angles: np.ndarray,
    pixel_size: float = 1.0,
) -> Sinogram:
    """Project a square 2D slice under a parallel or fan geometry.

    Sinogram values are line integrals in (value x mm).
    """
    img = np.ascontiguousarray(slice_2d, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise ValueError(f"slice must be square 2D, got {img.shape}")
    if geometry.kind not in ("parallel", "fan"):
        raise ValueError(f"forward_project_slice needs parallel or fan, got {geometry.kind!r}")
    _check_fov(geometry, img.shape[0], pixel_size)
    angles = np.asarray(angles, dtype=np.float64)
    sino = np.empty((len(angles), geometry.det_count), dtype=np.float64)
    if geometry.kind == "parallel":
        _kernels.forward_parallel_2d(
            img, pixel_size, angles, geometry.det_count, geometry.det_spacing,
            _step(pixel_size), sino,
        )
    else:
        _kernels.forward_fan_2d(
            img, pixel_size, angles, geometry.det_count, geometry.det_spacing,
            geometry.sod, geometry.sdd, _step(pixel_size), sino,
        )
    return Sinogram(angles=angles, values=sino, geometry=geometry)


def forward_project_cone(
    volume: VoxelVolume,
    geometry: BeamGeometry,
    angles: np.ndarray,
) -> Sinogram:
    """Project a volume under a cone geometry to a views x rows x det sinogram."""
    if geometry.kind != "cone":
        raise ValueError(f"forward_project_cone needs cone geometry, got {geometry.kind!r}")
    vals = np.ascontiguousarray(volume.values, dtype=np.float64)
    nx, ny, nz = vals.shape
    if nx != ny:
        raise ValueError(f"volume must be square in-plane, got {vals.shape}")
    px, _, pz = volume.spacing
    _check_fov(geometry, nx, px, nz, pz)
    angles = np.asarray(angles, dtype=np.float64)
    sino = np.empty((len(angles), geometry.det_rows, geometry.det_count), dtype=np.float64)
    _kernels.forward_cone_3d(
        vals, px, pz, angles, geometry.det_rows, geometry.det_count,
        geometry.det_spacing, geometry.det_row_spacing,
        geometry.sod, geometry.sdd, _step(px), sino,
    )
    return Sinogram(angles=angles, values=sino, geometry=geometry)


def backproject(
    sino: Sinogram,
    volume_shape: tuple[int, ...],
    pixel_size: float = 1.0,
    slice_size: float | None = None,
):
    """Exact adjoint of the matching forward operator.

    Returns a 2D array for parallel/fan sinograms, a :class:`VoxelVolume`
    for cone. Intended for adjoint-based algorithms and operator tests; the
    analytic reconstructions in :mod:`sparsect.recon` use weighted
    pixel-driven backprojection instead.
    """
    geometry = sino.geometry
    if geometry.kind in ("parallel", "fan"):
        if len(volume_shape) != 2 or volume_shape[0] != volume_shape[1]:
            raise ValueError(f"expected square 2D shape, got {volume_shape}")
        img = np.zeros(volume_shape, dtype=np.float64)
        if geometry.kind == "parallel":
            _kernels.adjoint_parallel_2d(
                sino.values, pixel_size, sino.angles, geometry.det_count,
                geometry.det_spacing, _step(pixel_size), img,
            )
        else:
            _kernels.adjoint_fan_2d(
                sino.values, pixel_size, sino.angles, geometry.det_count,
                geometry.det_spacing, geometry.sod, geometry.sdd, _step(pixel_size), img,
            )
        return img
    if len(volume_shape) != 3 or volume_shape[0] != volume_shape[1]:
        raise ValueError(f"expected square-in-plane 3D shape, got {volume_shape}")
    pz = pixel_size if slice_size is None else slice_size
    vol = np.zeros(volume_shape, dtype=np.float64)
    _kernels.adjoint_cone_3d(
        sino.values, pixel_size, pz, sino.angles, geometry.det_rows,
        geometry.det_count, geometry.det_spacing, geometry.det_row_spacing,
        geometry.sod, geometry.sdd, _step(pixel_size), vol,
    )
    return VoxelVolume(values=vol, spacing=(pixel_size, pixel_size, pz), unit="HU")
