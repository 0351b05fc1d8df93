"""Synthetic ellipsoid phantoms in Hounsfield units.

Phantoms are additive superpositions of (optionally rotated) ellipsoid
indicators over a -1000 HU air background, spanning air / soft tissue / bone
so a wide HU window is exercised across its range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import HU_AIR, VoxelVolume


@dataclass(frozen=True)
class EllipsoidSpec:
    """One additive ellipsoid: center and semi-axes in mm, in-plane rotation."""

    center: tuple[float, float, float]
    semi_axes: tuple[float, float, float]
    value: float
    rotation: float = 0.0

    def __post_init__(self):
        if any(a <= 0 for a in self.semi_axes):
            raise ValueError(f"semi-axes must be > 0, got {self.semi_axes}")


def generate_phantom(
    shape: tuple[int, int, int],
    spacing: tuple[float, float, float],
    specs: list[EllipsoidSpec],
    seed: int | None = None,
) -> VoxelVolume:
    """Rasterize ellipsoids onto a voxel grid (value sampled at voxel centers).

    ``seed`` is accepted for symmetry with randomized spec factories; the
    rasterization itself is deterministic.
    """
    if not specs:
        raise ValueError("need at least one ellipsoid spec")
    nx, ny, nz = shape
    sx, sy, sz = spacing
    x = (np.arange(nx) - (nx - 1) / 2) * sx
    y = (np.arange(ny) - (ny - 1) / 2) * sy
    z = (np.arange(nz) - (nz - 1) / 2) * sz
    X, Y, Z = np.meshgrid(x, y, z, indexing="ij")
    vol = np.full(shape, HU_AIR, dtype=np.float64)
    for e in specs:
        c, s = np.cos(e.rotation), np.sin(e.rotation)
        dx = X - e.center[0]
        dy = Y - e.center[1]
        dz = Z - e.center[2]
        xr = dx * c + dy * s
        yr = -dx * s + dy * c
        a, b, cc = e.semi_axes
        inside = (xr / a) ** 2 + (yr / b) ** 2 + (dz / cc) ** 2 <= 1.0
        vol[inside] += e.value
    return VoxelVolume(values=vol, spacing=spacing, unit="HU")


def default_phantom_specs(radius_mm: float) -> list[EllipsoidSpec]:
    """Water-like body with air and bone inclusions, scaled to ``radius_mm``."""
    r = radius_mm
    return [
        EllipsoidSpec(center=(0, 0, 0), semi_axes=(r, 0.85 * r, 10 * r), value=1000.0),
        EllipsoidSpec(center=(0.35 * r, 0.1 * r, 0), semi_axes=(0.25 * r, 0.18 * r, 10 * r),
                      value=-800.0, rotation=0.4),
        EllipsoidSpec(center=(-0.35 * r, 0.1 * r, 0), semi_axes=(0.25 * r, 0.18 * r, 10 * r),
                      value=-800.0, rotation=-0.4),
        EllipsoidSpec(center=(0, -0.45 * r, 0), semi_axes=(0.18 * r, 0.12 * r, 10 * r),
                      value=700.0),
        EllipsoidSpec(center=(0, 0.35 * r, 0), semi_axes=(0.08 * r, 0.08 * r, 10 * r),
                      value=300.0),
    ]


def random_phantom_specs(radius_mm: float, n_inclusions: int, seed: int) -> list[EllipsoidSpec]:
    """Random inclusions inside a water-like body; deterministic per seed."""
    rng = np.random.default_rng(seed)
    r = radius_mm
    specs = [EllipsoidSpec(center=(0, 0, 0), semi_axes=(r, 0.9 * r, 10 * r), value=1000.0)]
    for _ in range(n_inclusions):
        cx, cy = rng.uniform(-0.5 * r, 0.5 * r, size=2)
        cz = rng.uniform(-0.3 * r, 0.3 * r)
        axes = tuple(rng.uniform(0.05 * r, 0.25 * r, size=3))
        value = float(rng.choice([-800.0, 300.0, 700.0, 1200.0]))
        specs.append(EllipsoidSpec(center=(cx, cy, cz), semi_axes=axes, value=value,
                                   rotation=float(rng.uniform(0, np.pi))))
    return specs
