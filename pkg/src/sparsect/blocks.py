"""Block decomposition and dimensionality pipeline.

Volumes are zero-padded and tiled into overlapping cubes (default 64 with a
48-voxel unique core and 8-voxel margins). Reassembly is crop-to-core: each
output voxel comes from the core of exactly one block, so the round trip is
bit-exact and block margins can be corrupted freely by a model without
affecting the stitched result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .types import VoxelVolume

AXES = ("axial", "coronal", "sagittal")


class IncompleteBlockSetError(ValueError):
    """Reassembly was given fewer blocks than the grid requires."""


@dataclass(frozen=True)
class BlockGrid:
    """Deterministic tiling of a padded volume into overlapping blocks."""

    original_shape: tuple[int, int, int]
    block_size: int = 64
    margin: int = 8
    counts: tuple[int, int, int] = field(init=False)
    padded_shape: tuple[int, int, int] = field(init=False)

    def __post_init__(self):
        if self.block_size <= 2 * self.margin or self.margin < 0:
            raise ValueError(
                f"need block_size > 2*margin >= 0, got {self.block_size}, {self.margin}"
            )
        if min(self.original_shape) < 1:
            raise ValueError(f"degenerate volume shape {self.original_shape}")
        core = self.core_size
        counts = tuple(int(np.ceil(n / core)) for n in self.original_shape)
        padded = tuple(c * core + 2 * self.margin for c in counts)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "padded_shape", padded)

    @property
    def core_size(self) -> int:
        return self.block_size - 2 * self.margin

    @property
    def origin_offset(self) -> tuple[int, int, int]:
        # the original volume starts at `margin` in padded coordinates
        return (self.margin, self.margin, self.margin)

    @property
    def n_blocks(self) -> int:
        return int(np.prod(self.counts))

    def block_start(self, coords: tuple[int, int, int]) -> tuple[int, int, int]:
        """Padded-coordinate start of the block at grid coords (i, j, k)."""
        return tuple(c * self.core_size for c in coords)

    def block_coords(self) -> Iterator[tuple[int, int, int]]:
        for i in range(self.counts[0]):
            for j in range(self.counts[1]):
                for k in range(self.counts[2]):
                    yield (i, j, k)


@dataclass(frozen=True)
class Block:
    """One cube of the padded volume plus its grid position."""

    values: np.ndarray
    grid_coords: tuple[int, int, int]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        object.__setattr__(self, "values", v)
        if v.ndim != 3 or len(set(v.shape)) != 1:
            raise ValueError(f"block must be a cube, got {v.shape}")


def plan_grid(shape: tuple[int, int, int], block_size: int = 64, margin: int = 8) -> BlockGrid:
    return BlockGrid(original_shape=tuple(shape), block_size=block_size, margin=margin)


def _pad(values: np.ndarray, grid: BlockGrid) -> np.ndarray:
    pads = []
    for n, p in zip(values.shape, grid.padded_shape):
        pads.append((grid.margin, p - n - grid.margin))
    return np.pad(values, pads, mode="constant")


def decompose(vol: VoxelVolume, grid: BlockGrid, provenance: dict | None = None) -> Iterator[Block]:
    """Yield blocks at stride core_size; out-of-volume voxels are zero."""
    if vol.shape != grid.original_shape:
        raise ValueError(f"grid planned for {grid.original_shape}, volume is {vol.shape}")
    padded = _pad(vol.values, grid)
    b = grid.block_size
    prov = dict(provenance or {})
    for coords in grid.block_coords():
        x0, y0, z0 = grid.block_start(coords)
        yield Block(
            values=padded[x0:x0 + b, y0:y0 + b, z0:z0 + b].copy(),
            grid_coords=coords,
            provenance=prov,
        )


def reassemble(blocks: Iterable[Block], grid: BlockGrid,
               spacing: tuple[float, float, float] = (1.0, 1.0, 1.0),
               unit: str = "arbitrary") -> VoxelVolume:
    """Crop-to-core stitching; exact inverse of :func:`decompose`."""
    core = grid.core_size
    m = grid.margin
    out = np.zeros(tuple(c * core for c in grid.counts), dtype=np.float64)
    seen = set()
    for blk in blocks:
        if blk.values.shape[0] != grid.block_size:
            raise ValueError(
                f"block size {blk.values.shape[0]} does not match grid {grid.block_size}"
            )
        i, j, k = blk.grid_coords
        seen.add((i, j, k))
        out[i * core:(i + 1) * core,
            j * core:(j + 1) * core,
            k * core:(k + 1) * core] = blk.values[m:m + core, m:m + core, m:m + core]
    if len(seen) != grid.n_blocks:
        raise IncompleteBlockSetError(
            f"got {len(seen)} distinct blocks, grid needs {grid.n_blocks}"
        )
    nx, ny, nz = grid.original_shape
    return VoxelVolume(values=out[:nx, :ny, :nz], spacing=spacing, unit=unit)


def _center(n: int) -> int:
    return n // 2


def extract_25d(block: Block) -> np.ndarray:
    """Three orthogonal center cuts stacked as (size, size, 3).

    Channel 0 axial (constant z), 1 coronal (constant y), 2 sagittal
    (constant x); center index is floor(size / 2).
    """
    n = block.values.shape[0]
    c = _center(n)
    return np.stack(
        [block.values[:, :, c], block.values[:, c, :], block.values[c, :, :]], axis=-1
    )


def extract_directional_patch(block: Block, axis: str) -> np.ndarray:
    """Single center cut for one anatomical axis (same planes as extract_25d)."""
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return extract_25d(block)[..., AXES.index(axis)]


def extract_2d3ch(vol: VoxelVolume, z: int) -> np.ndarray:
    """Three neighboring axial slices stacked as (nx, ny, 3).

    Boundary slices are edge-replicated so every axial index yields a sample.
    """
    nz = vol.shape[2]
    if not 0 <= z < nz:
        raise ValueError(f"slice index {z} outside [0, {nz})")
    idx = [max(z - 1, 0), z, min(z + 1, nz - 1)]
    return np.stack([vol.values[:, :, i] for i in idx], axis=-1)
