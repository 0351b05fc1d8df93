"""Shared domain types: volumes, beam geometries, sinograms, windows, view subsets.

Conventions used throughout the package:

* Volumes are indexed ``values[ix, iy, iz]`` with physical coordinates centered
  on the rotation axis: ``x = (ix - (nx - 1) / 2) * sx`` (mm), likewise y and z.
* Axial planes are constant-z, coronal constant-y, sagittal constant-x.
* Angles are radians; view angles are evenly spaced starting at 0 and never
  include the endpoint of the angular range.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CLINICAL_SOD_MM = 570.0
CLINICAL_SDD_MM = 1040.0

VALID_KINDS = ("parallel", "fan", "cone")
VALID_UNITS = ("HU", "normalized", "residual", "arbitrary")

HU_AIR = -1000.0


class GeometryError(ValueError):
    """Scan geometry is inconsistent or the object exceeds the field of view."""


@dataclass(frozen=True)
class VoxelVolume:
    """3D scalar field with voxel spacing in mm.

    ``unit`` tracks whether values are Hounsfield units, normalized [0, 1]
    intensities, or a residual (difference of two normalized volumes,
    range [-1, 1]).
    """

    values: np.ndarray
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    unit: str = "HU"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 3 or min(vals.shape) < 1:
            raise ValueError(f"volume must be 3D with positive extents, got {vals.shape}")
        if len(self.spacing) != 3 or any(s <= 0 for s in self.spacing):
            raise ValueError(f"spacing components must be > 0, got {self.spacing}")
        if self.unit not in VALID_UNITS:
            raise ValueError(f"unit must be one of {VALID_UNITS}, got {self.unit!r}")
        if self.unit == "normalized":
            if vals.min() < -1e-9 or vals.max() > 1 + 1e-9:
                raise ValueError("normalized volume has values outside [0, 1]")
        if self.unit == "residual":
            if vals.min() < -1 - 1e-9 or vals.max() > 1 + 1e-9:
                raise ValueError("residual volume has values outside [-1, 1]")
        vals.flags.writeable = False

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def axial(self, iz: int) -> np.ndarray:
        return self.values[:, :, iz]


@dataclass(frozen=True)
class BeamGeometry:
    """Acquisition geometry: beam kind, source distances, flat detector layout."""

    kind: str
    det_count: int
    det_spacing: float
    sod: float = 0.0
    sdd: float = 0.0
    det_rows: int = 1
    det_row_spacing: float = 0.0
    angular_range: float = np.pi

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(f"kind must be one of {VALID_KINDS}, got {self.kind!r}")
        if self.det_count < 1:
            raise ValueError("det_count must be >= 1")
        if self.det_spacing <= 0:
            raise ValueError("det_spacing must be > 0")
        if self.kind in ("fan", "cone"):
            if not (0 < self.sod < self.sdd):
                raise GeometryError(
                    f"fan/cone require 0 < sod < sdd, got sod={self.sod}, sdd={self.sdd}"
                )
        if self.kind == "cone":
            if self.det_rows < 1 or self.det_row_spacing <= 0:
                raise ValueError("cone geometry needs det_rows >= 1 and det_row_spacing > 0")

    @property
    def magnification(self) -> float:
        if self.kind == "parallel":
            return 1.0
        return self.sdd / self.sod


@dataclass(frozen=True)
class Sinogram:
    """Projection data: views x detector elements (x detector rows for cone)."""

    angles: np.ndarray
    values: np.ndarray
    geometry: BeamGeometry

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=np.float64)
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "values", vals)
        if angles.ndim != 1 or len(angles) != vals.shape[0]:
            raise ValueError("angle count must equal first dimension of values")
        if len(angles) > 1 and np.any(np.diff(angles) <= 0):
            raise ValueError("angles must be strictly increasing")
        if angles.size and (angles[0] < 0 or angles[-1] >= self.geometry.angular_range + 1e-12):
            raise ValueError("angles must lie within [0, angular_range)")
        if self.geometry.kind == "cone":
            expected = (self.geometry.det_rows, self.geometry.det_count)
            if vals.shape[1:] != expected:
                raise ValueError(f"cone sinogram must be views x {expected}, got {vals.shape}")
        else:
            if vals.ndim != 2 or vals.shape[1] != self.geometry.det_count:
                raise ValueError(
                    f"sinogram must be views x {self.geometry.det_count}, got {vals.shape}"
                )
        angles.flags.writeable = False
        vals.flags.writeable = False

    @property
    def n_views(self) -> int:
        return len(self.angles)


@dataclass(frozen=True)
class WindowSpec:
    """HU display window: clip to [level - width/2, level + width/2]."""

    width: float = 2048.0
    level: float = 0.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("window width must be > 0")

    @property
    def lo(self) -> float:
        return self.level - self.width / 2

    @property
    def hi(self) -> float:
        return self.level + self.width / 2


@dataclass(frozen=True)
class ViewSubset:
    """Uniform-stride, phase-0 subset of a full view set."""

    total_views: int
    kept_views: int
    indices: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.kept_views < 1 or self.total_views < 1:
            raise ValueError("view counts must be >= 1")
        if self.total_views % self.kept_views != 0:
            raise ValueError(
                f"kept_views ({self.kept_views}) must divide total_views ({self.total_views})"
            )
        stride = self.total_views // self.kept_views
        idx = np.arange(0, self.total_views, stride)
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)

    @property
    def stride(self) -> int:
        return self.total_views // self.kept_views


def view_angles(geometry: BeamGeometry, n_views: int) -> np.ndarray:
    """Evenly spaced view angles over the geometry's angular range, first at 0."""
    return np.linspace(0.0, geometry.angular_range, n_views, endpoint=False)


def make_clinical_geometry(
    kind: str,
    det_count: int,
    det_spacing: float,
    det_rows: int | None = None,
    det_row_spacing: float | None = None,
) -> BeamGeometry:
    """Geometry with the clinical SOD/SDD (570/1040 mm) for fan and cone beams.

    Parallel scans cover [0, pi), fan/cone a full turn [0, 2*pi). For cone,
    ``det_rows`` defaults to ``det_count`` (square detector) and
    ``det_row_spacing`` to ``det_spacing``; size the rows to the scanned
    volume with :func:`cone_rows_for_volume` when the volume is known.
    """
    if kind not in VALID_KINDS:
        raise ValueError(f"kind must be one of {VALID_KINDS}, got {kind!r}")
    if det_count < 1:
        raise ValueError("det_count must be >= 1")
    if kind == "parallel":
        return BeamGeometry(
            kind="parallel",
            det_count=det_count,
            det_spacing=det_spacing,
            angular_range=np.pi,
        )
    if kind == "fan":
        return BeamGeometry(
            kind="fan",
            det_count=det_count,
            det_spacing=det_spacing,
            sod=CLINICAL_SOD_MM,
            sdd=CLINICAL_SDD_MM,
            angular_range=2 * np.pi,
        )
    return BeamGeometry(
        kind="cone",
        det_count=det_count,
        det_spacing=det_spacing,
        sod=CLINICAL_SOD_MM,
        sdd=CLINICAL_SDD_MM,
        det_rows=det_rows if det_rows is not None else det_count,
        det_row_spacing=det_row_spacing if det_row_spacing is not None else det_spacing,
        angular_range=2 * np.pi,
    )


def default_geometry(
    kind: str,
    n_pixels: int = 512,
    pixel_mm: float = 1.0,
    nz: int | None = None,
    slice_mm: float | None = None,
) -> BeamGeometry:
    """Untruncated default detector sizing for an ``n_pixels`` square image.

    Parallel: 736 elements at the voxel pitch (covers the 512*sqrt(2) diagonal).
    Fan/cone: 736 elements at pitch x magnification. Cone rows cover the
    volume height x magnification.
    """
    det_count = max(736, int(np.ceil(n_pixels * np.sqrt(2))) + 8)
    if kind == "parallel":
        return make_clinical_geometry("parallel", det_count, pixel_mm)
    mag = CLINICAL_SDD_MM / CLINICAL_SOD_MM
    if kind == "fan":
        return make_clinical_geometry("fan", det_count, pixel_mm * mag)
    if nz is None:
        raise ValueError("cone geometry needs the volume slice count nz")
    slice_mm = pixel_mm if slice_mm is None else slice_mm
    # rows cover the magnified volume height plus a small guard band
    det_rows = int(np.ceil(nz * mag)) + 8
    return make_clinical_geometry(
        "cone", det_count, pixel_mm * mag, det_rows=det_rows, det_row_spacing=slice_mm * mag
    )
