"""Sparse-view CT data-engineering toolkit.

Simulates sparse-view scans under parallel/fan/cone beam geometries, builds
2D / 2D3ch / 2.5D / 3D training samples with artifact targets, reassembles
corrected volumes, and scores results with MSE/SSIM.
"""

from .blocks import (
    Block,
    BlockGrid,
    decompose,
    extract_25d,
    extract_2d3ch,
    extract_directional_patch,
    plan_grid,
    reassemble,
)
from .dataset_io import assign_splits, read_tensor, write_tensor
from .metrics import SsimParams, mse, score_case, ssim, volume_scores
from .phantom import EllipsoidSpec, default_phantom_specs, generate_phantom
from .projector import backproject, forward_project_cone, forward_project_slice
from .recon import FilterSpec, fbp_fan, fbp_parallel, fdk_cone, ramp_filter
from .simulate import (
    CaseBundle,
    apply_correction,
    residual_target,
    simulate_case,
    subsample_views,
    window_normalize,
)
from .types import (
    BeamGeometry,
    GeometryError,
    Sinogram,
    ViewSubset,
    VoxelVolume,
    WindowSpec,
    default_geometry,
    make_clinical_geometry,
    view_angles,
)

__version__ = "0.1.0"
