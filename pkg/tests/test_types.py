import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsect.types import (
    BeamGeometry,
    GeometryError,
    Sinogram,
    ViewSubset,
    VoxelVolume,
    WindowSpec,
    make_clinical_geometry,
    view_angles,
)


class TestVoxelVolume:
    def test_basic(self):
        v = VoxelVolume(values=np.zeros((4, 4, 4)), spacing=(1, 1, 2), unit="HU")
        assert v.shape == (4, 4, 4)

    def test_rejects_bad_spacing(self):
        with pytest.raises(ValueError):
            VoxelVolume(values=np.zeros((4, 4, 4)), spacing=(1, 0, 1))

    def test_normalized_range_enforced(self):
        with pytest.raises(ValueError):
            VoxelVolume(values=np.full((2, 2, 2), 1.5), unit="normalized")
        VoxelVolume(values=np.full((2, 2, 2), 0.5), unit="normalized")

    def test_rejects_unknown_unit(self):
        with pytest.raises(ValueError):
            VoxelVolume(values=np.zeros((2, 2, 2)), unit="bogus")

    def test_values_read_only(self):
        v = VoxelVolume(values=np.zeros((2, 2, 2)))
        with pytest.raises(ValueError):
            v.values[0, 0, 0] = 1


class TestBeamGeometry:
    def test_fan_requires_sod_below_sdd(self):
        with pytest.raises(GeometryError):
            BeamGeometry(kind="fan", det_count=8, det_spacing=1.0, sod=1000, sdd=500)

    def test_parallel_magnification_is_one(self):
        g = BeamGeometry(kind="parallel", det_count=8, det_spacing=1.0)
        assert g.magnification == 1.0

    def test_rejects_bad_kind(self):
        with pytest.raises(ValueError):
            BeamGeometry(kind="helical", det_count=8, det_spacing=1.0)


class TestMakeClinicalGeometry:
    def test_fan_clinical_distances(self):
        g = make_clinical_geometry("fan", 1024, 1.2)
        assert g.sod == 570.0 and g.sdd == 1040.0
        assert g.angular_range == pytest.approx(2 * np.pi)

    def test_parallel_half_turn(self):
        g = make_clinical_geometry("parallel", 736, 1.0)
        assert g.magnification == 1.0
        assert g.angular_range == pytest.approx(np.pi)

    def test_cone_row_defaults(self):
        g = make_clinical_geometry("cone", 1024, 1.2)
        assert g.angular_range == pytest.approx(2 * np.pi)
        assert g.det_rows == 1024
        assert g.det_row_spacing == 1.2

    def test_rejects_invalid_kind(self):
        with pytest.raises(ValueError):
            make_clinical_geometry("spiral", 64, 1.0)


class TestSinogram:
    def test_angle_count_must_match(self):
        g = make_clinical_geometry("parallel", 8, 1.0)
        with pytest.raises(ValueError):
            Sinogram(angles=np.linspace(0, 1, 5), values=np.zeros((4, 8)), geometry=g)

    def test_angles_strictly_increasing(self):
        g = make_clinical_geometry("parallel", 8, 1.0)
        with pytest.raises(ValueError):
            Sinogram(angles=np.array([0.0, 0.5, 0.5]), values=np.zeros((3, 8)), geometry=g)

    def test_cone_shape(self):
        g = make_clinical_geometry("cone", 8, 1.0, det_rows=4, det_row_spacing=1.0)
        s = Sinogram(angles=np.array([0.0, 1.0]), values=np.zeros((2, 4, 8)), geometry=g)
        assert s.n_views == 2


class TestViewSubset:
    @pytest.mark.parametrize("kept", [32, 64, 128, 2048])
    def test_stride_2048(self, kept):
        sub = ViewSubset(total_views=2048, kept_views=kept)
        assert sub.stride == 2048 // kept
        assert np.array_equal(sub.indices, np.arange(0, 2048, 2048 // kept))

    def test_non_divisor_rejected(self):
        with pytest.raises(ValueError):
            ViewSubset(total_views=2048, kept_views=100)

    @given(st.sampled_from([1, 2, 4, 8, 16, 32]), st.integers(1, 6))
    def test_arithmetic_progression(self, kept, mult):
        total = kept * mult
        sub = ViewSubset(total_views=total, kept_views=kept)
        assert len(sub.indices) == kept
        assert np.all(np.diff(sub.indices) == sub.stride)
        assert sub.indices[0] == 0


class TestWindowSpec:
    def test_bounds(self):
        w = WindowSpec(width=2048, level=0)
        assert w.lo == -1024 and w.hi == 1024

    def test_rejects_nonpositive_width(self):
        with pytest.raises(ValueError):
            WindowSpec(width=0, level=0)


def test_view_angles_half_open():
    g = make_clinical_geometry("parallel", 8, 1.0)
    a = view_angles(g, 4)
    assert a[0] == 0.0
    assert a[-1] < np.pi
    assert np.allclose(np.diff(a), np.pi / 4)
