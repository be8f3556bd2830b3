"""
Converted intensity summation tests
"""

import numpy as np
import pytest

from app.core.exceptions import InvalidParameterError, NoEdgeContrastError, WindowOverrunError
from app.models.image import Axis, EdgePixel, ImageBuffer
from app.models.sequence import DDS, PointSource, SidePair
from app.services.cis import build_dds, estimate_plain_sides, localize_cis, localize_plain, to_subpixel_point
from app.utils.profiles import erf_pixels, step_pixels


def make_dds(values, start: int = 0, axis: Axis = Axis.HORIZONTAL) -> DDS:
    """Sequence anchored at its first pixel"""
    anchor = EdgePixel(x=start, y=0, dd=axis) if axis is Axis.HORIZONTAL else EdgePixel(x=0, y=start, dd=axis)
    return DDS(anchor=anchor, axis=axis, start_index=start, intensities=np.asarray(values, dtype=np.float64))


@pytest.mark.cis
class TestBuildDds:
    """Test fixed-window sequence extraction"""

    def test_window_sum(self):
        """Test that a three-pixel window sums its intensities"""
        data = np.zeros((20, 20))
        data[10, 9:12] = [50.0, 120.0, 200.0]
        dds = build_dds(ImageBuffer(data), EdgePixel(x=10, y=10, dd=Axis.HORIZONTAL), n_p=3)

        assert dds.start_index == 9
        assert dds.intensity_sum == 370.0

    def test_constant_image(self):
        """Test that a constant window sums to n times the value"""
        image = ImageBuffer(np.full((20, 20), 128.0))
        dds = build_dds(image, EdgePixel(x=10, y=10, dd=Axis.VERTICAL), n_p=7)

        assert dds.intensity_sum == 896.0
        assert dds.axis is Axis.VERTICAL

    def test_window_overrun(self):
        """Test that a window leaving the image raises WindowOverrunError"""
        image = ImageBuffer(np.full((20, 20), 128.0))

        with pytest.raises(WindowOverrunError):
            build_dds(image, EdgePixel(x=1, y=10, dd=Axis.HORIZONTAL), n_p=7)

    @pytest.mark.parametrize("n_p", [2, 4, 1])
    def test_invalid_window_length(self, n_p):
        """Test that even or too short windows are rejected"""
        image = ImageBuffer(np.full((20, 20), 128.0))

        with pytest.raises(InvalidParameterError):
            build_dds(image, EdgePixel(x=10, y=10, dd=Axis.HORIZONTAL), n_p=n_p)

    def test_anchor_must_lie_inside(self):
        """Test that a sequence not containing its anchor is rejected"""
        with pytest.raises(InvalidParameterError):
            DDS(anchor=EdgePixel(x=20, y=0, dd=Axis.HORIZONTAL), axis=Axis.HORIZONTAL,
                start_index=0, intensities=np.ones(5))


@pytest.mark.cis
class TestPlainSides:
    """Test flat-run side estimation"""

    def test_symmetric_step(self):
        sides = estimate_plain_sides(make_dds([200, 200, 200, 125, 50, 50, 50]))

        assert (sides.g_a, sides.g_b) == (200.0, 50.0)

    def test_noisy_run(self):
        """Test that the run absorbs small variations up to the tolerance"""
        sides = estimate_plain_sides(make_dds([198, 202, 200, 125, 52, 48, 50]), flat_tol=5.0)

        assert (sides.g_a, sides.g_b) == (200.0, 50.0)

    def test_single_pixel_runs(self):
        """Test that a ramp without flat ends uses the end pixels"""
        sides = estimate_plain_sides(make_dds([100, 120, 140, 160]), flat_tol=5.0)

        assert (sides.g_a, sides.g_b) == (100.0, 160.0)

    def test_flat_sequence(self):
        with pytest.raises(NoEdgeContrastError):
            estimate_plain_sides(make_dds([80, 80, 80, 80, 80]))

    def test_short_sequence(self):
        with pytest.raises(InvalidParameterError):
            estimate_plain_sides(make_dds([200, 50]))


@pytest.mark.cis
class TestLocalizeCis:
    """Test the closed-form edge offset"""

    def test_two_pixel_step(self):
        """Test that the boundary between two pixels lies at c = 1.5"""
        solution = localize_cis(make_dds([200, 50]), SidePair(200.0, 50.0))

        assert solution.c == pytest.approx(1.5)
        assert not solution.clamped

    def test_symmetric_seven(self):
        solution = localize_cis(make_dds([200, 200, 200, 125, 50, 50, 50]), SidePair(200.0, 50.0))

        assert solution.c == pytest.approx(4.0)

    def test_erf_profile(self):
        """Test that an integral-sampled erf edge at 4.3 is recovered with exact sides"""
        values = erf_pixels(np.arange(1, 10), location=4.3, sigma=0.8, low=200.0, difference=-150.0)
        solution = localize_cis(make_dds(values), SidePair(200.0, 50.0))

        assert solution.c == pytest.approx(4.3, abs=1e-3)

    def test_ideal_step_exact(self):
        """Test that CIS is exact for integral-sampled ideal steps"""
        rng = np.random.default_rng(7)
        for location in rng.uniform(1.0, 7.0, size=200):
            values = step_pixels(np.arange(1, 8), location, 200.0, 50.0)
            solution = localize_cis(make_dds(values), SidePair(200.0, 50.0))
            assert solution.c == pytest.approx(location, abs=1e-9)

    def test_affine_invariance(self):
        """Test that scaling and shifting intensities and sides leaves c unchanged"""
        values = erf_pixels(np.arange(1, 10), location=4.3, sigma=0.8, low=200.0, difference=-150.0)
        base = localize_cis(make_dds(values), SidePair(200.0, 50.0)).c
        scaled = localize_cis(make_dds(2.0 * values - 30.0), SidePair(370.0, 70.0)).c

        assert scaled == pytest.approx(base, abs=1e-9)

    def test_reflection(self):
        """Test that reversing the sequence and swapping sides mirrors c"""
        values = np.array([200.0, 200.0, 170.0, 90.0, 50.0, 50.0, 50.0])
        sides = SidePair(200.0, 50.0)
        forward = localize_cis(make_dds(values), sides).c
        backward = localize_cis(make_dds(values[::-1]), sides.flipped()).c

        assert backward == pytest.approx(values.size + 1 - forward, abs=1e-9)

    def test_reconstructs_intensity_sum(self):
        """Test that the solved offset reproduces I within float tolerance"""
        values = np.array([201.0, 199.0, 180.0, 110.0, 60.0, 49.0, 51.0])
        sides = SidePair(200.0, 50.0)
        c = localize_cis(make_dds(values), sides).c

        rebuilt = (c - 0.5) * sides.g_a + (values.size + 0.5 - c) * sides.g_b
        assert rebuilt == pytest.approx(values.sum(), rel=1e-9)

    def test_clamped(self):
        """Test that offsets outside [0.5, n + 0.5] are clamped and flagged"""
        solution = localize_cis(make_dds([200, 200, 200]), SidePair(100.0, 50.0))

        assert solution.c == 3.5
        assert solution.clamped

    def test_equal_sides(self):
        """Test that equal sides cannot form a SidePair"""
        with pytest.raises(NoEdgeContrastError):
            SidePair(120.0, 120.0)


@pytest.mark.cis
class TestSubpixelMapping:
    """Test sequence offset to image coordinate mapping"""

    def test_horizontal(self):
        """Test that c = 4 over a window starting at x = 7 maps to x = 10"""
        p = EdgePixel(x=10, y=12, dd=Axis.HORIZONTAL)
        dds = DDS(anchor=p, axis=Axis.HORIZONTAL, start_index=7, intensities=np.ones(7))
        point = to_subpixel_point(p, dds, 4.0)

        assert (point.x, point.y) == (10.0, 12.0)
        assert point.source is PointSource.CIS

    def test_vertical(self):
        p = EdgePixel(x=3, y=9, dd=Axis.VERTICAL)
        dds = DDS(anchor=p, axis=Axis.VERTICAL, start_index=6, intensities=np.ones(7))
        point = to_subpixel_point(p, dds, 3.25, PointSource.SER)

        assert (point.x, point.y) == (3.0, 8.25)
        assert point.source is PointSource.SER

    def test_localize_plain_on_step(self, step_image):
        """Test that the step boundary between x = 14 and x = 15 maps to x = 14.5"""
        point = localize_plain(step_image, EdgePixel(x=15, y=10, dd=Axis.HORIZONTAL))

        assert point.x == pytest.approx(14.5)
        assert point.y == 10.0
