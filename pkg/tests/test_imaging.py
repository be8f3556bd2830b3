"""
Sobel gradient and edge pixel detection tests
"""

import numpy as np
import pytest

from app.core.exceptions import ImageTooSmallError, InvalidParameterError
from app.models.image import Axis, ImageBuffer, deflection_axis
from app.schemas.synthetic import SyntheticKind, SyntheticSpec
from app.services.imaging import detect_edges, non_max_suppression, sobel_gradients
from app.services.synthgen import gen_circle
from tests.conftest import column_image, row_image


@pytest.mark.imaging
class TestSobelGradients:
    """Test Sobel derivative computation"""

    def test_constant_image_has_no_gradient(self):
        """Test that a flat image yields zero derivatives everywhere"""
        grad = sobel_gradients(ImageBuffer(np.full((9, 9), 128.0)))

        assert not grad.gx.any()
        assert not grad.gy.any()
        assert not grad.magnitude.any()

    def test_step_derivative(self, step_image):
        """Test that the falling step gives -4 * contrast on both sides of the boundary"""
        grad = sobel_gradients(step_image)

        assert grad.at(14, 10) == (-600.0, 0.0)
        assert grad.at(15, 10) == (-600.0, 0.0)
        assert grad.at(5, 10) == (0.0, 0.0)

    def test_replicated_border(self, step_image):
        """Test that border rows see the same derivative as interior rows"""
        grad = sobel_gradients(step_image)

        np.testing.assert_array_equal(grad.gx[0], grad.gx[10])

    def test_too_small(self):
        """Test that images below 3x3 are rejected"""
        with pytest.raises(ImageTooSmallError):
            sobel_gradients(ImageBuffer(np.zeros((2, 5))))


@pytest.mark.imaging
class TestDeflection:
    """Test discrete deflection assignment"""

    def test_horizontal_gradient(self):
        assert deflection_axis(10.0, 3.0) is Axis.HORIZONTAL

    def test_vertical_gradient(self):
        assert deflection_axis(-1.0, -8.0) is Axis.VERTICAL

    def test_diagonal_tie_goes_vertical(self):
        """Test that |G_x| == |G_y| resolves to vertical"""
        assert deflection_axis(3.0, -3.0) is Axis.VERTICAL


@pytest.mark.imaging
class TestEdgeDetection:
    """Test non-maximum suppression, hysteresis and the border margin"""

    def test_step_gives_single_column(self, step_image):
        """Test that a plateau of equal maxima keeps only the higher-index column"""
        edges = detect_edges(sobel_gradients(step_image))

        assert {p.x for p in edges} == {15}
        assert [p.y for p in edges] == list(range(4, 16))
        assert all(p.dd is Axis.HORIZONTAL for p in edges)

    def test_horizontal_edge_is_vertical_deflection(self):
        """Test that a row step produces a row of vertically deflected pixels"""
        image = row_image([50.0] * 10 + [200.0] * 10, width=20)
        edges = detect_edges(sobel_gradients(image))

        assert {p.y for p in edges} == {10}
        assert all(p.dd is Axis.VERTICAL for p in edges)

    def test_non_max_suppression_thins_blurred_edge(self):
        """Test that a three-pixel ramp keeps only its steepest column"""
        image = column_image([200.0] * 8 + [180.0, 125.0, 70.0] + [50.0] * 9, height=12)
        keep = non_max_suppression(sobel_gradients(image))

        assert np.flatnonzero(keep[6]).tolist() == [9]

    def test_weak_edge_dropped(self):
        """Test that an edge between the thresholds without a strong neighbour is dropped"""
        image = column_image([100.0] * 10 + [122.0] * 10, height=20)

        assert len(detect_edges(sobel_gradients(image))) == 0

    def test_weak_pixels_kept_when_connected(self):
        """Test that weak pixels connected to a strong one survive hysteresis"""
        data = np.tile(np.array([100.0] * 10 + [122.0] * 10), (20, 1))
        data[10:, 10:] = 150.0
        edges = detect_edges(sobel_gradients(ImageBuffer(data)))

        column = sorted(p.y for p in edges if p.x == 10)
        assert 5 in column and 14 in column

    def test_margin_excludes_border_edges(self):
        """Test that edges closer than ceil(n_p / 2) to the border are dropped"""
        image = column_image([200.0] * 2 + [50.0] * 18, height=20)

        assert len(detect_edges(sobel_gradients(image), n_p=7)) == 0
        assert {p.x for p in detect_edges(sobel_gradients(image), n_p=3)} == {2}

    def test_invalid_thresholds(self, step_image):
        """Test that th_l above th_h is rejected"""
        with pytest.raises(InvalidParameterError):
            detect_edges(sobel_gradients(step_image), th_l=120.0, th_h=100.0)

    def test_row_major_order(self, step_image):
        """Test that edge pixels iterate top to bottom"""
        ys = [p.y for p in detect_edges(sobel_gradients(step_image))]

        assert ys == sorted(ys)

    def test_edge_count_non_increasing_in_th_h(self):
        """Test that raising the high threshold never adds edge pixels"""
        image, _ = gen_circle(SyntheticSpec(kind=SyntheticKind.CIRCLE, k_g=7, snr=60.0, seed=2))
        grad = sobel_gradients(image)
        counts = [len(detect_edges(grad, th_l=80.0, th_h=th_h)) for th_h in (80.0, 100.0, 200.0, 400.0, 800.0)]

        assert counts == sorted(counts, reverse=True)
        assert counts[0] > counts[-1]

    def test_diagonal_edge_is_vertical_deflection(self):
        """Test that a 45 degree step (|G_x| == |G_y|) is assigned the vertical deflection"""
        xs, ys = np.meshgrid(np.arange(30), np.arange(30))
        image = ImageBuffer(np.where(xs + ys < 30, 200.0, 50.0))
        grad = sobel_gradients(image)
        edges = detect_edges(grad)

        assert len(edges) > 0
        assert all(abs(p.gx) == abs(p.gy) for p in edges)
        assert all(p.dd is Axis.VERTICAL for p in edges)
