"""
Synthetic dataset generator tests
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.exceptions import InvalidParameterError
from app.models.image import ImageBuffer
from app.schemas.synthetic import SyntheticKind, SyntheticSpec
from app.services.synthgen import (
    SLANT_SPACING, add_gaussian_noise, gaussian_blur, gaussian_kernel, gen_circle, gen_line, gen_slant, generate,
    noise_sigma,
)


@pytest.mark.synthgen
class TestGaussianBlur:
    """Test the k_G x k_G Gaussian blur"""

    def test_identity_kernel(self, step_image):
        """Test that k_G = 1 leaves the image unchanged"""
        assert gaussian_blur(step_image, 1) is step_image

    def test_constant_image_preserved(self):
        image = ImageBuffer(np.full((15, 15), 77.0))

        np.testing.assert_allclose(gaussian_blur(image, 5).data, 77.0, rtol=1e-12)

    def test_impulse_response(self):
        """Test that the impulse centre keeps the squared central tap"""
        data = np.zeros((9, 9))
        data[4, 4] = 1.0
        blurred = gaussian_blur(ImageBuffer(data), 3)

        center = 1.0 / (1.0 + 2.0 * math.exp(-2.0))
        assert blurred.data[4, 4] == pytest.approx(center ** 2, abs=1e-12)
        assert blurred.data.sum() == pytest.approx(1.0, abs=1e-12)

    def test_kernel_normalized(self):
        assert gaussian_kernel(9).sum() == pytest.approx(1.0)

    def test_even_kernel(self):
        with pytest.raises(InvalidParameterError):
            gaussian_kernel(4)


@pytest.mark.synthgen
class TestNoise:
    """Test SNR-calibrated Gaussian noise"""

    def test_sigma_at_80_db(self):
        assert noise_sigma(80.0) == pytest.approx(0.015)

    def test_sigma_at_70_db(self):
        assert noise_sigma(70.0) == pytest.approx(0.0474, abs=1e-4)

    def test_no_noise(self):
        assert noise_sigma(None) == 0.0
        assert noise_sigma(math.inf) == 0.0

    def test_invalid_snr(self):
        with pytest.raises(InvalidParameterError):
            noise_sigma(-3.0)

    def test_empirical_sigma(self):
        """Test that the empirical noise deviation matches within 5%"""
        image = ImageBuffer(np.full((221, 221), 100.0))
        noisy = add_gaussian_noise(image, snr=40.0, seed=11)

        assert np.std(noisy.data - image.data) == pytest.approx(1.5, rel=0.05)

    def test_seeded(self):
        image = ImageBuffer(np.full((20, 20), 100.0))

        first = add_gaussian_noise(image, 40.0, seed=5).data
        second = add_gaussian_noise(image, 40.0, seed=5).data
        other = add_gaussian_noise(image, 40.0, seed=6).data
        np.testing.assert_array_equal(first, second)
        assert not np.array_equal(first, other)


@pytest.mark.synthgen
class TestCircle:
    """Test the disc benchmark image"""

    def test_geometry(self):
        image, truth = gen_circle(SyntheticSpec(kind=SyntheticKind.CIRCLE), quantize=False)

        assert (image.width, image.height) == (221, 221)
        assert image.value(110, 110) == 200.0
        assert image.value(0, 0) == 50.0
        assert truth.center == (110.0, 110.0)
        assert truth.radius == 80.0

    def test_boundary_pixel_is_half_covered(self):
        """Test that a pixel centred on the circle holds about the mid intensity"""
        image, _ = gen_circle(SyntheticSpec(kind=SyntheticKind.CIRCLE), quantize=False)

        assert image.value(190, 110) == pytest.approx(125.0, abs=2.0)

    def test_quantized_by_default(self):
        image, _ = generate(SyntheticSpec(kind=SyntheticKind.CIRCLE, k_g=3, snr=80.0))

        np.testing.assert_array_equal(image.data, np.rint(image.data))

    def test_deterministic(self):
        spec = SyntheticSpec(kind=SyntheticKind.CIRCLE, k_g=5, snr=90.0, seed=3)

        np.testing.assert_array_equal(generate(spec)[0].data, generate(spec)[0].data)


@pytest.mark.synthgen
class TestLine:
    """Test the horizontal erf line image"""

    def test_profile(self):
        spec = SyntheticSpec(kind=SyntheticKind.LINE, sigma_l=1.0, location=0.0)
        image, truth = gen_line(spec, quantize=False)

        assert (image.width, image.height) == (200, 40)
        assert truth.edge_location == 20.0
        assert image.value(50, 0) == pytest.approx(50.0, abs=1e-3)
        assert image.value(50, 39) == pytest.approx(200.0, abs=1e-3)
        assert image.value(50, 20) == pytest.approx(125.0, abs=1e-4)

    def test_offset_location(self):
        spec = SyntheticSpec(kind=SyntheticKind.LINE, sigma_l=1.5, location=-0.3)
        image, truth = gen_line(spec, quantize=False)

        assert truth.edge_location == pytest.approx(19.7)
        assert image.value(0, 20) > 125.0 > image.value(0, 19)

    def test_rows_identical_without_noise(self):
        image, _ = gen_line(SyntheticSpec(kind=SyntheticKind.LINE, sigma_l=2.0, location=0.4), quantize=False)

        np.testing.assert_array_equal(image.data[:, 0], image.data[:, 199])


@pytest.mark.synthgen
class TestSlant:
    """Test the parallel slant line image"""

    def test_bands(self):
        """Test that band parity decides the plateau intensity"""
        image, truth = gen_slant(SyntheticSpec(kind=SyntheticKind.SLANT, slope=1), quantize=False)

        assert (image.width, image.height) == (221, 221)
        assert len(truth.lines) == 20
        assert image.value(5, 200) == 50.0
        assert image.value(15, 110) == 200.0

    @pytest.mark.parametrize("slope,spacing", [(1, 10.0 / math.sqrt(2.0)), (10, 100.0 / math.sqrt(101.0))])
    def test_normal_spacing(self, slope, spacing):
        """Test the perpendicular distance between neighbouring truth lines"""
        _, truth = gen_slant(SyntheticSpec(kind=SyntheticKind.SLANT, slope=slope), area_samples=2, quantize=False)
        (s, b0), (_, b1) = truth.lines[0], truth.lines[1]

        assert abs(b1 - b0) / math.sqrt(s * s + 1.0) == pytest.approx(spacing)
        assert truth.line_spacing == SLANT_SPACING


@pytest.mark.synthgen
class TestSyntheticSpec:
    """Test sample parameter validation"""

    def test_camel_case_alias(self):
        spec = SyntheticSpec.model_validate({"kind": "line", "kG": 3, "sigmaL": 1.25, "L": 0.2})

        assert (spec.k_g, spec.sigma_l, spec.location) == (3, 1.25, 0.2)

    def test_even_kernel(self):
        with pytest.raises(ValidationError):
            SyntheticSpec(kind=SyntheticKind.CIRCLE, k_g=4)

    def test_line_requires_sigma(self):
        with pytest.raises(ValidationError):
            SyntheticSpec(kind=SyntheticKind.LINE, location=0.0)

    def test_line_sigma_range(self):
        with pytest.raises(ValidationError):
            SyntheticSpec(kind=SyntheticKind.LINE, sigma_l=3.0, location=0.0)

    def test_slant_requires_slope(self):
        with pytest.raises(ValidationError):
            SyntheticSpec(kind=SyntheticKind.SLANT)
