"""
Synthgen Service Module

Synthetic circle, line and slant benchmark images with exact ground truth.
"""

import logging
import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import ndimage

from app.config import settings
from app.core.exceptions import InvalidParameterError
from app.models.image import ImageBuffer
from app.schemas.synthetic import GroundTruth, SyntheticKind, SyntheticSpec
from app.utils.pgm import quantize as quantize_image
from app.utils.profiles import erf_pixels

logger = logging.getLogger(__name__)

LOW_INTENSITY = 50.0
HIGH_INTENSITY = 200.0
NOISE_REFERENCE = HIGH_INTENSITY - LOW_INTENSITY

CIRCLE_SIZE = 221
CIRCLE_CENTER = (110.0, 110.0)
CIRCLE_RADIUS = 80.0

LINE_WIDTH = 200
LINE_HEIGHT = 40

SLANT_SIZE = 221
SLANT_PIVOT_Y = 110.0
SLANT_OFFSETS = tuple(range(10, 201, 10))
SLANT_SPACING = 10.0


def gaussian_kernel(k_g: int, sigma_ratio: float = None) -> np.ndarray:
    """Normalized 1-D Gaussian of k_g taps with sigma = k_g * sigma_ratio"""
    if k_g < 1 or k_g % 2 == 0:
        raise InvalidParameterError(f"k_G must be odd and >= 1, got {k_g}")
    sigma_ratio = settings.blur_sigma_ratio if sigma_ratio is None else sigma_ratio
    if k_g == 1:
        return np.ones(1)
    sigma = k_g * sigma_ratio
    offsets = np.arange(k_g) - k_g // 2
    weights = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    return weights / weights.sum()


def gaussian_blur(img: ImageBuffer, k_g: int, sigma_ratio: float = None) -> ImageBuffer:
    """Separable k_G x k_G Gaussian blur with replicated borders"""
    kernel = gaussian_kernel(k_g, sigma_ratio)
    if kernel.size == 1:
        return img
    data = ndimage.correlate1d(img.data, kernel, axis=0, mode="nearest")
    data = ndimage.correlate1d(data, kernel, axis=1, mode="nearest")
    return ImageBuffer(data)


def noise_sigma(snr: Optional[float], k_n: float = NOISE_REFERENCE) -> float:
    """sigma_n from SNR = 20 * log10(k_n / sigma_n)"""
    if snr is None or math.isinf(snr):
        return 0.0
    if snr <= 0 or k_n <= 0:
        raise InvalidParameterError(f"SNR and k_n must be positive, got snr={snr}, k_n={k_n}")
    return k_n * 10.0 ** (-snr / 20.0)


def add_gaussian_noise(img: ImageBuffer, snr: Optional[float], k_n: float = NOISE_REFERENCE, seed: int = 0) -> ImageBuffer:
    """Add zero-mean i.i.d. Gaussian noise calibrated to the SNR; no clamping"""
    sigma = noise_sigma(snr, k_n)
    if sigma == 0.0:
        return img
    rng = np.random.default_rng(seed)
    return ImageBuffer(img.data + rng.normal(0.0, sigma, size=img.data.shape))


def _subpixel_offsets(samples: int) -> np.ndarray:
    return (np.arange(samples) + 0.5) / samples - 0.5


def _finish(data: np.ndarray, spec: SyntheticSpec, quantize: Optional[bool]) -> ImageBuffer:
    quantize = settings.quantize if quantize is None else quantize
    image = add_gaussian_noise(gaussian_blur(ImageBuffer(data), spec.k_g), spec.snr, NOISE_REFERENCE, spec.seed)
    if quantize:
        return ImageBuffer(quantize_image(image).astype(np.float64))
    return ImageBuffer(np.clip(image.data, 0.0, 255.0))


def gen_circle(spec: SyntheticSpec, area_samples: int = None, quantize: bool = None) -> Tuple[ImageBuffer, GroundTruth]:
    """221x221 disc of radius 80 (200 inside, 50 outside), area-sampled then blurred and noised"""
    area_samples = area_samples or settings.area_samples
    cx, cy = CIRCLE_CENTER
    ys, xs = np.mgrid[0:CIRCLE_SIZE, 0:CIRCLE_SIZE].astype(np.float64)
    distance = np.hypot(xs - cx, ys - cy)
    coverage = (distance < CIRCLE_RADIUS).astype(np.float64)

    # Only pixels the boundary can cross need subsampling
    border = np.abs(distance - CIRCLE_RADIUS) <= 0.75
    offsets = _subpixel_offsets(area_samples)
    sub_y, sub_x = np.meshgrid(offsets, offsets, indexing="ij")
    bx = xs[border][:, None, None] + sub_x[None]
    by = ys[border][:, None, None] + sub_y[None]
    inside = np.hypot(bx - cx, by - cy) < CIRCLE_RADIUS
    coverage[border] = inside.mean(axis=(1, 2))

    data = LOW_INTENSITY + NOISE_REFERENCE * coverage
    truth = GroundTruth(kind=SyntheticKind.CIRCLE, center=CIRCLE_CENTER, radius=CIRCLE_RADIUS)
    return _finish(data, spec, quantize), truth


def gen_line(spec: SyntheticSpec, tolerance: float = None, quantize: bool = None) -> Tuple[ImageBuffer, GroundTruth]:
    """200x40 horizontal erf edge at y = 20 + L (50 above, 200 below)"""
    tolerance = settings.quad_tolerance if tolerance is None else tolerance
    location = LINE_HEIGHT / 2 + spec.location
    profile = erf_pixels(
        np.arange(LINE_HEIGHT, dtype=np.float64),
        location=location,
        sigma=spec.sigma_l,
        low=LOW_INTENSITY,
        difference=NOISE_REFERENCE,
        tolerance=tolerance,
    )
    data = np.repeat(profile[:, None], LINE_WIDTH, axis=1)
    # The erf profile is the blur; only noise and export follow
    image = add_gaussian_noise(ImageBuffer(data), spec.snr, NOISE_REFERENCE, spec.seed)
    quantize = settings.quantize if quantize is None else quantize
    if quantize:
        image = ImageBuffer(quantize_image(image).astype(np.float64))
    else:
        image = ImageBuffer(np.clip(image.data, 0.0, 255.0))
    return image, GroundTruth(kind=SyntheticKind.LINE, edge_location=location)


def _lines_below(xs: np.ndarray, ys: np.ndarray, slope: int) -> np.ndarray:
    """Number of slant lines y = 110 + slope * (x - x_j) strictly above each point"""
    u = xs - (ys - SLANT_PIVOT_Y) / slope
    offsets = np.asarray(SLANT_OFFSETS, dtype=np.float64)
    return (offsets[None, :] > u.reshape(-1, 1)).sum(axis=1).reshape(u.shape)


def gen_slant(spec: SyntheticSpec, area_samples: int = None, quantize: bool = None) -> Tuple[ImageBuffer, GroundTruth]:
    """
    Parallel slant boundaries through (x_j, 110), x_j = 10..200 step 10

    A point is bright when it lies below an odd number of lines.
    """
    area_samples = area_samples or settings.area_samples
    slope = spec.slope
    offsets = _subpixel_offsets(area_samples)
    sub_y, sub_x = np.meshgrid(offsets, offsets, indexing="ij")
    columns = np.arange(SLANT_SIZE, dtype=np.float64)

    coverage = np.empty((SLANT_SIZE, SLANT_SIZE))
    for y in range(SLANT_SIZE):
        px = columns[:, None, None] + sub_x[None]
        py = y + sub_y[None].repeat(SLANT_SIZE, axis=0)
        bright = _lines_below(px, py, slope) % 2 == 1
        coverage[y] = bright.mean(axis=(1, 2))

    data = LOW_INTENSITY + NOISE_REFERENCE * coverage
    lines = [(float(slope), SLANT_PIVOT_Y - slope * x_j) for x_j in SLANT_OFFSETS]
    truth = GroundTruth(kind=SyntheticKind.SLANT, lines=lines, line_spacing=SLANT_SPACING)
    return _finish(data, spec, quantize), truth


GENERATORS: Dict[SyntheticKind, Callable[..., Tuple[ImageBuffer, GroundTruth]]] = {
    SyntheticKind.CIRCLE: gen_circle,
    SyntheticKind.LINE: gen_line,
    SyntheticKind.SLANT: gen_slant,
}


def generate(spec: SyntheticSpec, **options) -> Tuple[ImageBuffer, GroundTruth]:
    """Generate one sample of any kind"""
    image, truth = GENERATORS[spec.kind](spec, **options)
    logger.debug(
        f"Generated sample: kind={spec.kind.value}, k_g={spec.k_g}, snr={spec.snr}, "
        f"sigma_l={spec.sigma_l}, location={spec.location}, slope={spec.slope}, seed={spec.seed}"
    )
    return image, truth
