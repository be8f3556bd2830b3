"""
Imaging Service Module

Sobel gradients and Canny-style pixel-level edge detection (pre-processing).
"""

import logging
import math

import numpy as np
from scipy import ndimage

from app.core.exceptions import ImageTooSmallError, InvalidParameterError
from app.models.image import EdgeMap, EdgePixel, GradientField, ImageBuffer, deflection_axis

logger = logging.getLogger(__name__)

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T.copy()

# Quantized gradient direction -> (dx, dy) of the forward neighbour (image y grows downward)
NMS_OFFSETS = {
    0: (1, 0),
    45: (1, 1),
    90: (0, 1),
    135: (-1, 1),
}


def sobel_gradients(img: ImageBuffer) -> GradientField:
    """
    Compute G_x, G_y with the 3x3 Sobel kernels and replicated borders

    Raises:
        ImageTooSmallError: If the image is smaller than 3x3
    """
    if img.width < 3 or img.height < 3:
        raise ImageTooSmallError(f"Sobel needs at least 3x3 pixels, got {img.width}x{img.height}")

    gx = ndimage.correlate(img.data, SOBEL_X, mode="nearest")
    gy = ndimage.correlate(img.data, SOBEL_Y, mode="nearest")
    magnitude = np.hypot(gx, gy)
    return GradientField(gx=gx, gy=gy, magnitude=magnitude)


def _quantize_directions(grad: GradientField) -> np.ndarray:
    angle = np.degrees(np.arctan2(grad.gy, grad.gx)) % 180.0
    bins = np.zeros(angle.shape, dtype=np.int16)
    bins[(angle >= 22.5) & (angle < 67.5)] = 45
    bins[(angle >= 67.5) & (angle < 112.5)] = 90
    bins[(angle >= 112.5) & (angle < 157.5)] = 135
    return bins


def _shifted(values: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """values[y + dy, x + dx] with zero outside the image"""
    height, width = values.shape
    out = np.zeros_like(values)
    ys = slice(max(0, -dy), height - max(0, dy))
    xs = slice(max(0, -dx), width - max(0, dx))
    ys_src = slice(max(0, dy), height - max(0, -dy))
    xs_src = slice(max(0, dx), width - max(0, -dx))
    out[ys, xs] = values[ys_src, xs_src]
    return out


def non_max_suppression(grad: GradientField) -> np.ndarray:
    """
    Keep pixels whose magnitude is a local maximum along the quantized direction

    A pixel survives when it is >= its backward neighbour and > its forward
    neighbour, so a plateau of two equal maxima keeps the higher-index pixel only.
    """
    magnitude = grad.magnitude
    bins = _quantize_directions(grad)
    keep = np.zeros(magnitude.shape, dtype=bool)
    for direction, (dx, dy) in NMS_OFFSETS.items():
        forward = _shifted(magnitude, dx, dy)
        backward = _shifted(magnitude, -dx, -dy)
        selected = bins == direction
        keep |= selected & (magnitude >= backward) & (magnitude > forward)
    return keep & (magnitude > 0)


def _hysteresis(candidates: np.ndarray, magnitude: np.ndarray, th_l: float, th_h: float) -> np.ndarray:
    weak = candidates & (magnitude >= th_l)
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        return weak
    strong_labels = np.unique(labels[weak & (magnitude >= th_h)])
    strong_labels = strong_labels[strong_labels > 0]
    return np.isin(labels, strong_labels)


def detect_edges(grad: GradientField, th_l: float = 80.0, th_h: float = 100.0, n_p: int = 7) -> EdgeMap:
    """
    Extract edge pixels via non-maximum suppression and hysteresis thresholds

    Args:
        grad: Sobel gradient field
        th_l: Low hysteresis threshold
        th_h: High hysteresis threshold
        n_p: DDS window length; pixels closer than ceil(n_p / 2) to the border are dropped

    Returns:
        EdgeMap with each pixel annotated by its discrete deflection
    """
    if not 0 <= th_l <= th_h:
        raise InvalidParameterError(f"Thresholds must satisfy 0 <= th_l <= th_h, got th_l={th_l}, th_h={th_h}")

    height, width = grad.shape
    margin = math.ceil(n_p / 2)
    kept = _hysteresis(non_max_suppression(grad), grad.magnitude, th_l, th_h)

    inner = np.zeros_like(kept)
    inner[margin:height - margin, margin:width - margin] = True
    ys, xs = np.nonzero(kept & inner)

    pixels = []
    for x, y in zip(xs.tolist(), ys.tolist()):
        gx, gy = grad.at(x, y)
        pixels.append(EdgePixel(x=x, y=y, dd=deflection_axis(gx, gy), gx=gx, gy=gy))

    logger.debug(f"Edge detection: th_l={th_l}, th_h={th_h}, edge_pixels={len(pixels)}")
    return EdgeMap(width=width, height=height, pixels=tuple(pixels))
