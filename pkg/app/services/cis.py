"""
CIS Service Module

Converted Intensity Summation: closed-form subpixel edge offset within a
one-dimensional pixel sequence.
"""

import logging

import numpy as np

from app.core.exceptions import InvalidParameterError, NoEdgeContrastError, WindowOverrunError
from app.models.image import Axis, EdgePixel, ImageBuffer
from app.models.sequence import DDS, MIN_CONTRAST, CisSolution, PointSource, SidePair, SubpixelPoint

logger = logging.getLogger(__name__)


def build_dds(img: ImageBuffer, p: EdgePixel, n_p: int = 7) -> DDS:
    """
    Fixed-length window of n_p pixels centred on p along its DD

    Raises:
        InvalidParameterError: If n_p is even or below 3
        WindowOverrunError: If the window leaves the image
    """
    if n_p < 3 or n_p % 2 == 0:
        raise InvalidParameterError(f"n_p must be odd and >= 3, got {n_p}")

    start = p.along(p.dd) - n_p // 2
    if start < 0 or start + n_p > img.extent(p.dd):
        raise WindowOverrunError(
            f"DDS window [{start}, {start + n_p - 1}] at ({p.x}, {p.y}) leaves the image along {p.dd.value}"
        )
    return DDS(anchor=p, axis=p.dd, start_index=start, intensities=img.line(p.dd, p.x, p.y, start, n_p).copy())


def _flat_run(values: np.ndarray, flat_tol: float) -> np.ndarray:
    run = 1
    while run < values.size and abs(values[run] - values[run - 1]) <= flat_tol:
        run += 1
    return values[:run]


def estimate_plain_sides(dds: DDS, flat_tol: float = 5.0) -> SidePair:
    """
    Smooth-side intensities as the means of the flat runs at both ends

    Raises:
        InvalidParameterError: If the sequence is shorter than 3 pixels
        NoEdgeContrastError: If both runs average to the same intensity
    """
    if dds.n < 3:
        raise InvalidParameterError(f"Plain side estimation needs n >= 3, got {dds.n}")

    values = dds.intensities
    g_a = float(_flat_run(values, flat_tol).mean())
    g_b = float(_flat_run(values[::-1], flat_tol).mean())
    return SidePair(g_a=g_a, g_b=g_b)


def localize_cis(dds: DDS, sides: SidePair) -> CisSolution:
    """
    Solve I = (c - 0.5) * g_a + (n + 0.5 - c) * g_b for the edge offset c

    The result is clamped to [0.5, n + 0.5]; a clamp is reported on the solution.
    """
    contrast = sides.g_a - sides.g_b
    if abs(contrast) < MIN_CONTRAST:
        raise NoEdgeContrastError(f"no edge contrast: g_a={sides.g_a:.4f}, g_b={sides.g_b:.4f}")

    n = dds.n
    c = (dds.intensity_sum - n * sides.g_b) / contrast + 0.5
    clamped = not 0.5 <= c <= n + 0.5
    if clamped:
        c = min(max(c, 0.5), n + 0.5)
    return CisSolution(c=float(c), clamped=clamped)


def to_subpixel_point(
    p: EdgePixel,
    dds: DDS,
    c: float,
    source: PointSource = PointSource.CIS,
    clamped: bool = False,
) -> SubpixelPoint:
    """Map sequence offset c to image coordinates (position 1 is start_index)"""
    position = dds.start_index + (c - 1.0)
    if dds.axis is Axis.HORIZONTAL:
        return SubpixelPoint(x=float(position), y=float(p.y), source=source, axis=dds.axis, clamped=clamped)
    return SubpixelPoint(x=float(p.x), y=float(position), source=source, axis=dds.axis, clamped=clamped)


def localize_plain(img: ImageBuffer, p: EdgePixel, n_p: int = 7, flat_tol: float = 5.0) -> SubpixelPoint:
    """Plain CIS for one edge pixel: fixed window plus flat-run sides"""
    dds = build_dds(img, p, n_p)
    solution = localize_cis(dds, estimate_plain_sides(dds, flat_tol))
    return to_subpixel_point(p, dds, solution.c, PointSource.CIS, solution.clamped)
