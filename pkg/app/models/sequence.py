"""
Discrete deflective sequences and subpixel results
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from app.core.exceptions import InvalidParameterError, NoEdgeContrastError
from app.models.base import RecordMixin
from app.models.image import Axis, EdgePixel

# Smallest side difference still treated as an edge
MIN_CONTRAST = 1e-9


class PointSource(str, Enum):
    CIS = "cis"
    SER = "ser"
    COMPLEMENT = "complement"


@dataclass(frozen=True)
class DDS:
    """
    Pixel sequence along the DD axis

    Sequence position i (1-based) covers the interval (i - 0.5, i + 0.5) and
    maps to image coordinate start_index + i - 1 along `axis`.
    """

    anchor: EdgePixel
    axis: Axis
    start_index: int
    intensities: np.ndarray
    k_u: int = 0
    k_d: int = 0

    def __post_init__(self):
        values = np.asarray(self.intensities, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise InvalidParameterError(f"DDS needs at least 2 pixels, got {values.size}")
        offset = self.anchor.along(self.axis) - self.start_index
        if not 0 <= offset < values.size:
            raise InvalidParameterError(
                f"Anchor ({self.anchor.x}, {self.anchor.y}) outside sequence "
                f"[{self.start_index}, {self.start_index + values.size - 1}]"
            )
        values.setflags(write=False)
        object.__setattr__(self, "intensities", values)

    @property
    def n(self) -> int:
        return int(self.intensities.size)

    @property
    def intensity_sum(self) -> float:
        return float(self.intensities.sum())

    @property
    def end_index(self) -> int:
        return self.start_index + self.n - 1


@dataclass(frozen=True)
class SidePair:
    """Smooth-side intensities at the low-index (g_a) and high-index (g_b) ends"""

    g_a: float
    g_b: float

    def __post_init__(self):
        if abs(self.g_a - self.g_b) < MIN_CONTRAST:
            raise NoEdgeContrastError(f"no edge contrast: g_a={self.g_a:.4f}, g_b={self.g_b:.4f}")

    def flipped(self) -> "SidePair":
        return SidePair(self.g_b, self.g_a)


@dataclass(frozen=True)
class CisSolution:
    """Edge offset c in sequence coordinates plus the clamp flag"""

    c: float
    clamped: bool = False


@dataclass(frozen=True)
class SubpixelPoint(RecordMixin):
    x: float
    y: float
    source: PointSource
    axis: Axis
    clamped: bool = False
