"""
Image containers: intensity grid, gradient field and pixel-level edge map
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from app.core.exceptions import ImageError


class Axis(str, Enum):
    """Discrete deflection: the image axis a pixel sequence runs along"""
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"

    @property
    def orthogonal(self) -> "Axis":
        return Axis.VERTICAL if self is Axis.HORIZONTAL else Axis.HORIZONTAL


@dataclass(frozen=True)
class ImageBuffer:
    """Dense grid of real-valued intensities, stored as a (height, width) float array"""

    data: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.data, dtype=np.float64)
        if array.ndim != 2:
            raise ImageError(f"Image data must be 2-D, got {array.ndim} dimensions")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise ImageError(f"Image must be at least 1x1, got {array.shape[1]}x{array.shape[0]}")
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @classmethod
    def from_sequence(cls, width: int, height: int, values) -> "ImageBuffer":
        """Build an image from a row-major sequence of intensities"""
        flat = np.asarray(values, dtype=np.float64).ravel()
        if flat.size != width * height:
            raise ImageError(
                f"Data length {flat.size} does not match {width}x{height}={width * height}"
            )
        return cls(flat.reshape(height, width))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def value(self, x: int, y: int) -> float:
        return float(self.data[y, x])

    def line(self, axis: Axis, x: int, y: int, start: int, length: int) -> np.ndarray:
        """Intensities of `length` pixels along `axis` through (x, y), starting at coordinate `start`"""
        if axis is Axis.HORIZONTAL:
            return self.data[y, start:start + length]
        return self.data[start:start + length, x]

    def extent(self, axis: Axis) -> int:
        return self.width if axis is Axis.HORIZONTAL else self.height

    def __repr__(self):
        return f"<ImageBuffer(width={self.width}, height={self.height})>"


@dataclass(frozen=True)
class GradientField:
    """Per-pixel Sobel derivatives and Euclidean magnitude"""

    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.gx.shape

    def at(self, x: int, y: int) -> Tuple[float, float]:
        return float(self.gx[y, x]), float(self.gy[y, x])

    def line_sums(self, axis: Axis, x: int, y: int, start: int, length: int) -> Tuple[float, float]:
        """Summed (G_x, G_y) over a sequence window"""
        if axis is Axis.HORIZONTAL:
            window = np.s_[y, start:start + length]
        else:
            window = np.s_[start:start + length, x]
        return float(self.gx[window].sum()), float(self.gy[window].sum())


def deflection_axis(gx: float, gy: float) -> Axis:
    """Axis closest to the gradient direction; ties go to vertical"""
    return Axis.VERTICAL if abs(gy) >= abs(gx) else Axis.HORIZONTAL


@dataclass(frozen=True)
class EdgePixel:
    """Pixel-level edge location annotated with its discrete deflection"""

    x: int
    y: int
    dd: Axis
    gx: float = 0.0
    gy: float = 0.0

    @property
    def key(self) -> Tuple[int, int]:
        return self.x, self.y

    def along(self, axis: Axis) -> int:
        """Coordinate of the pixel along the given axis"""
        return self.x if axis is Axis.HORIZONTAL else self.y


@dataclass(frozen=True)
class EdgeMap:
    """The set of edge pixels of one image, iterated in row-major order"""

    width: int
    height: int
    pixels: Tuple[EdgePixel, ...] = ()
    _index: Dict[Tuple[int, int], EdgePixel] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.pixels, key=lambda p: (p.y, p.x)))
        object.__setattr__(self, "pixels", ordered)
        object.__setattr__(self, "_index", {p.key: p for p in ordered})

    def __len__(self) -> int:
        return len(self.pixels)

    def __iter__(self) -> Iterator[EdgePixel]:
        return iter(self.pixels)

    def __contains__(self, key: Tuple[int, int]) -> bool:
        return key in self._index

    def get(self, x: int, y: int) -> Optional[EdgePixel]:
        return self._index.get((x, y))

    def keys(self):
        return self._index.keys()
