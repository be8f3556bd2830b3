"""
Edge complement types: candidate set, guide sequence and adjusted sequence
"""

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Tuple

import numpy as np

from app.models.image import Axis

Pixel = Tuple[int, int]


class AdjustMode(str, Enum):
    INDEPENDENT = "independent"
    INHERIT_SER = "inherit_ser"
    DISCARDED = "discarded"


@dataclass(frozen=True)
class CandidateSet:
    """Edge pixels not claimed by any stable region"""

    pixels: FrozenSet[Pixel]

    def __contains__(self, key: Pixel) -> bool:
        return key in self.pixels

    def __len__(self) -> int:
        return len(self.pixels)


@dataclass(frozen=True)
class GuideSequence:
    """Five connected cells A..E ahead of the current pixel for one of the eight chain directions"""

    center: Pixel
    direction: int
    cells: Tuple[Pixel, Pixel, Pixel, Pixel, Pixel]

    @property
    def a(self) -> Pixel:
        return self.cells[0]

    @property
    def b(self) -> Pixel:
        return self.cells[1]

    @property
    def c(self) -> Pixel:
        return self.cells[2]

    @property
    def d(self) -> Pixel:
        return self.cells[3]

    @property
    def e(self) -> Pixel:
        return self.cells[4]


@dataclass(frozen=True)
class AdjustedSequence:
    center: Pixel
    axis: Axis
    start_index: int
    intensities: np.ndarray
    g_a: float
    g_b: float
    mode: AdjustMode
    d_c: float = 0.0
    m_c: float = 0.0
