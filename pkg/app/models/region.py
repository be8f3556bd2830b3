"""
Stable DDS, stable edge regions and consistency statistics
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from app.models.base import RecordMixin
from app.models.image import Axis, EdgeMap, EdgePixel
from app.models.sequence import DDS, SubpixelPoint


@dataclass(frozen=True)
class StableDDS:
    """A DDS grown pixel by pixel from its anchor until both ends reached a smooth side"""

    dds: DDS
    m_k: float
    theta_k: float

    @property
    def k_u(self) -> int:
        return self.dds.k_u

    @property
    def k_d(self) -> int:
        return self.dds.k_d

    @property
    def k(self) -> int:
        return max(self.k_u, self.k_d)

    @property
    def n(self) -> int:
        return self.dds.n


@dataclass(frozen=True)
class SerSides:
    """Robust side intensities of a stable region (g_a_s is the brighter side)"""

    g_a_s: float
    g_b_s: float
    d_0: float


@dataclass
class SER:
    """Stable edge region: tangentially adjacent DDSs of a common length"""

    members: List[DDS]
    axis: Axis
    theta: float = 0.0
    sides: Optional[SerSides] = None

    @property
    def length(self) -> int:
        """Common DDS length L"""
        return self.members[0].n

    @property
    def anchors(self) -> List[EdgePixel]:
        return [member.anchor for member in self.members]

    @property
    def endpoints(self) -> Tuple[EdgePixel, EdgePixel]:
        return self.members[0].anchor, self.members[-1].anchor

    @property
    def g_a_s(self) -> Optional[float]:
        return self.sides.g_a_s if self.sides else None

    @property
    def g_b_s(self) -> Optional[float]:
        return self.sides.g_b_s if self.sides else None

    @property
    def d_0(self) -> Optional[float]:
        return self.sides.d_0 if self.sides else None

    def pixel_values(self) -> np.ndarray:
        """Multiset of all member intensities"""
        return np.concatenate([member.intensities for member in self.members])

    def __repr__(self):
        return f"<SER(axis={self.axis.value}, members={len(self.members)}, L={self.length})>"


@dataclass(frozen=True)
class ConsistencyReport(RecordMixin):
    edge_class: str
    total_edge_pixels: int
    regions: int
    passing: int
    ratio: float
    no_regions: bool = field(default=False)


@dataclass
class DetectionResult:
    """Output of one localization run over an image"""

    method: str
    edges: EdgeMap
    points: List[SubpixelPoint] = field(default_factory=list)
    sers: List[SER] = field(default_factory=list)
    skipped: int = 0

    @property
    def edge_pixels(self) -> int:
        return len(self.edges)
