"""
Domain models module
"""

from app.models.base import RecordMixin
from app.models.image import Axis, ImageBuffer, GradientField, EdgePixel, EdgeMap, deflection_axis
from app.models.sequence import DDS, SidePair, CisSolution, SubpixelPoint, PointSource
from app.models.region import StableDDS, SER, SerSides, ConsistencyReport, DetectionResult
from app.models.complement import CandidateSet, GuideSequence, AdjustedSequence, AdjustMode
from app.models.bench import BenchRow, BenchReport

__all__ = [
    "RecordMixin",
    "Axis", "ImageBuffer", "GradientField", "EdgePixel", "EdgeMap", "deflection_axis",
    "DDS", "SidePair", "CisSolution", "SubpixelPoint", "PointSource",
    "StableDDS", "SER", "SerSides", "ConsistencyReport", "DetectionResult",
    "CandidateSet", "GuideSequence", "AdjustedSequence", "AdjustMode",
    "BenchRow", "BenchReport",
]
