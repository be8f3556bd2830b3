"""
Pydantic schemas module
"""

from app.schemas.config import Method, SerThresholds, DetectionConfig, RunConfig
from app.schemas.synthetic import SyntheticKind, SyntheticSpec, GroundTruth
from app.schemas.detection import PointResponse, DetectResponse, ConsistencyResponse

__all__ = [
    "Method", "SerThresholds", "DetectionConfig", "RunConfig",
    "SyntheticKind", "SyntheticSpec", "GroundTruth",
    "PointResponse", "DetectResponse", "ConsistencyResponse",
]
