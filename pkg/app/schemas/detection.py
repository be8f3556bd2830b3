from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class PointResponse(BaseModel):
    """Schema for one subpixel point"""
    model_config = ConfigDict(from_attributes=True)

    x: float
    y: float
    source: str
    axis: str
    clamped: bool = False


class DetectResponse(BaseModel):
    """Schema for the detect endpoint with camelCase support"""
    model_config = ConfigDict(populate_by_name=True)

    method: str
    width: int
    height: int
    edge_pixels: int = Field(..., alias="edgePixels")
    regions: int
    points: List[PointResponse]


class ConsistencyResponse(BaseModel):
    """Schema for the stats endpoint with camelCase support"""
    model_config = ConfigDict(populate_by_name=True, from_attributes=True)

    edge_class: str = Field(..., alias="edgeClass")
    total_edge_pixels: int = Field(..., alias="totalEdgePixels")
    regions: int
    passing: int
    ratio: float
    no_regions: bool = Field(False, alias="noRegions")
    detail: Optional[str] = None
