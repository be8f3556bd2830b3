from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SyntheticKind(str, Enum):
    CIRCLE = "circle"
    LINE = "line"
    SLANT = "slant"


class SyntheticSpec(BaseModel):
    """Parameters of one synthetic benchmark sample"""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: SyntheticKind
    k_g: int = Field(1, ge=1, alias="kG", description="Gaussian kernel size (odd)")
    snr: Optional[float] = Field(None, gt=0, description="Signal-to-noise ratio in dB; None disables noise")
    sigma_l: Optional[float] = Field(None, alias="sigmaL", description="Blur coefficient (line only)")
    location: Optional[float] = Field(None, alias="L", description="Edge offset from the vertical centre (line only)")
    slope: Optional[int] = Field(None, ge=1, description="Line slope (slant only)")
    seed: int = 0

    @field_validator("k_g")
    @classmethod
    def validate_kernel(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError(f"k_G must be odd, got {v}")
        return v

    @model_validator(mode="after")
    def validate_kind_fields(self):
        """Validate that the kind-specific fields are present and in range"""
        if self.kind is SyntheticKind.LINE:
            if self.sigma_l is None:
                raise ValueError("sigma_l is required for line samples")
            if not 1.0 <= self.sigma_l <= 2.25:
                raise ValueError(f"sigma_l must lie in [1, 2.25], got {self.sigma_l}")
            if self.location is None:
                raise ValueError("location (L) is required for line samples")
        if self.kind is SyntheticKind.SLANT and self.slope is None:
            raise ValueError("slope is required for slant samples")
        return self

    def with_seed(self, seed: int) -> "SyntheticSpec":
        return self.model_copy(update={"seed": seed})


class GroundTruth(BaseModel):
    """Analytic description shared by the generator and the metrics"""
    model_config = ConfigDict(frozen=True)

    kind: SyntheticKind
    center: Optional[Tuple[float, float]] = None
    radius: Optional[float] = None
    edge_location: Optional[float] = None
    lines: List[Tuple[float, float]] = Field(default_factory=list, description="(slope, intercept) of y = slope*x + intercept")
    line_spacing: Optional[float] = Field(None, description="Horizontal distance between neighbouring slant lines")

    def rows(self) -> List[Tuple[str, str, float]]:
        """Flatten to (kind, parameter, value) rows for the truth sidecar"""
        kind = self.kind.value
        rows: List[Tuple[str, str, float]] = []
        if self.center is not None:
            rows += [(kind, "center_x", self.center[0]), (kind, "center_y", self.center[1])]
        if self.radius is not None:
            rows.append((kind, "radius", self.radius))
        if self.edge_location is not None:
            rows.append((kind, "edge_location", self.edge_location))
        if self.line_spacing is not None:
            rows.append((kind, "line_spacing", self.line_spacing))
        for index, (slope, intercept) in enumerate(self.lines):
            rows += [(kind, f"line{index}_slope", slope), (kind, f"line{index}_intercept", intercept)]
        return rows
