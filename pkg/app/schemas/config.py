import math
from enum import Enum
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings


class Method(str, Enum):
    CIS = "cis"
    CIS_SER = "cis+ser"


class SerThresholds(BaseModel):
    """Stability thresholds for stable DDS growth and tangent expansion"""
    model_config = ConfigDict(frozen=True)

    th_m: float = Field(5.0, gt=0, description="Mean-drift threshold (gray levels)")
    th_theta: float = Field(math.pi / 40, gt=0, description="Derivative-angle threshold (radians)")
    th_ev: float = Field(10.0, gt=0, description="Endmost-variation threshold (gray levels)")
    th_r: float = Field(0.1, gt=0, description="Relative-mean threshold")
    th_plateau: float = Field(0.5, ge=0, description="End variation that marks a reached plateau (gray levels)")
    plateau_max: int = Field(3, ge=0, description="Extra pixels a side may grow into its plateau")
    k_max: int = Field(20, gt=0, description="Hard cap on expansions per side")
    stability_reduce: Literal["min", "max"] = "min"

    @classmethod
    def from_settings(cls) -> "SerThresholds":
        return cls(
            th_m=settings.th_m,
            th_theta=settings.th_theta,
            th_ev=settings.th_ev,
            th_r=settings.th_r,
            th_plateau=settings.th_plateau,
            plateau_max=settings.plateau_max,
            k_max=settings.k_max,
            stability_reduce=settings.stability_reduce,
        )


class DetectionConfig(BaseModel):
    """All thresholds used by the localization pipeline"""
    model_config = ConfigDict(frozen=True)

    th_l: float = Field(80.0, ge=0)
    th_h: float = Field(100.0, ge=0)
    n_p: int = Field(7, ge=3)
    flat_tol: float = Field(5.0, ge=0)
    th_c: float = Field(10.0, gt=0)
    drop_clamped: bool = True
    spread: Literal["std", "variance"] = "std"
    pair_limit: int = Field(1_000_000, gt=0)
    subsample_size: int = Field(1000, gt=0)
    workers: int = Field(1, ge=1)
    ser: SerThresholds = SerThresholds()

    @field_validator("n_p")
    @classmethod
    def validate_window(cls, v: int) -> int:
        """Window length must be odd so the anchor sits in the middle"""
        if v % 2 == 0:
            raise ValueError(f"n_p must be odd, got {v}")
        return v

    @model_validator(mode="after")
    def validate_thresholds(self):
        if self.th_l > self.th_h:
            raise ValueError(f"th_l ({self.th_l}) must not exceed th_h ({self.th_h})")
        return self

    @property
    def margin(self) -> int:
        return math.ceil(self.n_p / 2)

    @classmethod
    def from_settings(cls, **overrides) -> "DetectionConfig":
        values = dict(
            th_l=settings.th_l,
            th_h=settings.th_h,
            n_p=settings.n_p,
            flat_tol=settings.flat_tol,
            th_c=settings.th_c,
            drop_clamped=settings.drop_clamped,
            spread=settings.spread,
            pair_limit=settings.pair_limit,
            subsample_size=settings.subsample_size,
            workers=settings.workers,
            ser=SerThresholds.from_settings(),
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


class RunConfig(BaseModel):
    """Command-line run: thresholds, method, I/O paths and seed"""

    detection: DetectionConfig = DetectionConfig()
    method: Method = Method.CIS
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    overlay_path: Optional[Path] = None
    complement: bool = True
    seed: int = 0
