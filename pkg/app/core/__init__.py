"""
Core utilities module
"""

from app.core.exceptions import (
    SubpixError,
    ImageError,
    ImageNotFoundError,
    ImageFormatError,
    UnsupportedImageError,
    ImageTooSmallError,
    InvalidParameterError,
    WindowOverrunError,
    NoEdgeContrastError,
    SerEstimationError,
    InsufficientPointsError,
    DegenerateProfileError,
)

__all__ = [
    "SubpixError",
    "ImageError",
    "ImageNotFoundError",
    "ImageFormatError",
    "UnsupportedImageError",
    "ImageTooSmallError",
    "InvalidParameterError",
    "WindowOverrunError",
    "NoEdgeContrastError",
    "SerEstimationError",
    "InsufficientPointsError",
    "DegenerateProfileError",
]
