"""
Common dependencies for API endpoints
"""

import logging

from fastapi import Depends, File, HTTPException, UploadFile, status

from app.core.exceptions import ImageFormatError
from app.models.image import ImageBuffer
from app.schemas.config import DetectionConfig
from app.services.pipeline import LocalizationService
from app.utils.pgm import decode_pgm

logger = logging.getLogger(__name__)


def get_detection_config() -> DetectionConfig:
    """Thresholds from the environment-backed settings"""
    return DetectionConfig.from_settings()


def get_localization_service(config: DetectionConfig = Depends(get_detection_config)) -> LocalizationService:
    return LocalizationService(config)


async def get_uploaded_image(file: UploadFile = File(...)) -> ImageBuffer:
    """
    Decode an uploaded PGM file

    Raises:
        HTTPException: 422 if the upload is not a readable 8-bit PGM
    """
    data = await file.read()
    try:
        return decode_pgm(data)
    except ImageFormatError as e:
        logger.error(f"Rejected upload: filename={file.filename}, reason={e}")
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=f"Invalid PGM image: {str(e)}"
        )
