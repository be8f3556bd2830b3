import logging

from fastapi import APIRouter, Depends, HTTPException, Query, status
from starlette.concurrency import run_in_threadpool

from app.api.deps import get_localization_service, get_uploaded_image
from app.core.exceptions import SubpixError
from app.models.image import ImageBuffer
from app.schemas.config import Method
from app.schemas.detection import ConsistencyResponse, DetectResponse, PointResponse
from app.services.imaging import detect_edges, sobel_gradients
from app.services.pipeline import LocalizationService
from app.services.ser import assumption2_stats

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/detect", response_model=DetectResponse, response_model_by_alias=True)
async def detect(
        method: Method = Query(Method.CIS, description="cis or cis+ser"),
        complement: bool = Query(True, description="Run the edge complement (cis+ser only)"),
        image: ImageBuffer = Depends(get_uploaded_image),
        service: LocalizationService = Depends(get_localization_service),
):
    """
    Localize the edges of an uploaded PGM image.
    Parameters:
    - method: cis runs plain CIS per edge pixel; cis+ser adds stable regions and the edge complement.
    - image: Multipart PGM upload (P2 or P5, maxval <= 255).
    Returns:
    - DetectResponse: edge pixel count, region count and the subpixel points.
    Raises:
    - HTTPException: 400 if localization fails on the image.
    """
    try:
        result = await run_in_threadpool(service.execute, image, method, complement=complement)
    except SubpixError as e:
        logger.error(f"Detection failed: method={method.value}, reason={e}")
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"Detection failed: {str(e)}"
        )

    return DetectResponse(
        method=result.method,
        width=image.width,
        height=image.height,
        edge_pixels=result.edge_pixels,
        regions=len(result.sers),
        points=[PointResponse(x=p.x, y=p.y, source=p.source.value, axis=p.axis.value, clamped=p.clamped) for p in result.points],
    )


def _consistency_report(image: ImageBuffer, service: LocalizationService, edge_class: str):
    config = service.config
    edges = detect_edges(sobel_gradients(image), config.th_l, config.th_h, config.n_p)
    return assumption2_stats(image, edges, edge_class)


@router.post("/stats", response_model=ConsistencyResponse, response_model_by_alias=True)
async def consistency_stats(
        edge_class: str = Query("uploaded", alias="edgeClass"),
        image: ImageBuffer = Depends(get_uploaded_image),
        service: LocalizationService = Depends(get_localization_service),
):
    """
    Region consistency statistics of an uploaded PGM image (7x7 windows, cosine > 0.9 in > 95% of pairs).
    """
    try:
        report = await run_in_threadpool(_consistency_report, image, service, edge_class)
    except SubpixError as e:
        logger.error(f"Consistency statistics failed: reason={e}")
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"Consistency statistics failed: {str(e)}"
        )

    return ConsistencyResponse(
        edge_class=report.edge_class,
        total_edge_pixels=report.total_edge_pixels,
        regions=report.regions,
        passing=report.passing,
        ratio=report.ratio,
        no_regions=report.no_regions,
        detail="no regions" if report.no_regions else None,
    )
