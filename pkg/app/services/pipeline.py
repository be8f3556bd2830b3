"""
Localization Service Module

End-to-end subpixel edge localization: plain CIS, or CIS over stable edge
regions followed by the edge complement.
"""

import logging
from typing import List, Optional

from app.core.exceptions import InvalidParameterError, NoEdgeContrastError, SerEstimationError, WindowOverrunError
from app.models.image import EdgeMap, ImageBuffer
from app.models.region import SER, DetectionResult
from app.models.sequence import PointSource, SubpixelPoint
from app.schemas.config import DetectionConfig, Method
from app.services.cis import estimate_plain_sides, localize_cis, localize_plain, to_subpixel_point
from app.services.complement import complement_edges
from app.services.imaging import detect_edges, sobel_gradients
from app.services.ser import build_sers, estimate_ser_sides, localize_ser

logger = logging.getLogger(__name__)


class LocalizationService:
    """
    Subpixel edge localization service

    Pipeline:
    - Sobel gradients and Canny-style edge pixels
    - `cis`: fixed window per edge pixel with flat-run sides
    - `cis+ser`: stable regions with robust sides, then edge complement
    """

    def __init__(self, config: Optional[DetectionConfig] = None):
        self.config = config or DetectionConfig.from_settings()

    def execute(self, img: ImageBuffer, method: Method = Method.CIS, complement: bool = True) -> DetectionResult:
        """
        Localize all edges of an image

        Args:
            img: Input image
            method: `cis` or `cis+ser`
            complement: Run the edge complement after region localization (`cis+ser` only)

        Returns:
            DetectionResult with the subpixel points in deterministic order

        Raises:
            ImageTooSmallError: If the image is smaller than 3x3
            InvalidParameterError: If the method is unknown
        """
        try:
            method = Method(method)
        except ValueError as e:
            raise InvalidParameterError(f"Unknown method: {method}") from e

        grad = sobel_gradients(img)
        edges = detect_edges(grad, self.config.th_l, self.config.th_h, self.config.n_p)

        if method is Method.CIS:
            result = self._localize_plain(img, edges)
        else:
            sers = build_sers(img, grad, edges, self.config.ser)
            result = self._localize_regions(img, edges, sers, complement)

        result.points = self._filter_clamped(result.points)
        logger.info(
            f"Localization finished: method={method.value}, edge_pixels={len(edges)}, "
            f"sers={len(result.sers)}, points={len(result.points)}, skipped={result.skipped}"
        )
        return result

    def _localize_plain(self, img: ImageBuffer, edges: EdgeMap) -> DetectionResult:
        points: List[SubpixelPoint] = []
        skipped = 0
        for p in edges:
            try:
                points.append(localize_plain(img, p, self.config.n_p, self.config.flat_tol))
            except (WindowOverrunError, NoEdgeContrastError):
                skipped += 1
        return DetectionResult(method=Method.CIS.value, edges=edges, points=points, skipped=skipped)

    def _localize_regions(self, img: ImageBuffer, edges: EdgeMap, sers: List[SER], complement: bool) -> DetectionResult:
        points: List[SubpixelPoint] = []
        skipped = fallbacks = 0
        for ser in sers:
            try:
                estimate_ser_sides(ser, self.config.spread, self.config.pair_limit, self.config.subsample_size)
            except SerEstimationError as e:
                logger.debug(f"SER side estimation failed, using plain sides: {e}")
                fallbacks += 1
                plain, missed = self._localize_members_plain(ser)
                points.extend(plain)
                skipped += missed
                continue
            try:
                points.extend(localize_ser(ser))
            except NoEdgeContrastError:
                skipped += len(ser.members)

        if complement:
            points.extend(complement_edges(img, edges, sers, self.config.th_c))

        if fallbacks:
            logger.info(f"SER fallbacks to plain sides: sers={fallbacks}")
        return DetectionResult(method=Method.CIS_SER.value, edges=edges, points=points, sers=sers, skipped=skipped)

    def _localize_members_plain(self, ser: SER):
        points: List[SubpixelPoint] = []
        missed = 0
        for member in ser.members:
            try:
                solution = localize_cis(member, estimate_plain_sides(member, self.config.flat_tol))
            except NoEdgeContrastError:
                missed += 1
                continue
            points.append(to_subpixel_point(member.anchor, member, solution.c, PointSource.CIS, solution.clamped))
        return points, missed

    def _filter_clamped(self, points: List[SubpixelPoint]) -> List[SubpixelPoint]:
        if not self.config.drop_clamped:
            return points
        return [point for point in points if not point.clamped]
