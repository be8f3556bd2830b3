"""
Complement Service Module

Edge complement by extension and adjustment: stable region parameters are
carried into the irregular edge pixels next to each region endpoint.
"""

import logging
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from app.core.exceptions import NoEdgeContrastError
from app.models.complement import AdjustedSequence, AdjustMode, CandidateSet, GuideSequence, Pixel
from app.models.image import Axis, EdgeMap, EdgePixel, ImageBuffer
from app.models.region import SER
from app.models.sequence import DDS, PointSource, SidePair, SubpixelPoint
from app.services.cis import localize_cis, to_subpixel_point

logger = logging.getLogger(__name__)

# Chain directions as (dx, dy), counter-clockwise from east with y pointing down
DIRECTIONS: Tuple[Pixel, ...] = (
    (1, 0), (1, -1), (0, -1), (-1, -1),
    (-1, 0), (-1, 1), (0, 1), (1, 1),
)

NEIGHBOURS = tuple((dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dx, dy) != (0, 0))


def _offset(pixel: Pixel, dx: int, dy: int) -> Pixel:
    return pixel[0] + dx, pixel[1] + dy


def collect_candidates(edges: EdgeMap, sers: Iterable[SER]) -> CandidateSet:
    stable = {anchor.key for ser in sers for anchor in ser.anchors}
    return CandidateSet(pixels=frozenset(edges.keys()) - stable)


def guide_sequence(center: Pixel, direction: int) -> GuideSequence:
    """
    Five cells A..E ahead of `center`

    B, C and D are the neighbours in directions i+1, i and i-1; A and E
    continue the fan one step further past B and D.
    """
    direction %= 8
    bx, by = DIRECTIONS[(direction + 1) % 8]
    cx, cy = DIRECTIONS[direction]
    dx, dy = DIRECTIONS[(direction - 1) % 8]
    cells = (
        _offset(center, 2 * bx - cx, 2 * by - cy),
        _offset(center, bx, by),
        _offset(center, cx, cy),
        _offset(center, dx, dy),
        _offset(center, 2 * dx - cx, 2 * dy - cy),
    )
    return GuideSequence(center=center, direction=direction, cells=cells)


def _direction_index(step: Pixel) -> int:
    return DIRECTIONS.index(step)


def _initial_directions(ser: SER) -> List[Tuple[Pixel, int]]:
    """(endpoint, outward direction) for the low and the high end of the region"""
    anchors = [anchor.key for anchor in ser.anchors]
    if len(anchors) == 1:
        tangent = ser.axis.orthogonal
        forward = (1, 0) if tangent is Axis.HORIZONTAL else (0, 1)
        backward = (-forward[0], -forward[1])
        return [(anchors[0], _direction_index(backward)), (anchors[0], _direction_index(forward))]

    low = (anchors[0][0] - anchors[1][0], anchors[0][1] - anchors[1][1])
    high = (anchors[-1][0] - anchors[-2][0], anchors[-1][1] - anchors[-2][1])
    return [(anchors[0], _direction_index(low)), (anchors[-1], _direction_index(high))]


def _extend_end(
    start: Pixel,
    direction: int,
    cands: CandidateSet,
    claimed: Set[Pixel],
    others: Set[Pixel],
) -> List[Pixel]:
    chain: List[Pixel] = []
    current = start

    def free(pixel: Pixel) -> bool:
        return pixel in cands and pixel not in claimed

    while True:
        guide = guide_sequence(current, direction)
        if free(guide.a) and free(guide.b):
            chosen, direction = guide.b, direction + 1
        elif free(guide.d) and free(guide.e):
            chosen, direction = guide.d, direction - 1
        elif free(guide.c):
            chosen = guide.c
        elif free(guide.b):
            chosen = guide.b
        elif free(guide.d):
            chosen = guide.d
        else:
            break

        claimed.add(chosen)
        chain.append(chosen)
        current = chosen
        if any(_offset(chosen, dx, dy) in others for dx, dy in NEIGHBOURS):
            break

    return chain


def extend_from_ser(
    cands: CandidateSet,
    ser: SER,
    claimed: Optional[Set[Pixel]] = None,
    stable: Optional[Set[Pixel]] = None,
) -> List[Pixel]:
    """
    Extension chains from both endpoints of a region

    Args:
        cands: Edge pixels outside every region
        ser: Region to extend
        claimed: Pixels already taken by earlier chains; updated in place
        stable: Pixels of all regions; reaching another region's pixel ends a chain

    Returns:
        The low-end chain followed by the high-end chain
    """
    claimed = claimed if claimed is not None else set()
    own = {anchor.key for anchor in ser.anchors}
    others = (stable or set()) - own

    chain: List[Pixel] = []
    for endpoint, direction in _initial_directions(ser):
        chain.extend(_extend_end(endpoint, direction, cands, claimed, others))
    return chain


def _half_side(values: np.ndarray) -> float:
    """Mean of the flattest adjacent pair, outermost first (values start at the window end)"""
    if values.size == 1:
        return float(values[0])
    index = int(np.argmin(np.abs(np.diff(values))))
    return float((values[index] + values[index + 1]) / 2.0)


def _discarded(pixel: Pixel, axis: Axis, start: int) -> AdjustedSequence:
    return AdjustedSequence(
        center=pixel, axis=axis, start_index=start, intensities=np.empty(0),
        g_a=0.0, g_b=0.0, mode=AdjustMode.DISCARDED,
    )


def adjust_candidate(img: ImageBuffer, pixel: Pixel, ser: SER, th_c: float = 10.0) -> AdjustedSequence:
    """
    Window an extended pixel along the region's DD and pick its sides

    The candidate sides come from the flattest pair of each window half. They
    are compared with the region sides through
        D_c = max(|s_a - c_a|, |s_b - c_b|)
        m_c = |(s_a + s_b) - (c_a + c_b)| / 2
    and the window is discarded (m_c > th_c), keeps its own sides (D_c > m_c)
    or inherits the region sides.
    """
    axis, length = ser.axis, ser.length
    x, y = pixel
    along = x if axis is Axis.HORIZONTAL else y
    start = along - (length - 1) // 2
    if ser.sides is None or start < 0 or start + length > img.extent(axis):
        return _discarded(pixel, axis, start)

    values = img.line(axis, x, y, start, length).copy()
    half = length // 2
    c_a = _half_side(values[:half])
    c_b = _half_side(values[length - half:][::-1])

    if c_a > c_b:
        s_a, s_b = ser.g_a_s, ser.g_b_s
    else:
        s_a, s_b = ser.g_b_s, ser.g_a_s

    d_c = max(abs(s_a - c_a), abs(s_b - c_b))
    m_c = abs((s_a + s_b) - (c_a + c_b)) / 2.0
    if m_c > th_c:
        mode, g_a, g_b = AdjustMode.DISCARDED, c_a, c_b
    elif d_c > m_c:
        mode, g_a, g_b = AdjustMode.INDEPENDENT, c_a, c_b
    else:
        mode, g_a, g_b = AdjustMode.INHERIT_SER, s_a, s_b

    if mode is not AdjustMode.DISCARDED and g_a == g_b:
        mode = AdjustMode.DISCARDED

    return AdjustedSequence(
        center=pixel, axis=axis, start_index=start, intensities=values,
        g_a=g_a, g_b=g_b, mode=mode, d_c=d_c, m_c=m_c,
    )


def _processing_order(sers: List[SER]) -> List[SER]:
    def key(ser: SER):
        x, y = ser.endpoints[0].key
        return -len(ser.members), y, x
    return sorted(sers, key=key)


def complement_edges(img: ImageBuffer, edges: EdgeMap, sers: List[SER], th_c: float = 10.0) -> List[SubpixelPoint]:
    """
    Extend every region with estimated sides into the candidate pixels and localize them

    Returns:
        Points tagged `complement`, in extension order
    """
    cands = collect_candidates(edges, sers)
    if not cands:
        return []

    stable = {anchor.key for ser in sers for anchor in ser.anchors}
    claimed: Set[Pixel] = set()
    modes: Dict[AdjustMode, int] = {mode: 0 for mode in AdjustMode}
    points: List[SubpixelPoint] = []

    for ser in _processing_order([ser for ser in sers if ser.sides is not None]):
        for pixel in extend_from_ser(cands, ser, claimed, stable):
            adjusted = adjust_candidate(img, pixel, ser, th_c)
            modes[adjusted.mode] += 1
            if adjusted.mode is AdjustMode.DISCARDED:
                continue
            point = _localize_adjusted(adjusted)
            if point is not None:
                points.append(point)

    logger.info(
        f"Edge complement: candidates={len(cands)}, claimed={len(claimed)}, points={len(points)}, "
        f"independent={modes[AdjustMode.INDEPENDENT]}, inherit_ser={modes[AdjustMode.INHERIT_SER]}, "
        f"discarded={modes[AdjustMode.DISCARDED]}"
    )
    return points


def _localize_adjusted(adjusted: AdjustedSequence) -> Optional[SubpixelPoint]:
    x, y = adjusted.center
    anchor = EdgePixel(x=x, y=y, dd=adjusted.axis)
    dds = DDS(anchor=anchor, axis=adjusted.axis, start_index=adjusted.start_index, intensities=adjusted.intensities)
    try:
        solution = localize_cis(dds, SidePair(g_a=adjusted.g_a, g_b=adjusted.g_b))
    except NoEdgeContrastError:
        return None
    return to_subpixel_point(anchor, dds, solution.c, PointSource.COMPLEMENT, solution.clamped)
