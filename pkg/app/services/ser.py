"""
SER Service Module

Stable edge regions: per-pixel stable DDS growth, tangential expansion,
robust side estimation and the region consistency statistics.
"""

import logging
import math
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from app.core.exceptions import ImageTooSmallError, SerEstimationError
from app.models.image import Axis, EdgeMap, EdgePixel, GradientField, ImageBuffer
from app.models.region import SER, ConsistencyReport, SerSides, StableDDS
from app.models.sequence import DDS, PointSource, SidePair, SubpixelPoint
from app.schemas.config import SerThresholds
from app.services.cis import localize_cis, to_subpixel_point

logger = logging.getLogger(__name__)

Pixel = Tuple[int, int]

CONSISTENCY_WINDOW = 7
COSINE_THRESHOLD = 0.9
PASS_FRACTION = 0.95

# Growth phases of one DDS side
_RAMP, _PLATEAU, _DONE = "ramp", "plateau", "done"


def angle_difference(a: float, b: float) -> float:
    """Absolute wrapped difference of two angles, in [0, pi]"""
    return abs(math.atan2(math.sin(a - b), math.cos(a - b)))


def _reduce(th: SerThresholds, first: float, second: float) -> float:
    return min(first, second) if th.stability_reduce == "min" else max(first, second)


def _pixel_at(axis: Axis, along: int, across: int) -> Pixel:
    """(x, y) of the pixel at coordinate `along` on `axis` and `across` on the other axis"""
    return (along, across) if axis is Axis.HORIZONTAL else (across, along)


def grow_stable_dds(
    img: ImageBuffer,
    grad: GradientField,
    p: EdgePixel,
    th: SerThresholds,
) -> Optional[StableDDS]:
    """
    Grow a DDS from the single pixel p until both ends reach a smooth side

    Each round extends every side that has not stopped by one pixel. Once a
    side's endmost variation is within th_ev it keeps extending into the
    plateau until two equal end pixels (within th_plateau) or plateau_max
    extra pixels. After every round the mean and the summed-gradient angle
    are compared with the previous round; a normalized drift above 1 rejects
    the pixel.

    Returns:
        The StableDDS, or None when the pixel is rejected (instability,
        image border during the ramp or k_max)
    """
    axis = p.dd
    position = p.along(axis)
    extent = img.extent(axis)

    reach = {-1: 0, 1: 0}
    phase = {-1: _RAMP, 1: _RAMP}
    settled = {-1: 0, 1: 0}
    m_prev = img.value(p.x, p.y)
    theta_prev = math.atan2(p.gy, p.gx)
    values = img.line(axis, p.x, p.y, position, 1)

    while phase[-1] != _DONE or phase[1] != _DONE:
        extended = []
        for side in (-1, 1):
            if phase[side] == _DONE:
                continue
            end = position + side * (reach[side] + 1)
            if not 0 <= end < extent:
                if phase[side] == _RAMP:
                    logger.debug(f"Stable DDS rejected: pixel=({p.x}, {p.y}), reason=margin")
                    return None
                phase[side] = _DONE
                continue
            reach[side] += 1
            extended.append(side)
        if not extended:
            break
        if max(reach.values()) > th.k_max:
            logger.debug(f"Stable DDS rejected: pixel=({p.x}, {p.y}), reason=k_max")
            return None

        start = position - reach[-1]
        length = reach[-1] + reach[1] + 1
        values = img.line(axis, p.x, p.y, start, length)
        for side in extended:
            variation = abs(values[0] - values[1]) if side == -1 else abs(values[-1] - values[-2])
            if phase[side] == _RAMP:
                if variation <= th.th_ev:
                    phase[side] = _DONE if variation <= th.th_plateau or th.plateau_max == 0 else _PLATEAU
            else:
                settled[side] += 1
                if variation <= th.th_plateau or settled[side] >= th.plateau_max:
                    phase[side] = _DONE

        m_k = float(values.mean())
        sum_gx, sum_gy = grad.line_sums(axis, p.x, p.y, start, length)
        theta_k = math.atan2(sum_gy, sum_gx)
        drift = _reduce(th, abs(m_k - m_prev) / th.th_m, angle_difference(theta_k, theta_prev) / th.th_theta)
        if drift > 1.0:
            logger.debug(f"Stable DDS rejected: pixel=({p.x}, {p.y}), reason=drift, k={max(reach.values())}")
            return None
        m_prev, theta_prev = m_k, theta_k

    k_d, k_u = reach[-1], reach[1]
    dds = DDS(anchor=p, axis=axis, start_index=position - k_d, intensities=values.copy(), k_u=k_u, k_d=k_d)
    return StableDDS(dds=dds, m_k=m_prev, theta_k=theta_prev)


def _relative_mean(values: np.ndarray) -> Optional[float]:
    spread = float(values.max() - values.min())
    if spread == 0.0:
        return None
    return float(values.mean()) / spread


def expand_tangent(
    img: ImageBuffer,
    grad: GradientField,
    seed: StableDDS,
    th: SerThresholds,
    edges: EdgeMap,
    claimed: Optional[Set[Pixel]] = None,
) -> SER:
    """
    Expand a stable DDS along the tangent into a stable edge region

    Sides alternate (lower tangent coordinate first). The next centre is an
    unclaimed edge pixel with the seed's deflection among the three
    8-neighbours of the previous centre on the expansion side, the one with
    the smallest intensity difference to it; a side without such a pixel
    stops. Every new DDS keeps the seed's layout (k_d pixels below the
    centre, k_u above).

    Args:
        img: Input image
        grad: Sobel gradient field
        seed: Accepted stable DDS
        th: Stability thresholds
        edges: Edge pixels; only these can become member centres
        claimed: Centres owned by regions, extended with the new members

    Returns:
        SER ordered by increasing tangent coordinate
    """
    axis = seed.dds.axis
    tangent = axis.orthogonal
    claimed = claimed if claimed is not None else set()

    anchor = seed.dds.anchor
    r_seed = _relative_mean(seed.dds.intensities)
    state = {
        side: {"along": anchor.along(axis), "across": anchor.along(tangent), "theta": seed.theta_k, "r": r_seed}
        for side in (-1, 1)
    }
    active = {-1: r_seed is not None, 1: r_seed is not None}
    grown = {-1: [], 1: []}

    while active[-1] or active[1]:
        for side in (-1, 1):
            if not active[side]:
                continue
            member = _expand_step(img, grad, edges, state[side], side, seed, th, claimed)
            if member is None:
                active[side] = False
                continue
            grown[side].append(member)
            claimed.add(member.anchor.key)

    members = list(reversed(grown[-1])) + [seed.dds] + grown[1]
    return SER(members=members, axis=axis, theta=seed.theta_k)


def _next_centre(img, edges, axis, state, side, claimed) -> Optional[EdgePixel]:
    across = state["across"] + side
    previous = img.value(*_pixel_at(axis, state["along"], state["across"]))
    options = []
    for offset in (0, -1, 1):
        along = state["along"] + offset
        pixel = edges.get(*_pixel_at(axis, along, across))
        if pixel is None or pixel.dd is not axis or pixel.key in claimed:
            continue
        options.append((abs(img.value(pixel.x, pixel.y) - previous), offset != 0, along, pixel))
    if not options:
        return None
    return min(options, key=lambda option: option[:3])[3]


def _expand_step(img, grad, edges, state, side, seed, th, claimed) -> Optional[DDS]:
    axis = seed.dds.axis
    pixel = _next_centre(img, edges, axis, state, side, claimed)
    if pixel is None:
        return None

    along = pixel.along(axis)
    start = along - seed.k_d
    if start < 0 or start + seed.n > img.extent(axis):
        return None

    values = img.line(axis, pixel.x, pixel.y, start, seed.n)
    r_l = _relative_mean(values)
    if r_l is None:
        return None
    sum_gx, sum_gy = grad.line_sums(axis, pixel.x, pixel.y, start, seed.n)
    theta_l = math.atan2(sum_gy, sum_gx)
    drift = _reduce(th, angle_difference(theta_l, state["theta"]) / th.th_theta, abs(r_l - state["r"]) / th.th_r)
    if drift > 1.0:
        return None

    state.update(along=along, across=pixel.along(axis.orthogonal), theta=theta_l, r=r_l)
    return DDS(anchor=pixel, axis=axis, start_index=start, intensities=values.copy(), k_u=seed.k_u, k_d=seed.k_d)


def _spread(values: np.ndarray, spread: str) -> float:
    return float(values.var()) if spread == "variance" else float(values.std())


def _difference_mode(upper: np.ndarray, lower: np.ndarray) -> float:
    """Most frequent rounded pairwise difference; ties go to the larger |d|"""
    diffs = np.rint(upper[:, None] - lower[None, :]).astype(np.int64).ravel()
    shift = diffs.min()
    counts = np.bincount(diffs - shift)
    best = np.flatnonzero(counts == counts.max()) + shift
    return float(max(best.tolist(), key=lambda d: (abs(d), d)))


def _group_level(group: np.ndarray, bright: bool) -> float:
    """
    Mean of the group's core around its most frequent level

    The level is the mode of the rounded values (ties go to the extreme
    level); the core keeps values within max(0.5, 3 * 1.4826 * MAD) of it,
    so transition pixels that slipped into a noiseless group are dropped
    while a noisy plateau is kept whole.
    """
    rounded = np.rint(group).astype(np.int64)
    shift = rounded.min()
    counts = np.bincount(rounded - shift)
    levels = np.flatnonzero(counts == counts.max()) + shift
    level = float(levels.max() if bright else levels.min())
    deviation = np.abs(group - level)
    width = max(0.5, 3.0 * 1.4826 * float(np.median(deviation)))
    return float(group[deviation <= width].mean())


def _subsample(values: np.ndarray, size: int) -> np.ndarray:
    if values.size <= size:
        return values
    return values[np.linspace(0, values.size - 1, size).astype(np.int64)]


def estimate_ser_sides(
    ser: SER,
    spread: str = "std",
    pair_limit: int = 1_000_000,
    subsample_size: int = 1000,
) -> SerSides:
    """
    Robust side intensities of a region from its whole pixel multiset

    Pixels above mean + spread form the bright group, pixels below mean - spread
    the dark group. The side difference D_0 is the mode of the rounded pairwise
    group differences; the group with the smaller variance anchors its
    core level (see _group_level) and the other side follows at distance D_0.

    Raises:
        SerEstimationError: If either group is empty
    """
    values = ser.pixel_values()
    m_0 = float(values.mean())
    v_0 = _spread(values, spread)
    bright = values[values > m_0 + v_0]
    dark = values[values < m_0 - v_0]
    if bright.size == 0 or dark.size == 0:
        raise SerEstimationError(
            f"Side groups empty: bright={bright.size}, dark={dark.size}, members={len(ser.members)}"
        )

    if bright.size * dark.size > pair_limit:
        d_0 = _difference_mode(_subsample(bright, subsample_size), _subsample(dark, subsample_size))
    else:
        d_0 = _difference_mode(bright, dark)

    if bright.var() < dark.var():
        g_a_s = _group_level(bright, bright=True)
        g_b_s = g_a_s - d_0
    else:
        g_b_s = _group_level(dark, bright=False)
        g_a_s = g_b_s + d_0

    sides = SerSides(g_a_s=g_a_s, g_b_s=g_b_s, d_0=d_0)
    ser.sides = sides
    return sides


def oriented_sides(values: np.ndarray, g_bright: float, g_dark: float) -> SidePair:
    """Side pair for a sequence, brighter side at the end that is brighter in `values`"""
    if values[0] > values[-1]:
        return SidePair(g_a=g_bright, g_b=g_dark)
    return SidePair(g_a=g_dark, g_b=g_bright)


def localize_ser(ser: SER) -> List[SubpixelPoint]:
    """
    Localize every member DDS with the region-wide sides

    Raises:
        SerEstimationError: If the region has no estimated sides
    """
    if ser.sides is None:
        raise SerEstimationError("SER has no estimated sides")

    points = []
    for member in ser.members:
        sides = oriented_sides(member.intensities, ser.g_a_s, ser.g_b_s)
        solution = localize_cis(member, sides)
        points.append(to_subpixel_point(member.anchor, member, solution.c, PointSource.SER, solution.clamped))
    return points


def build_sers(
    img: ImageBuffer,
    grad: GradientField,
    edges: EdgeMap,
    th: SerThresholds,
) -> List[SER]:
    """
    Grow and expand regions from every unclaimed edge pixel in row-major order

    Returns:
        Regions in creation order; every edge pixel is the centre of at most one member
    """
    claimed: Set[Pixel] = set()
    sers: List[SER] = []
    rejected = 0

    for p in edges:
        if p.key in claimed:
            continue
        seed = grow_stable_dds(img, grad, p, th)
        if seed is None:
            rejected += 1
            continue
        claimed.add(p.key)
        sers.append(expand_tangent(img, grad, seed, th, edges, claimed))

    logger.info(f"SER construction: edge_pixels={len(edges)}, sers={len(sers)}, rejected={rejected}")
    return sers


def _window_sequences(block: np.ndarray, axis: Axis) -> np.ndarray:
    """Rows of the block when sequences run along x, columns otherwise"""
    return block if axis is Axis.HORIZONTAL else block.T


def _cosine_matrix(sequences: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(sequences, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    unit = sequences / safe[:, None]
    cosine = unit @ unit.T
    zero = norms == 0.0
    cosine[np.ix_(zero, zero)] = 1.0
    return cosine


def _dominant_axis(pixels: Iterable[EdgePixel]) -> Axis:
    pixels = list(pixels)
    horizontal = sum(1 for p in pixels if p.dd is Axis.HORIZONTAL)
    return Axis.HORIZONTAL if horizontal > len(pixels) - horizontal else Axis.VERTICAL


def assumption2_stats(img: ImageBuffer, edges: EdgeMap, edge_class: str = "synthetic") -> ConsistencyReport:
    """
    Share of edge-containing 7x7 windows whose seven DDSs are mutually consistent

    A window passes when more than 95% of its DDS pairs have a cosine
    similarity above 0.9.

    Raises:
        ImageTooSmallError: If the image is smaller than 7x7
    """
    size = CONSISTENCY_WINDOW
    if img.width < size or img.height < size:
        raise ImageTooSmallError(f"Consistency statistics need at least {size}x{size}, got {img.width}x{img.height}")

    tiles: Dict[Tuple[int, int], List[EdgePixel]] = defaultdict(list)
    for p in edges:
        tiles[(p.y // size, p.x // size)].append(p)

    upper = np.triu_indices(size, k=1)
    regions = passing = 0
    for (row, column), inside in sorted(tiles.items()):
        top, left = row * size, column * size
        if top + size <= img.height and left + size <= img.width:
            block = img.data[top:top + size, left:left + size]
            cosine = _cosine_matrix(_window_sequences(block, _dominant_axis(inside)))
            share = float(np.mean(cosine[upper] > COSINE_THRESHOLD))
            regions += 1
            if share > PASS_FRACTION:
                passing += 1

    ratio = passing / regions if regions else 0.0
    logger.info(f"Consistency statistics: edge_class={edge_class}, regions={regions}, passing={passing}")
    return ConsistencyReport(
        edge_class=edge_class,
        total_edge_pixels=len(edges),
        regions=regions,
        passing=passing,
        ratio=ratio,
        no_regions=regions == 0,
    )
