"""
Evalbench Service Module

Accuracy metrics against synthetic ground truth, an erf-fit reference
localizer and the benchmark runner.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from app.config import settings
from app.core.exceptions import DegenerateProfileError, InsufficientPointsError, InvalidParameterError
from app.models.bench import BenchReport, BenchRow
from app.models.sequence import SubpixelPoint
from app.schemas.config import DetectionConfig, Method
from app.schemas.synthetic import GroundTruth, SyntheticKind, SyntheticSpec
from app.services.pipeline import LocalizationService
from app.services.synthgen import generate
from app.utils.profiles import erf_cdf_integral

logger = logging.getLogger(__name__)

MIN_CIRCLE_POINTS = 8
MIN_ORACLE_SAMPLES = 5

CIRCLE_KERNELS = (3, 5, 7, 9)
CIRCLE_SNRS = (80.0, 90.0, 100.0)
LINE_SIGMAS = (1.0, 1.25, 1.5, 1.75, 2.0, 2.25)
LINE_SNRS = (70.0, 73.0, 76.0, 79.0, 85.0)
LINE_LOCATIONS = tuple(round(-0.5 + 0.1 * i, 1) for i in range(11))
SLANT_KERNELS = (5, 7)
SLANT_SLOPES = tuple(range(1, 11))
SLANT_SNR = 85.0


def _coordinates(points: Iterable[SubpixelPoint]) -> np.ndarray:
    return np.asarray([(p.x, p.y) for p in points], dtype=np.float64).reshape(-1, 2)


def circle_radius_error(points: Sequence[SubpixelPoint], truth: GroundTruth) -> float:
    """
    |mean distance to the true centre - true radius|

    Raises:
        InsufficientPointsError: If fewer than 8 points are given
    """
    if len(points) < MIN_CIRCLE_POINTS:
        raise InsufficientPointsError(f"Radius fit needs at least {MIN_CIRCLE_POINTS} points, got {len(points)}")
    xy = _coordinates(points)
    cx, cy = truth.center
    fitted = float(np.hypot(xy[:, 0] - cx, xy[:, 1] - cy).mean())
    return abs(fitted - truth.radius)


def line_residuals(points: Sequence[SubpixelPoint], truth: GroundTruth) -> np.ndarray:
    if not points:
        raise InsufficientPointsError("Line RMSE needs at least one point")
    return _coordinates(points)[:, 1] - truth.edge_location


def slant_residuals(points: Sequence[SubpixelPoint], truth: GroundTruth) -> np.ndarray:
    """
    Vertical residual of each point to its nearest line (by perpendicular distance)

    Points farther than half the normal line spacing from every line count as
    half the vertical line spacing.
    """
    if not points:
        raise InsufficientPointsError("Slant RMSE needs at least one point")
    xy = _coordinates(points)
    lines = np.asarray(truth.lines, dtype=np.float64)
    slopes, intercepts = lines[:, 0], lines[:, 1]

    vertical = xy[:, 1:2] - (slopes[None, :] * xy[:, 0:1] + intercepts[None, :])
    perpendicular = np.abs(vertical) / np.sqrt(slopes[None, :] ** 2 + 1.0)
    nearest = np.argmin(perpendicular, axis=1)
    rows = np.arange(len(xy))
    residual = vertical[rows, nearest]

    slope = slopes[nearest]
    normal_spacing = truth.line_spacing * slope / np.sqrt(slope ** 2 + 1.0)
    cap = truth.line_spacing * slope / 2.0
    unmatched = perpendicular[rows, nearest] > normal_spacing / 2.0
    return np.where(unmatched, cap, residual)


def rmse(residuals: np.ndarray) -> float:
    residuals = np.asarray(residuals, dtype=np.float64)
    return float(np.sqrt(np.mean(residuals ** 2)))


def line_rmse(points: Sequence[SubpixelPoint], truth: GroundTruth) -> float:
    return rmse(line_residuals(points, truth))


def slant_rmse(points: Sequence[SubpixelPoint], truth: GroundTruth) -> float:
    return rmse(slant_residuals(points, truth))


def _erf_model(locations: np.ndarray, scale: float, positions: np.ndarray) -> np.ndarray:
    """Normalized rising edge per pixel; scale 0 is the ideal step"""
    lower, upper = positions - 0.5, positions + 0.5
    if scale == 0.0:
        return np.clip(upper[None, :] - locations[:, None], 0.0, 1.0)
    return erf_cdf_integral(lower[None, :], upper[None, :], locations[:, None], scale)


def _residual_energy(model: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Least-squares fit of values ~ offset + gain * model per row

    Returns:
        (residual energy, gain) per row
    """
    centered_model = model - model.mean(axis=-1, keepdims=True)
    centered = values - values.mean()
    sxx = (centered_model ** 2).sum(axis=-1)
    sxy = (centered_model * centered).sum(axis=-1)
    explained = np.divide(sxy ** 2, sxx, out=np.zeros_like(sxx), where=sxx > 0)
    gain = np.divide(sxy, sxx, out=np.zeros_like(sxx), where=sxx > 0)
    return np.maximum(float((centered ** 2).sum()) - explained, 0.0), gain


def _best_location(energy: np.ndarray, gain: np.ndarray, tolerance: float) -> int:
    """Index of the lowest energy; among equal fits the one with the smallest side contrast"""
    near = np.flatnonzero(energy <= energy.min() + tolerance)
    return int(near[np.argmin(np.abs(gain[near]))])


def erf_fit_oracle(
    profile: Sequence[float],
    location_step: float = 1e-3,
    scale_step: float = 0.05,
    max_scale: Optional[float] = None,
) -> float:
    """
    Reference edge location from a least-squares erf fit

    Location (sequence coordinates, pixel i covers (i - 0.5, i + 0.5)) and
    scale are searched on a grid; the two side intensities are solved
    linearly at every grid point. Near-equal fits prefer the smaller scale,
    then the smaller fitted contrast, which puts a one-pixel side of an
    ideal step on the pixel boundary. An inexact best fit is refined with a
    golden-section search at the best scale.

    Raises:
        InvalidParameterError: If the profile has fewer than 5 samples
        DegenerateProfileError: If the profile is flat
    """
    values = np.asarray(profile, dtype=np.float64)
    n = values.size
    if n < MIN_ORACLE_SAMPLES:
        raise InvalidParameterError(f"Oracle needs at least {MIN_ORACLE_SAMPLES} samples, got {n}")
    if np.ptp(values) == 0.0:
        raise DegenerateProfileError("Flat profile has no edge to fit")

    positions = np.arange(1, n + 1, dtype=np.float64)
    locations = np.arange(0.5, n + 0.5 + location_step / 2, location_step)
    max_scale = max_scale if max_scale is not None else n / 2.0
    scales = [0.0] + [round(k * scale_step, 10) for k in range(1, int(max_scale / scale_step) + 1)]
    tolerance = 1e-9 * max(float(((values - values.mean()) ** 2).sum()), 1.0)

    best_energy, best_location, best_scale = math.inf, float(locations[0]), 0.0
    for scale in scales:
        energy, gain = _residual_energy(_erf_model(locations, scale, positions), values)
        index = _best_location(energy, gain, tolerance)
        if energy[index] < best_energy - tolerance:
            best_energy, best_location, best_scale = float(energy[index]), float(locations[index]), scale

    if best_energy <= tolerance:
        return best_location

    def objective(location: float) -> float:
        model = _erf_model(np.array([location]), best_scale, positions)
        return float(_residual_energy(model, values)[0][0])

    low, high = best_location - location_step, best_location + location_step
    try:
        refined = optimize.minimize_scalar(
            objective, bracket=(low, best_location, high), method="golden", options={"xtol": 1e-7},
        )
    except ValueError:
        # grid neighbours do not bracket a strict minimum
        return best_location
    if refined.success and low <= refined.x <= high and refined.fun <= best_energy:
        return float(refined.x)
    return best_location


@dataclass(frozen=True)
class BenchCell:
    """One row group of a benchmark table: shared parameters plus its samples"""

    kind: SyntheticKind
    specs: Tuple[SyntheticSpec, ...]
    k_g: Optional[int] = None
    snr: Optional[float] = None
    sigma_l: Optional[float] = None
    slope: Optional[int] = None

    @property
    def key(self) -> Tuple:
        return self.kind.value, self.k_g, self.snr, self.sigma_l, self.slope


def circle_grid(
    kernels: Sequence[int] = CIRCLE_KERNELS,
    snrs: Sequence[float] = CIRCLE_SNRS,
    samples: Optional[int] = None,
    seed: int = 0,
) -> List[BenchCell]:
    samples = samples or settings.samples
    cells = []
    for k_g in kernels:
        for snr in snrs:
            specs = tuple(
                SyntheticSpec(kind=SyntheticKind.CIRCLE, k_g=k_g, snr=snr, seed=seed + index)
                for index in range(samples)
            )
            cells.append(BenchCell(kind=SyntheticKind.CIRCLE, specs=specs, k_g=k_g, snr=snr))
    return cells


def line_grid(
    sigmas: Sequence[float] = LINE_SIGMAS,
    snrs: Sequence[float] = LINE_SNRS,
    locations: Sequence[float] = LINE_LOCATIONS,
    repetitions: int = 1,
    seed: int = 0,
) -> List[BenchCell]:
    """One cell per (sigma_L, SNR) group; its samples are every location x repetition"""
    cells = []
    for sigma_l in sigmas:
        for snr in snrs:
            specs = tuple(
                SyntheticSpec(kind=SyntheticKind.LINE, sigma_l=sigma_l, snr=snr, location=location, seed=seed + index)
                for index, location in enumerate(loc for loc in locations for _ in range(repetitions))
            )
            cells.append(BenchCell(kind=SyntheticKind.LINE, specs=specs, snr=snr, sigma_l=sigma_l))
    return cells


def slant_grid(
    kernels: Sequence[int] = SLANT_KERNELS,
    slopes: Sequence[int] = SLANT_SLOPES,
    snr: float = SLANT_SNR,
    samples: Optional[int] = None,
    seed: int = 0,
) -> List[BenchCell]:
    samples = samples or settings.samples
    cells = []
    for k_g in kernels:
        for slope in slopes:
            specs = tuple(
                SyntheticSpec(kind=SyntheticKind.SLANT, k_g=k_g, snr=snr, slope=slope, seed=seed + index)
                for index in range(samples)
            )
            cells.append(BenchCell(kind=SyntheticKind.SLANT, specs=specs, k_g=k_g, snr=snr, slope=slope))
    return cells


@dataclass
class _MethodTally:
    errors: List[float] = field(default_factory=list)
    residuals: List[np.ndarray] = field(default_factory=list)
    points: int = 0
    elapsed: float = 0.0
    runs: int = 0


class BenchmarkRunner:
    """
    Runs benchmark cells and collects one BenchRow per cell x method

    Cells run in a thread pool when workers > 1; rows are merged in cell
    order, so metric columns do not depend on the worker count.
    """

    def __init__(
        self,
        config: Optional[DetectionConfig] = None,
        workers: Optional[int] = None,
        pooling: Optional[str] = None,
    ):
        self.service = LocalizationService(config)
        self.workers = workers or settings.workers
        self.pooling = pooling or settings.rmse_pooling

    def run(self, cells: Sequence[BenchCell], methods: Sequence[Method] = (Method.CIS, Method.CIS_SER)) -> BenchReport:
        methods = [Method(method) for method in methods]
        if not cells:
            return BenchReport()

        started = time.perf_counter()
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                grouped = list(executor.map(lambda cell: self._run_cell(cell, methods), cells))
        else:
            grouped = [self._run_cell(cell, methods) for cell in cells]

        rows = [row for cell_rows in grouped for row in cell_rows]
        logger.info(
            f"Benchmark finished: cells={len(cells)}, rows={len(rows)}, workers={self.workers}, "
            f"elapsed={time.perf_counter() - started:.2f}s"
        )
        return BenchReport(rows=rows)

    def _run_cell(self, cell: BenchCell, methods: List[Method]) -> List[BenchRow]:
        tallies: Dict[Method, _MethodTally] = {method: _MethodTally() for method in methods}
        for spec in cell.specs:
            image, truth = generate(spec)
            for method in methods:
                tally = tallies[method]
                start = time.perf_counter()
                result = self.service.execute(image, method)
                tally.elapsed += time.perf_counter() - start
                tally.runs += 1
                self._score(cell.kind, result.points, truth, tally, spec)

        rows = []
        for method, tally in tallies.items():
            metric = self._aggregate(cell.kind, tally)
            if metric is None:
                logger.warning(f"No usable samples: cell={cell.key}, method={method.value}")
                continue
            rows.append(BenchRow(
                kind=cell.kind.value,
                k_g=cell.k_g,
                snr=cell.snr,
                sigma_l=cell.sigma_l,
                slope=cell.slope,
                method=method.value,
                metric=metric,
                samples=len(tally.errors) if cell.kind is SyntheticKind.CIRCLE else len(tally.residuals),
                points=tally.points,
                wall_time=tally.elapsed / max(tally.runs, 1),
                threads=self.workers,
            ))
        return rows

    def _score(self, kind, points, truth, tally: _MethodTally, spec: SyntheticSpec) -> None:
        try:
            if kind is SyntheticKind.CIRCLE:
                tally.errors.append(circle_radius_error(points, truth))
            elif kind is SyntheticKind.LINE:
                tally.residuals.append(line_residuals(points, truth))
            else:
                tally.residuals.append(slant_residuals(points, truth))
        except InsufficientPointsError as e:
            logger.warning(f"Sample skipped: kind={kind.value}, seed={spec.seed}, reason={e}")
            return
        tally.points += len(points)

    def _aggregate(self, kind, tally: _MethodTally) -> Optional[float]:
        if kind is SyntheticKind.CIRCLE:
            return float(np.mean(tally.errors)) if tally.errors else None
        if not tally.residuals:
            return None
        if self.pooling == "per_image":
            return float(np.mean([rmse(r) for r in tally.residuals]))
        return rmse(np.concatenate(tally.residuals))


def run_benchmark(
    cells: Sequence[BenchCell],
    methods: Sequence[Method] = (Method.CIS, Method.CIS_SER),
    config: Optional[DetectionConfig] = None,
    workers: Optional[int] = None,
) -> BenchReport:
    """Run every cell with every method (see BenchmarkRunner)"""
    return BenchmarkRunner(config, workers).run(cells, methods)


def summarize(report: BenchReport) -> pd.DataFrame:
    """Per-method mean and median of the metric column"""
    frame = report.to_frame()
    if frame.empty:
        return pd.DataFrame(columns=["kind", "method", "mean", "median", "cells"])
    summary = frame.groupby(["kind", "method"], sort=True)["metric"].agg(["mean", "median", "count"])
    return summary.rename(columns={"count": "cells"}).reset_index()


def line_sigma_means(report: BenchReport) -> pd.DataFrame:
    """Mean line RMSE per method and sigma_L"""
    frame = report.to_frame()
    frame = frame[frame["kind"] == SyntheticKind.LINE.value]
    if frame.empty:
        return pd.DataFrame(columns=["method", "sigma_l", "metric"])
    return frame.groupby(["method", "sigma_l"], sort=True)["metric"].mean().reset_index()
