"""
CSV, gnuplot and overlay writers for localization and benchmark results
"""

import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from app.models.bench import BenchReport
from app.models.image import ImageBuffer
from app.models.region import ConsistencyReport
from app.models.sequence import SubpixelPoint
from app.schemas.synthetic import GroundTruth

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

POINT_COLUMNS = ["x", "y", "source"]
TRUTH_COLUMNS = ["kind", "parameter", "value"]
CONSISTENCY_COLUMNS = ["edge_class", "total_edge_pixels", "regions", "passing", "ratio"]
TIMING_COLUMNS = ("wall_time", "threads")
OVERLAY_SCALE = 4


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def points_frame(points: Sequence[SubpixelPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        [(p.x, p.y, p.source.value) for p in points],
        columns=POINT_COLUMNS,
    )


def write_points_csv(points: Sequence[SubpixelPoint], path: PathLike) -> Path:
    """Points as `x,y,source` with 6 decimals"""
    path = _prepare(path)
    points_frame(points).to_csv(path, index=False, float_format="%.6f")
    logger.debug(f"Wrote points: path={path}, rows={len(points)}")
    return path


def write_truth_csv(truth: GroundTruth, path: PathLike) -> Path:
    path = _prepare(path)
    pd.DataFrame(truth.rows(), columns=TRUTH_COLUMNS).to_csv(path, index=False, float_format="%.6f")
    return path


def write_bench_csv(report: BenchReport, path: PathLike, timing: bool = True) -> Path:
    """
    One row per cell x method

    With timing=False the wall_time and threads columns are left out, so the
    file depends only on the cells and methods.
    """
    path = _prepare(path)
    frame = report.to_frame()
    if not timing:
        frame = frame.drop(columns=list(TIMING_COLUMNS))
    frame.to_csv(path, index=False)
    logger.debug(f"Wrote benchmark report: path={path}, rows={len(report)}")
    return path


def write_gnuplot(report: BenchReport, path: PathLike) -> Path:
    """Whitespace-separated table with a commented header, missing values as `-`"""
    path = _prepare(path)
    frame = report.to_frame()
    with path.open("w", encoding="ascii") as handle:
        handle.write("# " + " ".join(frame.columns) + "\n")
        frame.to_csv(handle, sep=" ", header=False, index=False, na_rep="-")
    return path


def write_consistency_csv(report: ConsistencyReport, path: PathLike) -> Path:
    path = _prepare(path)
    record = report.to_dict()
    pd.DataFrame([[record[column] for column in CONSISTENCY_COLUMNS]], columns=CONSISTENCY_COLUMNS).to_csv(
        path, index=False, float_format="%.6f"
    )
    return path


def render_overlay(img: ImageBuffer, points: Sequence[SubpixelPoint], scale: int = OVERLAY_SCALE) -> ImageBuffer:
    """Nearest-neighbour upscale of a dimmed copy with the points painted white"""
    canvas = np.kron(img.data * 0.5, np.ones((scale, scale)))
    if points:
        xy = np.asarray([(p.x, p.y) for p in points], dtype=np.float64)
        columns = np.clip(np.floor((xy[:, 0] + 0.5) * scale).astype(np.int64), 0, canvas.shape[1] - 1)
        rows = np.clip(np.floor((xy[:, 1] + 0.5) * scale).astype(np.int64), 0, canvas.shape[0] - 1)
        canvas[rows, columns] = 255.0
    return ImageBuffer(canvas)
