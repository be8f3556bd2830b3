"""
Command-line interface: detect, generate, bench, stats

Run with `python -m app.cli --help`.
"""

import logging
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from app.config import Settings, settings
from app.core.exceptions import SubpixError
from app.schemas.config import DetectionConfig, Method, RunConfig, SerThresholds
from app.schemas.synthetic import SyntheticKind, SyntheticSpec
from app.services.evalbench import (
    CIRCLE_SNRS, LINE_SNRS, BenchmarkRunner, circle_grid, line_grid, slant_grid, summarize,
)
from app.services.imaging import detect_edges, sobel_gradients
from app.services.pipeline import LocalizationService
from app.services.ser import assumption2_stats
from app.services.synthgen import generate as generate_sample
from app.utils.pgm import load_grayscale, save_pgm
from app.utils.reports import (
    render_overlay, write_bench_csv, write_consistency_csv, write_gnuplot, write_points_csv, write_truth_csv,
)

logger = logging.getLogger(__name__)

cli = typer.Typer(help="Subpixel edge localization toolkit", no_args_is_help=True)
console = Console()
error_console = Console(stderr=True)


def _fail(message: str) -> None:
    error_console.print(f"[bold red]error:[/bold red] {message}")
    raise typer.Exit(code=1)


def _resolve_seed(seed: int) -> int:
    """SUBPIX_SEED wins over --seed"""
    override = Settings().seed
    return override if override is not None else seed


@cli.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging")):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=error_console, rich_tracebacks=True, show_path=False)],
        force=True,
    )


@cli.command()
def detect(
    input_path: Path = typer.Argument(..., metavar="INPUT", help="Input PGM image"),
    output_path: Path = typer.Argument(..., metavar="OUTPUT", help="Points CSV (x,y,source)"),
    method: Method = typer.Option(Method.CIS, "--method", help="cis or cis+ser"),
    overlay: Optional[Path] = typer.Option(None, "--overlay", help="Write a 4x overlay PGM"),
    complement: bool = typer.Option(True, "--complement/--no-complement", help="Edge complement after cis+ser"),
    th_l: float = typer.Option(settings.th_l, "--th-l", help="Low hysteresis threshold"),
    th_h: float = typer.Option(settings.th_h, "--th-h", help="High hysteresis threshold"),
    n_p: int = typer.Option(settings.n_p, "--n-p", help="DDS window length (odd)"),
    flat_tol: float = typer.Option(settings.flat_tol, "--flat-tol", help="Flat-run tolerance for plain sides"),
    th_m: float = typer.Option(settings.th_m, "--th-m", help="Mean-drift threshold"),
    th_theta: float = typer.Option(settings.th_theta, "--th-theta", help="Derivative-angle threshold (pi/40)"),
    th_ev: float = typer.Option(settings.th_ev, "--th-ev", help="Endmost-variation threshold"),
    th_r: float = typer.Option(settings.th_r, "--th-r", help="Relative-mean threshold"),
    th_c: float = typer.Option(settings.th_c, "--th-c", help="Complement adjustment threshold"),
    k_max: int = typer.Option(settings.k_max, "--k-max", help="Expansion cap per side"),
):
    """Localize the edges of a PGM image and write the subpixel points."""
    try:
        ser = SerThresholds(
            th_m=th_m, th_theta=th_theta, th_ev=th_ev, th_r=th_r, k_max=k_max,
            th_plateau=settings.th_plateau, plateau_max=settings.plateau_max,
            stability_reduce=settings.stability_reduce,
        )
        run = RunConfig(
            detection=DetectionConfig.from_settings(th_l=th_l, th_h=th_h, n_p=n_p, flat_tol=flat_tol, th_c=th_c, ser=ser),
            method=method,
            input_path=input_path,
            output_path=output_path,
            overlay_path=overlay,
            complement=complement,
        )
    except ValidationError as e:
        _fail(f"invalid configuration: {e.errors()[0]['msg']}")

    try:
        image = load_grayscale(run.input_path)
        result = LocalizationService(run.detection).execute(image, run.method, complement=run.complement)
        write_points_csv(result.points, run.output_path)
        if run.overlay_path is not None:
            save_pgm(render_overlay(image, result.points), run.overlay_path)
    except (SubpixError, OSError) as e:
        _fail(str(e))

    console.print(
        f"{result.method}: edge_pixels={result.edge_pixels}, sers={len(result.sers)}, "
        f"points={len(result.points)} -> {run.output_path}"
    )


@cli.command()
def generate(
    kind: SyntheticKind = typer.Argument(..., help="circle, line or slant"),
    k_g: int = typer.Option(1, "--kg", help="Gaussian kernel size (odd)"),
    snr: Optional[float] = typer.Option(None, "--snr", help="SNR in dB (omit for no noise)"),
    sigma_l: Optional[float] = typer.Option(None, "--sigma", help="Blur coefficient sigma_L (line)"),
    location: Optional[float] = typer.Option(None, "--l", "--location", help="Edge offset L (line)"),
    slope: Optional[int] = typer.Option(None, "--slope", help="Slope (slant)"),
    seed: int = typer.Option(0, "--seed", help="Noise seed (SUBPIX_SEED overrides)"),
    out_dir: Path = typer.Option(Path("."), "--out-dir", help="Output directory"),
):
    """Write one synthetic sample (PGM) and its truth CSV."""
    seed = _resolve_seed(seed)
    if kind is SyntheticKind.LINE:
        sigma_l = 1.0 if sigma_l is None else sigma_l
        location = 0.0 if location is None else location
    if kind is SyntheticKind.SLANT and slope is None:
        slope = 1
    try:
        spec = SyntheticSpec(kind=kind, k_g=k_g, snr=snr, sigma_l=sigma_l, location=location, slope=slope, seed=seed)
    except ValidationError as e:
        _fail(f"invalid sample specification: {e.errors()[0]['msg']}")

    try:
        image, truth = generate_sample(spec)
        stem = f"{kind.value}_seed{seed}"
        image_path = save_pgm(image, out_dir / f"{stem}.pgm")
        truth_path = write_truth_csv(truth, out_dir / f"{stem}_truth.csv")
    except (SubpixError, OSError) as e:
        _fail(str(e))

    console.print(f"{kind.value}: {image_path} + {truth_path}")


def _bench_cells(kind: SyntheticKind, snrs: List[float], samples: int, seed: int):
    if kind is SyntheticKind.CIRCLE:
        grid = sorted(set(CIRCLE_SNRS) | set(snrs))
        return circle_grid(snrs=grid, samples=samples, seed=seed)
    if kind is SyntheticKind.LINE:
        grid = sorted(set(LINE_SNRS) | set(snrs))
        return line_grid(snrs=grid, repetitions=max(1, samples // 5), seed=seed)
    if snrs:
        return [cell for snr in sorted(snrs) for cell in slant_grid(snr=snr, samples=samples, seed=seed)]
    return slant_grid(samples=samples, seed=seed)


def _print_summary(report) -> None:
    summary = summarize(report)
    table = Table(title="Benchmark summary")
    for column in ("kind", "method", "mean", "median", "cells"):
        table.add_column(column, justify="left" if column in ("kind", "method") else "right")
    for row in summary.itertuples(index=False):
        table.add_row(row.kind, row.method, f"{row.mean:.4f}", f"{row.median:.4f}", str(row.cells))
    console.print(table)


@cli.command()
def bench(
    kind: SyntheticKind = typer.Argument(SyntheticKind.CIRCLE, help="circle, line or slant"),
    methods: List[Method] = typer.Option([Method.CIS, Method.CIS_SER], "--methods", help="Repeat per method"),
    samples: int = typer.Option(settings.samples, "--samples", help="Samples per cell"),
    snr: List[float] = typer.Option([], "--snr", help="Extra SNR values added to the default grid"),
    workers: int = typer.Option(settings.workers, "--workers", help="Parallel cells"),
    seed: int = typer.Option(0, "--seed", help="Base seed (SUBPIX_SEED overrides)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Report CSV (default bench_<kind>.csv)"),
    timing: bool = typer.Option(True, "--timing/--no-timing", help="Include wall_time and threads columns"),
):
    """Run a benchmark grid and write the report CSV plus a gnuplot table."""
    seed = _resolve_seed(seed)
    out = out or Path(f"bench_{kind.value}.csv")
    try:
        cells = _bench_cells(kind, list(snr), samples, seed)
        report = BenchmarkRunner(workers=workers).run(cells, methods)
        write_bench_csv(report, out, timing=timing)
        write_gnuplot(report, out.with_suffix(".dat"))
    except (SubpixError, OSError) as e:
        _fail(str(e))
    except ValidationError as e:
        _fail(f"invalid benchmark grid: {e.errors()[0]['msg']}")

    _print_summary(report)
    console.print(f"{len(report)} rows -> {out}")


@cli.command()
def stats(
    image_path: Path = typer.Argument(..., metavar="IMAGE", help="Input PGM image"),
    edge_class: str = typer.Option("image", "--edge-class", help="Label for the report row"),
    out: Optional[Path] = typer.Option(None, "--out", help="Consistency CSV"),
):
    """Region consistency statistics over 7x7 edge windows."""
    try:
        image = load_grayscale(image_path)
        edges = detect_edges(sobel_gradients(image), settings.th_l, settings.th_h, settings.n_p)
        report = assumption2_stats(image, edges, edge_class)
        if out is not None:
            write_consistency_csv(report, out)
    except (SubpixError, OSError) as e:
        _fail(str(e))

    if report.no_regions:
        console.print(f"{edge_class}: no regions (edge_pixels={report.total_edge_pixels})")
    else:
        console.print(
            f"{edge_class}: edge_pixels={report.total_edge_pixels}, regions={report.regions}, "
            f"passing={report.passing}, ratio={report.ratio:.2%}"
        )


if __name__ == "__main__":
    cli()
