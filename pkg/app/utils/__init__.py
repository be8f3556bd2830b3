"""
Utility functions module
"""

from app.utils.pgm import decode_pgm, encode_pgm, load_grayscale, save_pgm, quantize
from app.utils.profiles import erf_edge, erf_pixels, step_pixels, erf_cdf_integral
from app.utils.reports import (
    write_points_csv, write_truth_csv, write_bench_csv,
    write_gnuplot, write_consistency_csv, render_overlay,
)

__all__ = [
    "decode_pgm", "encode_pgm", "load_grayscale", "save_pgm", "quantize",
    "erf_edge", "erf_pixels", "step_pixels", "erf_cdf_integral",
    "write_points_csv", "write_truth_csv", "write_bench_csv",
    "write_gnuplot", "write_consistency_csv", "render_overlay",
]
