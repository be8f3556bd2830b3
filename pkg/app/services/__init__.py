from app.services.pipeline import LocalizationService
from app.services.evalbench import BenchmarkRunner, run_benchmark

__all__ = ["LocalizationService", "BenchmarkRunner", "run_benchmark"]
