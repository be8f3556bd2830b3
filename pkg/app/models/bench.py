"""
Benchmark report records
"""

from dataclasses import dataclass, field
from typing import List, Optional

import pandas as pd

from app.models.base import RecordMixin


@dataclass(frozen=True)
class BenchRow(RecordMixin):
    kind: str
    k_g: Optional[int]
    snr: Optional[float]
    sigma_l: Optional[float]
    slope: Optional[int]
    method: str
    metric: float
    samples: int
    points: int
    wall_time: float
    threads: int = 1


@dataclass
class BenchReport:
    """One row per benchmark cell x method"""

    rows: List[BenchRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def to_frame(self) -> pd.DataFrame:
        columns = [name for name in BenchRow.__dataclass_fields__]
        return pd.DataFrame([row.to_dict() for row in self.rows], columns=columns)

    def metric_column(self, method: str) -> List[float]:
        return [row.metric for row in self.rows if row.method == method]
