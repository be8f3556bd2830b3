"""
Base record with common helpers
"""

from dataclasses import fields
from enum import Enum
from typing import Any, Dict


class RecordMixin:
    """Mixin for flat dataclass records that are written to CSV/JSON"""

    def to_dict(self) -> Dict[str, Any]:
        """Convert record instance to dictionary (enums flattened to their values)"""
        result = {}
        for field in fields(self):
            value = getattr(self, field.name)
            result[field.name] = value.value if isinstance(value, Enum) else value
        return result
