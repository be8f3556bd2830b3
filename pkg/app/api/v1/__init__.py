from app.api.v1 import detect

__all__ = ["detect"]
