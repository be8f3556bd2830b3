"""
Test configuration and fixtures
"""

import numpy as np
import pytest
from fastapi.testclient import TestClient
from typer.testing import CliRunner

from app.main import app
from app.models.image import ImageBuffer
from app.schemas.config import DetectionConfig, SerThresholds
from app.utils.pgm import encode_pgm

# Column profile of a vertical edge at x = 10.3: CIS with sides 200/50 over
# x = 8..13 gives exactly 10.3 (sum of the transition pixels is 220)
OFFSET_EDGE_PROFILE = [200.0] * 10 + [160.0, 60.0] + [50.0] * 12


def column_image(profile, height: int) -> ImageBuffer:
    """Image whose every row equals `profile` (a vertical edge)"""
    return ImageBuffer(np.tile(np.asarray(profile, dtype=np.float64), (height, 1)))


def row_image(profile, width: int) -> ImageBuffer:
    """Image whose every column equals `profile` (a horizontal edge)"""
    return ImageBuffer(np.tile(np.asarray(profile, dtype=np.float64)[:, None], (1, width)))


@pytest.fixture
def step_image() -> ImageBuffer:
    """
    30x20 vertical step: 200 for x <= 14, 50 for x >= 15
    """
    return column_image([200.0] * 15 + [50.0] * 15, height=20)


@pytest.fixture
def offset_edge_image() -> ImageBuffer:
    """24x20 vertical edge at x = 10.3 with flat plateaus on both sides"""
    return column_image(OFFSET_EDGE_PROFILE, height=20)


@pytest.fixture
def crossing_image() -> ImageBuffer:
    """35x35 quadrant checkerboard crossing at (17, 17)"""
    data = np.full((35, 35), 50.0)
    data[:17, :17] = 200.0
    data[17:, 17:] = 200.0
    return ImageBuffer(data)


@pytest.fixture
def detection_config() -> DetectionConfig:
    return DetectionConfig()


@pytest.fixture
def ser_thresholds() -> SerThresholds:
    return SerThresholds()


@pytest.fixture
def strict_ser_thresholds() -> SerThresholds:
    """Region thresholds with a tighter endmost-variation limit (th_ev = 5)"""
    return SerThresholds(th_ev=5.0)


@pytest.fixture
def step_pgm(tmp_path, step_image):
    """Step image written as binary PGM"""
    path = tmp_path / "step.pgm"
    path.write_bytes(encode_pgm(step_image))
    return path


@pytest.fixture(scope="function")
def client():
    """
    Create a test client for the HTTP API
    """
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def cli_runner() -> CliRunner:
    return CliRunner()
