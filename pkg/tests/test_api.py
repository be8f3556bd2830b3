"""
HTTP API endpoint tests
"""

import numpy as np
import pytest
from starlette.concurrency import run_in_threadpool

from app.api.v1 import detect as detect_routes
from app.models.image import ImageBuffer
from app.utils.pgm import encode_pgm


def upload(data: bytes, name: str = "step.pgm") -> dict:
    return {"file": (name, data, "image/x-portable-graymap")}


@pytest.mark.api
class TestGeneral:
    """Test root and health endpoints"""

    def test_root(self, client):
        response = client.get("/")

        assert response.status_code == 200
        assert response.json()["status"] == "running"

    def test_health(self, client):
        response = client.get("/health")

        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert data["service"] == "subpix-api"


@pytest.mark.api
class TestDetectEndpoint:
    """Test POST /api/v1/detect"""

    def test_detect_plain_cis(self, client, step_pgm):
        response = client.post("/api/v1/detect", files=upload(step_pgm.read_bytes()))

        assert response.status_code == 200
        data = response.json()
        assert data["method"] == "cis"
        assert (data["width"], data["height"]) == (30, 20)
        assert data["edgePixels"] == 12
        assert len(data["points"]) == 12
        assert all(p["x"] == pytest.approx(14.5) for p in data["points"])
        assert {p["source"] for p in data["points"]} == {"cis"}

    def test_detect_with_regions(self, client, step_pgm):
        response = client.post("/api/v1/detect", params={"method": "cis+ser"}, files=upload(step_pgm.read_bytes()))

        assert response.status_code == 200
        data = response.json()
        assert data["method"] == "cis+ser"
        assert data["regions"] == 1
        assert data["points"]

    def test_localization_runs_in_worker_thread(self, client, step_pgm, monkeypatch):
        """Test that the pipeline is handed to the thread pool, off the event loop"""
        offloaded = []

        async def recording(func, *args, **kwargs):
            offloaded.append(func.__name__)
            return await run_in_threadpool(func, *args, **kwargs)

        monkeypatch.setattr(detect_routes, "run_in_threadpool", recording)
        response = client.post("/api/v1/detect", files=upload(step_pgm.read_bytes()))
        stats = client.post("/api/v1/stats", files=upload(step_pgm.read_bytes()))

        assert response.status_code == stats.status_code == 200
        assert offloaded == ["execute", "_consistency_report"]

    def test_ascii_upload(self, client, step_image):
        response = client.post("/api/v1/detect", files=upload(encode_pgm(step_image, binary=False)))

        assert response.status_code == 200
        assert response.json()["edgePixels"] == 12

    def test_unknown_method(self, client, step_pgm):
        response = client.post("/api/v1/detect", params={"method": "sobel"}, files=upload(step_pgm.read_bytes()))

        assert response.status_code == 422

    def test_garbage_upload(self, client):
        response = client.post("/api/v1/detect", files=upload(b"not an image", name="x.pgm"))

        assert response.status_code == 422
        assert "Invalid PGM image" in response.json()["detail"]

    def test_sixteen_bit_upload(self, client):
        """Test that maxval above 255 is rejected"""
        response = client.post("/api/v1/detect", files=upload(b"P2\n2 2\n65535\n0 1 2 3\n"))

        assert response.status_code == 422
        assert "maxval" in response.json()["detail"]

    def test_missing_file(self, client):
        response = client.post("/api/v1/detect")

        assert response.status_code == 422

    def test_image_too_small(self, client):
        """Test that an image below 3x3 is a bad request"""
        response = client.post("/api/v1/detect", files=upload(encode_pgm(ImageBuffer(np.zeros((2, 2))))))

        assert response.status_code == 400
        assert "Detection failed" in response.json()["detail"]


@pytest.mark.api
class TestStatsEndpoint:
    """Test POST /api/v1/stats"""

    def test_straight_edge(self, client, step_pgm):
        response = client.post("/api/v1/stats", params={"edgeClass": "step"}, files=upload(step_pgm.read_bytes()))

        assert response.status_code == 200
        data = response.json()
        assert data["edgeClass"] == "step"
        assert data["totalEdgePixels"] == 12
        assert data["ratio"] == 1.0
        assert data["noRegions"] is False

    def test_flat_image(self, client):
        flat = encode_pgm(ImageBuffer(np.full((20, 20), 80.0)))
        response = client.post("/api/v1/stats", files=upload(flat))

        assert response.status_code == 200
        data = response.json()
        assert data["noRegions"] is True
        assert data["detail"] == "no regions"
