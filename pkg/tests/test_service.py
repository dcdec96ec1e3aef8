"""HTTP service: session lifecycle, response bodies, caching, error shapes."""

import io as iolib
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from mceus import io
from mceus.flow import extract_time_series
from mceus.model import CineLoop, PipelineConfig
from mceus.phantom import (
    BindingParams,
    Ellipse,
    FlowParams,
    LeakagePatch,
    MotionParams,
    PhantomSpec,
    generate,
)
from mceus.pipeline import run_pipeline
from mceus.service import create_app

ROI_BODY = {
    "version": 1,
    "rois": [
        {"label": "lesion", "polygon": [[16, 7], [28, 7], [28, 17], [16, 17]]},
        {"label": "normal", "polygon": [[2, 2], [14, 2], [14, 22], [2, 22]]},
    ],
}


def demo_loop() -> CineLoop:
    spec = PhantomSpec(
        width=32,
        height=24,
        n_frames=36,
        frame_rate_hz=2.0,
        bolus_arrival_index=6,
        lesion=Ellipse(22, 12, 6, 5),
        vessels=(Ellipse(8, 6, 4, 2),),
        leakage_patches=(LeakagePatch(Ellipse(8, 17, 3, 2), 0.5),),
        flow=FlowParams(amplitude=0.5, tau_s=3.0, fill_probability=0.8),
        binding=BindingParams(plateau=0.4, tau_s=4.0),
        leakage_motion=MotionParams(jitter_px=0, intermittency=0.0),
        noise_sigma=0.01,
        seed=5,
    )
    loop, _ = generate(spec)
    return loop


@pytest.fixture(scope="module")
def data_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    io.save_cine_loop(demo_loop(), root / "demo", bit_depth=16)
    bad = root / "broken.json"
    bad.write_text("{not json")
    return root


@pytest.fixture(scope="module")
def stored_loop(data_root):
    # what the service actually sees: the loop after its trip through PGM files
    return io.load_cine_loop(data_root / "demo" / "manifest.json")


@pytest.fixture(scope="module")
def client(data_root):
    return TestClient(create_app(data_root))


@pytest.fixture()
def session_id(client):
    resp = client.post("/v1/sessions", json={"manifest": "demo/manifest.json"})
    assert resp.status_code == 201
    return resp.json()["id"]


class TestHealth:
    def test_health(self, client):
        resp = client.get("/v1/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok"}


class TestSessions:
    def test_create_returns_descriptor(self, client):
        resp = client.post("/v1/sessions", json={"manifest": "demo/manifest.json"})
        assert resp.status_code == 201
        body = resp.json()
        assert body["n_frames"] == 36
        assert body["width"] == 32
        assert body["height"] == 24
        assert body["pre_contrast"] == {"start": 0, "end": 5}
        assert body["bolus_arrival_index"] == 6
        assert body["id"]

    def test_absolute_path_rejected(self, client, data_root):
        resp = client.post("/v1/sessions", json={"manifest": str(data_root / "demo/manifest.json")})
        assert resp.status_code == 400
        assert "relative" in resp.json()["error"]

    def test_traversal_rejected(self, client):
        resp = client.post("/v1/sessions", json={"manifest": "../../../etc/passwd"})
        assert resp.status_code == 400
        assert resp.json()["error"]

    def test_missing_manifest_404(self, client):
        resp = client.post("/v1/sessions", json={"manifest": "nowhere/manifest.json"})
        assert resp.status_code == 404

    def test_malformed_body_rejected(self, client):
        resp = client.post("/v1/sessions", json={"nope": 1})
        assert resp.status_code == 400
        resp = client.post(
            "/v1/sessions", content=b"plainly not json", headers={"Content-Type": "application/json"}
        )
        assert resp.status_code == 400

    def test_unreadable_manifest_422(self, client):
        resp = client.post("/v1/sessions", json={"manifest": "broken.json"})
        assert resp.status_code == 422
        assert resp.json()["error"]

    def test_unknown_session_404(self, client):
        resp = client.get("/v1/sessions/deadbeef/quality")
        assert resp.status_code == 404
        assert "unknown session" in resp.json()["error"]


class TestEnhancedFrames:
    def test_png_matches_pipeline_output(self, client, session_id, stored_loop):
        resp = client.get(f"/v1/sessions/{session_id}/enhanced/3?method=minip&window=5")
        assert resp.status_code == 200
        assert resp.headers["content-type"] == "image/png"
        img = np.asarray(Image.open(iolib.BytesIO(resp.content)))
        expected = run_pipeline(stored_loop, PipelineConfig(method="minip", window_w=5))
        assert np.array_equal(img, io.quantize(expected[3], 8).astype(np.uint8))

    def test_repeat_request_is_byte_identical(self, client, session_id):
        url = f"/v1/sessions/{session_id}/enhanced/0?alpha=2.0"
        first = client.get(url)
        second = client.get(url)
        assert first.status_code == second.status_code == 200
        assert first.content == second.content

    def test_out_of_range_index_422(self, client, session_id):
        resp = client.get(f"/v1/sessions/{session_id}/enhanced/999")
        assert resp.status_code == 422
        assert "out of range" in resp.json()["error"]

    def test_bad_params_422(self, client, session_id):
        resp = client.get(f"/v1/sessions/{session_id}/enhanced/0?alpha=abc")
        assert resp.status_code == 422
        resp = client.get(f"/v1/sessions/{session_id}/enhanced/0?method=bogus")
        assert resp.status_code == 422
        resp = client.get(f"/v1/sessions/{session_id}/enhanced/0?window=1")
        assert resp.status_code == 422
        resp = client.get(f"/v1/sessions/{session_id}/enhanced/0?leakage=maybe")
        assert resp.status_code == 422


class TestQuality:
    def test_reports_spread_and_totals(self, client, session_id, stored_loop):
        resp = client.get(f"/v1/sessions/{session_id}/quality")
        assert resp.status_code == 200
        body = resp.json()
        assert body["spread_ratio"] >= 1.0
        assert len(body["per_frame_totals"]) == stored_loop.n_frames
        assert body["per_frame_totals"][7] == pytest.approx(float(stored_loop.frames[7].sum()))

    def test_degenerate_reference_maps_to_422(self, client, data_root):
        frames = np.zeros((8, 6, 6))
        frames[4:] = 0.5
        dark = CineLoop(frames=frames, frame_rate_hz=1.0, pre_contrast=(0, 2), bolus_arrival_index=3)
        io.save_cine_loop(dark, data_root / "dark")
        resp = client.post("/v1/sessions", json={"manifest": "dark/manifest.json"})
        assert resp.status_code == 201
        resp = client.get(f"/v1/sessions/{resp.json()['id']}/quality")
        assert resp.status_code == 422
        assert "degenerate" in resp.json()["error"]


class TestRois:
    def test_put_then_get_round_trips(self, client, session_id):
        resp = client.put(f"/v1/sessions/{session_id}/rois", json=ROI_BODY)
        assert resp.status_code == 204
        resp = client.get(f"/v1/sessions/{session_id}/rois")
        assert resp.status_code == 200
        body = resp.json()
        assert body["version"] == 1
        got = {entry["label"]: entry["polygon"] for entry in body["rois"]}
        assert got["lesion"] == [[16.0, 7.0], [28.0, 7.0], [28.0, 17.0], [16.0, 17.0]]
        assert set(got) == {"lesion", "normal"}

    def test_get_before_put_404(self, client, session_id):
        resp = client.get(f"/v1/sessions/{session_id}/rois")
        assert resp.status_code == 404

    def test_invalid_rois_422(self, client, session_id):
        url = f"/v1/sessions/{session_id}/rois"
        resp = client.put(url, json={"version": 1, "rois": [{"label": "x"}]})
        assert resp.status_code == 422
        too_few = {"version": 1, "rois": [{"label": "lesion", "polygon": [[0, 0], [5, 5]]}]}
        resp = client.put(url, json=too_few)
        assert resp.status_code == 422
        outside = {"version": 1, "rois": [{"label": "lesion", "polygon": [[0, 0], [99, 0], [5, 5]]}]}
        resp = client.put(url, json=outside)
        assert resp.status_code == 422

    def test_non_json_body_400(self, client, session_id):
        resp = client.put(
            f"/v1/sessions/{session_id}/rois",
            content=b"rois!",
            headers={"Content-Type": "application/json"},
        )
        assert resp.status_code == 400


class TestMetrics:
    def test_requires_rois(self, client, session_id):
        resp = client.get(f"/v1/sessions/{session_id}/metrics")
        assert resp.status_code == 422
        assert "rois" in resp.json()["error"]

    def test_report_matches_library(self, client, session_id):
        client.put(f"/v1/sessions/{session_id}/rois", json=ROI_BODY)
        resp = client.get(f"/v1/sessions/{session_id}/metrics?baseline=raw&eval_index=4")
        assert resp.status_code == 200
        body = resp.json()
        assert body["evaluation_index"] == 4
        assert body["contrast_ratio"] == body["lesion_mean"] / max(body["normal_mean"], 1e-6)
        assert "improvement_factor" in body
        assert body["baseline"]["contrast_ratio"] > 0

    def test_bad_baseline_422(self, client, session_id):
        client.put(f"/v1/sessions/{session_id}/rois", json=ROI_BODY)
        resp = client.get(f"/v1/sessions/{session_id}/metrics?baseline=zzz")
        assert resp.status_code == 422

    def test_out_of_range_eval_index_422(self, client, session_id):
        client.put(f"/v1/sessions/{session_id}/rois", json=ROI_BODY)
        resp = client.get(f"/v1/sessions/{session_id}/metrics?eval_index=999")
        assert resp.status_code == 422


class TestTimeseries:
    def test_pixel_series(self, client, session_id, stored_loop):
        resp = client.get(f"/v1/sessions/{session_id}/timeseries?x=8&y=6&method=minip&window=5")
        assert resp.status_code == 200
        rows = resp.json()
        expected = extract_time_series(stored_loop, pixel=(8, 6), method="minip", spec=5)
        assert len(rows) == len(expected)
        assert rows[0][0] == expected[0][0]
        assert rows[0][1] == pytest.approx(expected[0][1], abs=1e-12)

    def test_roi_series(self, client, session_id):
        client.put(f"/v1/sessions/{session_id}/rois", json=ROI_BODY)
        resp = client.get(f"/v1/sessions/{session_id}/timeseries?roi_label=lesion&method=none")
        assert resp.status_code == 200
        assert len(resp.json()) == 36

    def test_pixel_and_label_exclusive(self, client, session_id):
        client.put(f"/v1/sessions/{session_id}/rois", json=ROI_BODY)
        resp = client.get(f"/v1/sessions/{session_id}/timeseries?x=1&y=1&roi_label=lesion")
        assert resp.status_code == 422
        resp = client.get(f"/v1/sessions/{session_id}/timeseries")
        assert resp.status_code == 422
        resp = client.get(f"/v1/sessions/{session_id}/timeseries?x=1")
        assert resp.status_code == 422

    def test_unknown_label_422(self, client, session_id):
        client.put(f"/v1/sessions/{session_id}/rois", json=ROI_BODY)
        resp = client.get(f"/v1/sessions/{session_id}/timeseries?roi_label=ghost")
        assert resp.status_code == 422
        assert "ghost" in resp.json()["error"]

    def test_window_longer_than_loop_422(self, client, session_id):
        resp = client.get(f"/v1/sessions/{session_id}/timeseries?x=1&y=1&window=200")
        assert resp.status_code == 422
        assert "shorter than window" in resp.json()["error"]

    def test_out_of_bounds_pixel_422(self, client, session_id):
        resp = client.get(f"/v1/sessions/{session_id}/timeseries?x=500&y=1")
        assert resp.status_code == 422


class TestCors:
    def test_cross_origin_viewer_is_allowed(self, client):
        resp = client.get("/v1/health", headers={"Origin": "http://localhost:5173"})
        assert resp.status_code == 200
        assert resp.headers["access-control-allow-origin"] == "*"


class TestErrorShape:
    def test_errors_are_json_objects_with_error_key(self, client, session_id):
        for resp in (
            client.get("/v1/sessions/missing/quality"),
            client.get(f"/v1/sessions/{session_id}/enhanced/0?alpha=nope"),
            client.post("/v1/sessions", json={"manifest": "/abs/path"}),
        ):
            body = resp.json()
            assert set(body) == {"error"}
            assert isinstance(body["error"], str) and body["error"]
