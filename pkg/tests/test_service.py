import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from wavebracket.io import signal_to_json
from wavebracket.service.app import app
from wavebracket.signal import AnalyticSignal

client = TestClient(app)


def test_health():
    r = client.get("/health")
    assert r.status_code == 200 and r.json() == {"status": "ok"}


def test_lattice_quincunx():
    r = client.post("/lattice", json={"dilation": {"entries": [[1, 1], [1, -1]]}})
    assert r.status_code == 200
    body = r.json()
    assert body["index_m"] == 2
    assert body["coset_reps"] == [[0, 0], [1, 0]]
    assert body["character_defect"] < 1e-10


def test_lattice_validation_error():
    r = client.post("/lattice", json={"dilation": {"entries": [[1, 0], [0, 1]]}})
    assert r.status_code == 422
    assert r.json()["error"] == "NotExpanding"


def test_embedding_endpoint():
    r = client.post("/lattice/embedding",
                    json={"dilation": {"entries": [[2]]}, "level": 1})
    assert r.status_code == 200
    body = r.json()
    assert body["matrix"] == [[0.5]]
    assert body["ann_basis"] == [[2.0]]


def test_bracket_time_builtin():
    req = {
        "f": {"kind": "builtin", "name": "haar", "part": "phi"},
        "g": {"kind": "builtin", "name": "haar", "part": "phi"},
    }
    r = client.post("/bracket/time", json=req)
    assert r.status_code == 200
    taps = r.json()["bracket"]["taps"]
    assert taps == [{"index": [0], "re": 1.0, "im": 0.0}]


def test_bracket_fourier_shannon():
    spec = signal_to_json(AnalyticSignal.box([-0.5], [0.5], domain="frequency"))
    r = client.post("/bracket/fourier", json={"p": spec, "q": spec, "grid_M": 64})
    assert r.status_code == 200
    body = r.json()
    vals = np.array([re for re, im in body["torus"]["values"]])
    assert np.max(np.abs(vals - 1.0)) < 1e-12
    assert body["torus"]["complete"] is True
    assert body["provenance"]["grid_M"] == 64


def test_bridge_endpoint():
    req = {
        "f": {"kind": "builtin", "name": "haar", "part": "phi"},
        "g": {"kind": "builtin", "name": "haar", "part": "psi0"},
    }
    r = client.post("/bracket/bridge", json=req)
    assert r.status_code == 200
    assert r.json()["deviation"] < 1e-8


def test_filters_extract_builtin():
    r = client.post("/filters/extract", json={"builtin": "haar"})
    assert r.status_code == 200
    bank = r.json()["bank"]
    mags = sorted(abs(t["re"]) for t in bank["h"]["taps"])
    assert mags == pytest.approx([2 ** -0.5, 2 ** -0.5], abs=1e-12)
    assert "index_convention" in bank


def test_filters_extract_shannon_fourier():
    r = client.post("/filters/extract", json={"builtin": "shannon", "fourier": True})
    assert r.status_code == 200
    body = r.json()
    M = body["h_hat"]["n_samples"][0]
    zeta = -0.5 + np.arange(M) / M
    vals = np.array([re for re, im in body["h_hat"]["values"]])
    off = np.min(np.abs(zeta[:, None] - np.array([[-0.25, 0.25]])), axis=1) > 2 / M
    want = math.sqrt(2) * ((zeta >= -0.25) & (zeta < 0.25))
    assert np.max(np.abs(vals - want)[off]) < 1e-8


def test_cascade_endpoint_and_divergence():
    r = client.post("/cascade", json={"builtin": "haar", "iters": 2,
                                      "grid": False})
    assert r.status_code == 200
    body = r.json()
    assert body["converged"] is True and body["step_l2"][0] < 1e-12
    # identity filter on a grid concentrates mass: numeric failure -> 409
    bad = {
        "h": {"dim": 1, "taps": [{"index": [0], "re": 1.0, "im": 0.0}]},
        "dilation": {"entries": [[2]]},
        "iters": 12,
        "grid": True,
        "half_width": 4.0,
        "n_samples": 1024,
    }
    r2 = client.post("/cascade", json=bad)
    assert r2.status_code == 409
    assert r2.json()["error"] == "Divergence"


def test_norms_endpoint():
    req = {
        "signal": {"kind": "builtin", "name": "haar", "part": "phi"},
        "dilation": {"entries": [[2]]},
        "level": 0,
    }
    r = client.post("/norms/report", json=req)
    assert r.status_code == 200
    body = r.json()
    assert abs(body["x_norm"] - 1.0) < 1e-12
    assert abs(body["l2_norm"] - 1.0) < 1e-12
    assert body["provenance"]["trunc_R"] == 8


def test_norm_chain_endpoint():
    req = {
        "signal": {"kind": "builtin", "name": "haar", "part": "phi"},
        "dilation": {"entries": [[2]]},
        "level": 1,
        "grid_M": 128,
    }
    r = client.post("/norms/chain", json=req)
    assert r.status_code == 200
    body = r.json()
    assert body["lower_ok"] and body["upper_ok"]


def test_verify_endpoint_haar():
    r = client.post("/verify", json={"builtin": "haar", "n_range": [-1, 1],
                                     "grid_M": 128})
    assert r.status_code == 200
    body = r.json()
    assert body["verdict"] == "pass"
    assert body["ortho_residual"] < 1e-8
    assert len(body["reconstruction"]) == 3


def test_verify_endpoint_needs_input():
    r = client.post("/verify", json={})
    assert r.status_code == 422


def test_threads_env_in_provenance(monkeypatch):
    monkeypatch.setenv("BRACKET_MODULE_THREADS", "1")
    r = client.post("/norms/report", json={
        "signal": {"kind": "builtin", "name": "haar", "part": "phi"},
        "dilation": {"entries": [[2]]},
    })
    assert r.json()["provenance"]["threads"] == "1"

