"""HTTP 接口"""
import json
import os

import pytest
from fastapi.testclient import TestClient

from app import app
from app.settings.config import config
from app.utils.errors import ConfigError

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")


@pytest.fixture
def client(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "OUTPUT_DIR", str(tmp_path))
    return TestClient(app)


def _load(name):
    with open(os.path.join(CONFIG_DIR, name), "r", encoding="utf-8") as f:
        return json.load(f)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["data"] == {"status": "healthy", "service": config.APP_NAME}
    assert body["pagination"] is None


def test_root_lists_stages(client):
    body = client.get("/").json()
    assert body["data"]["stages"][0] == "check-structure"
    assert len(body["data"]["stages"]) == 6


def test_list_models(client):
    response = client.get("/analysis/models")
    assert response.status_code == 200
    names = {entry["name"] for entry in response.json()["data"]}
    assert {"burgers", "unstable_front", "navier_stokes"} <= names


def test_invalid_config_rejected(client):
    raw = _load("burgers.json")
    raw["numerics"]["foo"] = 1
    response = client.post("/analysis/run", json=raw)
    assert response.status_code == 422
    body = response.json()
    assert body["success"] is False
    assert body["code"] == ConfigError.code
    assert any(item["loc"] == "numerics.foo" for item in body["data"]["witness"])


def test_unknown_stage_rejected(client):
    response = client.post("/analysis/run", json=_load("burgers.json"), params={"stages": ["evans", "nope"]})
    assert response.status_code == 422
    assert "nope" in response.json()["message"]


def test_spinodal_run(client, tmp_path):
    response = client.post("/analysis/run", json=_load("ns_spinodal.json"))
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["report"]["verdicts"]["structure_certified"] is False
    assert data["output_dir"].startswith(os.path.join(os.path.realpath(tmp_path), "reports"))
    assert os.path.exists(os.path.join(data["output_dir"], "report.json"))


@pytest.mark.parametrize("requested", ["../escaped", "/tmp/elsewhere", "nested/../../escaped", "."])
def test_output_dir_must_stay_under_reports(client, tmp_path, requested):
    raw = _load("ns_spinodal.json")
    raw["output_dir"] = requested
    response = client.post("/analysis/run", json=raw)
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == 4000
    assert body["data"]["witness"][0]["loc"] == "output_dir"
    assert not (tmp_path / "escaped").exists()


def test_relative_output_dir_is_resolved_under_reports(client, tmp_path):
    raw = _load("ns_spinodal.json")
    raw["output_dir"] = "custom/run"
    response = client.post("/analysis/run", json=raw)
    assert response.status_code == 200
    expected = os.path.join(os.path.realpath(tmp_path), "reports", "custom", "run")
    assert response.json()["data"]["output_dir"] == expected
    assert os.path.exists(os.path.join(expected, "report.json"))
