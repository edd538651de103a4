"""Golden-request suite for the wire protocol."""

import hashlib
import json

import pytest
from fastapi.testclient import TestClient

from detector_shim.app import create_app
from detector_shim.model import DetectorModel, ModelLoadError


@pytest.fixture(scope="module")
def model(tiny_model_dir):
    return DetectorModel(tiny_model_dir)


@pytest.fixture(scope="module")
def client(model):
    return TestClient(create_app(model, max_chars=200))


def sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.text == "ok"


def test_valid_request(client):
    response = client.post("/detect", json={"text": "hello"})
    assert response.status_code == 200
    payload = response.json()
    assert 0.0 <= payload["prob_machine"] <= 1.0
    assert payload["echo_sha256"] == sha("hello")


def test_malformed_json_is_400(client):
    response = client.post(
        "/detect", content=b"not json", headers={"Content-Type": "application/json"}
    )
    assert response.status_code == 400


def test_missing_text_is_400(client):
    assert client.post("/detect", json={"length": 5}).status_code == 400


def test_non_string_text_is_400(client):
    assert client.post("/detect", json={"text": 17}).status_code == 400


def test_non_object_body_is_400(client):
    assert client.post("/detect", json=["text"]).status_code == 400


def test_oversize_text_is_413(client):
    assert client.post("/detect", json={"text": "x" * 201}).status_code == 413


def test_cyrillic_checksum_roundtrip(client):
    attacked = "tеll mе а tаlе"
    response = client.post(
        "/detect",
        content=json.dumps({"text": attacked}, ensure_ascii=False).encode("utf-8"),
        headers={"Content-Type": "application/json; charset=utf-8"},
    )
    assert response.status_code == 200
    assert response.json()["echo_sha256"] == sha(attacked)


def test_no_normalization_attack_changes_checksum_and_score(client):
    plain = "tell me a tale"
    attacked = "tеll mе а tаlе"
    r_plain = client.post("/detect", json={"text": plain}).json()
    r_attacked = client.post("/detect", json={"text": attacked}).json()
    assert r_plain["echo_sha256"] != r_attacked["echo_sha256"]
    assert r_attacked["echo_sha256"] == sha(attacked)


def test_stateless_identical_responses(client):
    a = client.post("/detect", json={"text": "the cat sat"}).json()
    b = client.post("/detect", json={"text": "the cat sat"}).json()
    assert a == b


def test_empty_text_allowed(client):
    response = client.post("/detect", json={"text": ""})
    assert response.status_code == 200
    assert response.json()["echo_sha256"] == sha("")


def test_machine_label_resolution(tiny_model_dir):
    assert DetectorModel(tiny_model_dir).machine_index == 1  # "Fake"
    assert DetectorModel(tiny_model_dir, machine_label="Real").machine_index == 0
    assert DetectorModel(tiny_model_dir, machine_label=0).machine_index == 0
    with pytest.raises(ModelLoadError):
        DetectorModel(tiny_model_dir, machine_label="NoSuchLabel")


def test_missing_model_fails_loudly(tmp_path):
    with pytest.raises(ModelLoadError):
        DetectorModel(str(tmp_path / "missing"))
