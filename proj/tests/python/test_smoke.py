"""End-to-end smoke tests for the Python package."""

import json

import pytest

import mockcheck

DI = {
    "num_features": 4,
    "data_kind": "numeric",
    "task_type": "regression",
    "num_classes": 1,
}
MI = {"architecture_type": "FCNN", "task_type": "regression"}


def test_mock_data_round_trips_through_check_data():
    csv_text = mockcheck.generate_mock_data(json.dumps(DI), seed=7)
    header = csv_text.splitlines()[0]
    assert header == "x0,x1,x2,x3,target"
    assert len(csv_text.splitlines()) == 1 + 10 * DI["num_features"]

    report = mockcheck.check_data(csv_text, "target", DI, MI, seed=7)
    assert report["schema_version"] == 1
    assert report["verdict"] == "pass"
    assert report["findings"] == []
    assert report["stage"] == "data"


def test_mock_model_spec_passes_check_model():
    spec = mockcheck.mock_model_spec(MI, DI)
    assert spec["input_dim"] == DI["num_features"]
    assert spec["loss_kind"] == "mse"

    report = mockcheck.check_model(spec, DI)
    assert report["verdict"] == "pass"
    assert report["findings"] == []


def test_bad_learning_rate_is_flagged():
    spec = mockcheck.mock_model_spec(MI, DI)
    spec["learning_rate"] = -0.5
    report = mockcheck.check_model(spec, DI)
    assert report["verdict"] == "fail"
    assert "learning_rate_out_of_range" in {f["check_id"] for f in report["findings"]}


def test_reports_are_deterministic():
    spec = mockcheck.mock_model_spec(MI, DI)
    first = mockcheck.check_model(spec, DI, seed=3)
    second = mockcheck.check_model(spec, DI, seed=3)
    assert first == second


def test_parse_errors_surface_as_typed_exceptions():
    with pytest.raises(mockcheck.MockcheckParseError):
        mockcheck.check_model("{not json", DI)
    with pytest.raises(mockcheck.MockcheckParseError):
        mockcheck.generate_mock_data(json.dumps({**DI, "task_type": "clustering"}))
