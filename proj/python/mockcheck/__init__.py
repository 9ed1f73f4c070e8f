"""Mock-model / mock-data checks for tabular deep-learning pipelines.

Thin wrappers over the compiled core: documents go in as JSON/CSV text,
reports come back as parsed dicts (schema identical to the CLI's --format
json output).
"""

import json as _json
from typing import Any, Dict, Optional, Union

from mockcheck._core import (  # noqa: F401
    MockcheckContractError,
    MockcheckParseError,
    generate_mock_data,
)
from mockcheck import _core

__all__ = [
    "MockcheckContractError",
    "MockcheckParseError",
    "generate_mock_data",
    "mock_model_spec",
    "check_data",
    "check_model",
]

_Doc = Union[str, Dict[str, Any]]


def _as_text(doc: _Doc) -> str:
    if isinstance(doc, str):
        return doc
    return _json.dumps(doc)


def mock_model_spec(model_interface: _Doc, data_interface: _Doc) -> Dict[str, Any]:
    """Derive the mock model spec for the given interfaces."""
    return _json.loads(_core.mock_model_spec(_as_text(model_interface), _as_text(data_interface)))


def check_data(
    csv_text: str,
    label_column: str,
    data_interface: _Doc,
    model_interface: _Doc,
    config: Optional[_Doc] = None,
    seed: int = 42,
    runs: int = 3,
    force_learnability: bool = False,
) -> Dict[str, Any]:
    """Run the data-stage checks on CSV text; returns the report dict."""
    return _json.loads(
        _core.check_data(
            csv_text,
            label_column,
            _as_text(data_interface),
            _as_text(model_interface),
            _as_text(config) if config is not None else "",
            seed,
            runs,
            force_learnability,
        )
    )


def check_model(
    model_spec: _Doc,
    data_interface: _Doc,
    config: Optional[_Doc] = None,
    seed: int = 42,
    runs: int = 3,
    strict_binary_output: bool = False,
) -> Dict[str, Any]:
    """Run the model-stage checks on a model spec; returns the report dict."""
    return _json.loads(
        _core.check_model(
            _as_text(model_spec),
            _as_text(data_interface),
            _as_text(config) if config is not None else "",
            seed,
            runs,
            strict_binary_output,
        )
    )
