import logging

import numpy as np
import pytest

from core.errors import ArgumentError
from core.models.model_router import get_model, get_supported_models
from utils.logger import resolve_level, setup_logging
from utils.rng import derive_rng, normalize_seed
from utils.serialization import complex_matrix_from_json, dumps


def test_derived_streams_are_keyed():
    first = derive_rng(42, 1, 2).standard_normal(4)
    np.testing.assert_array_equal(first, derive_rng(42, 1, 2).standard_normal(4))
    assert not np.allclose(first, derive_rng(42, 2, 1).standard_normal(4))
    assert normalize_seed(-1) == (1 << 64) - 1


def test_resolve_level(monkeypatch):
    monkeypatch.delenv("MSPE_LOG_LEVEL", raising=False)
    assert resolve_level() == "INFO"
    monkeypatch.setenv("MSPE_LOG_LEVEL", "debug")
    assert resolve_level() == "DEBUG"
    assert resolve_level("warning") == "WARNING"
    assert resolve_level("verbose") == "INFO"


def test_setup_logging_writes_file(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    setup_logging("INFO", str(log_file))
    logging.getLogger("core.test").info("registro de teste")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "registro de teste" in log_file.read_text(encoding="utf-8")
    for handler in list(logging.getLogger().handlers):
        if isinstance(handler, logging.FileHandler):
            logging.getLogger().removeHandler(handler)
            handler.close()


def test_json_encoding_of_numpy_values():
    text = dumps({"z": np.array([[1 + 2j]]), "n": np.int64(3), "x": np.float64(0.5)})
    assert '"n": 3' in text
    assert '"x": 0.5' in text
    with pytest.raises(ValueError):
        complex_matrix_from_json([[1.0, 2.0, 3.0]])


def test_model_router():
    assert get_supported_models() == [
        "dual-unitary", "local-haar", "kicked-ising", "mixed-field-ising", "global-haar-state",
    ]
    assert get_model("kicked-ising").randomized is False
    assert get_model("mixed-field-ising").integer_time is False
    assert get_model("mixed-field-ising").dense_propagator is True
    assert get_model("local-haar").dense_propagator is False
    with pytest.raises(ArgumentError):
        get_model("heisenberg")
