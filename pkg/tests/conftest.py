"""
Configuration file for pytest
"""

import os
import sys
import warnings

import matplotlib
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))
matplotlib.use("Agg")

from src.logic.parser import parse_document  # noqa: E402
from src.logic.signature import Signature  # noqa: E402
from src.structures.structure import Structure  # noqa: E402


def pytest_configure(config):
    """Configure pytest"""
    # Register custom markers
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )


@pytest.fixture(autouse=True)
def reset_warnings():
    """Reset warnings for each test"""
    warnings.simplefilter("always")
    yield
    warnings.simplefilter("default")


@pytest.fixture
def suppress_warnings():
    """Suppress warnings in specific tests if needed"""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


@pytest.fixture
def unary_binary_sig():
    """P/1, R/2"""
    return Signature.build({"P": 1, "R": 2})


@pytest.fixture
def gfu_sig():
    """P/1, R/2 và U"""
    return Signature.build({"P": 1, "R": 2, "U": 2}, universal="U")


@pytest.fixture
def tg_sig():
    """P/1, Q/1, R/2, T transitive"""
    return Signature.build({"P": 1, "Q": 1, "R": 2, "T": 2}, transitive=["T"])


@pytest.fixture
def path_structure(unary_binary_sig):
    """0 -R-> 1 -R-> 2, P(0)"""
    return Structure(unary_binary_sig, 3, [("P", (0,)), ("R", (0, 1)), ("R", (1, 2))])


@pytest.fixture
def parse():
    """parse_document dạng fixture"""
    return parse_document
