import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from src.complex_core import from_facets  # noqa: E402


@pytest.fixture
def three_edge_complex():
    """[12][14][23] on four variables: f = (1,4,3), e = (0,-2,3)."""
    return from_facets(4, [[1, 2], [1, 4], [2, 3]])


@pytest.fixture
def hlrank_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HLRANK_OUTPUT_ROOT", str(tmp_path / "outputs"))
    monkeypatch.setenv("HLRANK_MAX_WORKERS", "2")
    monkeypatch.delenv("HLRANK_SIZE_CAP", raising=False)
    monkeypatch.delenv("HLRANK_MAX_ENTRIES", raising=False)
    monkeypatch.delenv("HLRANK_SEED", raising=False)
    monkeypatch.delenv("HLRANK_SERIES_DEGREE", raising=False)
    return tmp_path / "outputs"
