import pytest


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("BKS_CACHE_DIR", str(tmp_path / "cache"))
