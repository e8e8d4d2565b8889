import pytest

from src.rules import standard_system


@pytest.fixture(scope="session")
def system():
    return standard_system()


@pytest.fixture(scope="session", autouse=True)
def _no_ambient_config():
    with pytest.MonkeyPatch.context() as mp:
        for name in ("STAIRTILE_TILE_BUDGET", "STAIRTILE_SEED", "STAIRTILE_OUTPUT_DIR", "STAIRTILE_CONFIG"):
            mp.delenv(name, raising=False)
        yield
