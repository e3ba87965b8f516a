import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

DATA = Path(__file__).parent / "data"

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def pinned():
    return json.loads((DATA / "pinned.json").read_text())


@pytest.fixture(scope="session")
def oracles():
    return json.loads((DATA / "oracles.json").read_text())
