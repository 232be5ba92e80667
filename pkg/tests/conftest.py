import sys
from pathlib import Path

import pytest
from hypothesis import settings

from causeway import dsl
from causeway.workspace import Workspace, bundled_dir

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def data_dir():
    return bundled_dir()


@pytest.fixture(scope="session")
def ws():
    return Workspace.load()


@pytest.fixture(scope="session")
def cake(ws):
    return ws.models["cake"]


@pytest.fixture(scope="session")
def orgate(ws):
    return ws.models["orgate"]


def model(text):
    return dsl.parse_model(text)
