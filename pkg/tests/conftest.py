import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from embodiment.clips import load_manifest
from embodiment.metagraph import MetaGraph

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def desk_library():
    return load_manifest(str(FIXTURES / "desk_manifest.json"))


@pytest.fixture(scope="session")
def studio_library():
    return load_manifest(str(FIXTURES / "studio_manifest.json"))


@pytest.fixture()
def desk_graph(desk_library):
    return MetaGraph.from_library(desk_library)


@pytest.fixture()
def studio_graph(studio_library):
    return MetaGraph.from_library(studio_library)
