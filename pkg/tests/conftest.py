from pathlib import Path

import pytest

from cloudrisk import build_matrix, formats

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "cloudrisk" / "data"


@pytest.fixture(scope="session")
def cloud_project():
    return formats.load_project(DATA_DIR / "cloud_project.json")


@pytest.fixture(scope="session")
def knife_project():
    return formats.load_project(DATA_DIR / "knife_edge_project.json")


@pytest.fixture
def example_matrix():
    """The worked-example 3x3 judgment matrix [[1,3,5],[1/3,1,2],[1/5,1/2,1]]."""
    return build_matrix(3, [(0, 1, 3.0), (0, 2, 5.0), (1, 2, 2.0)])
