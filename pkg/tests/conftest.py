import pytest

from pcgl.cli import fixture_path, load_presentation


@pytest.fixture(scope="session")
def weyl():
    return load_presentation(fixture_path("weyl"))[0]


@pytest.fixture(scope="session")
def pplane():
    return load_presentation(fixture_path("pplane"))[0]


@pytest.fixture(scope="session")
def bellsig():
    return load_presentation(fixture_path("bellsig"))[0]


@pytest.fixture(scope="session")
def m2():
    return load_presentation(fixture_path("m2"))[0]
