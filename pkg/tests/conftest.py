import pytest

from support import rips_for


@pytest.fixture
def hexagon():
    return rips_for("cyclic:6", 1, 2)


@pytest.fixture
def square():
    return rips_for("cyclic:4", 1, 4)
