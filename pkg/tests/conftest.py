import pytest

from beambvp.examples import load_example


@pytest.fixture(scope="session")
def p51():
    return load_example("5.1").problem


@pytest.fixture(scope="session")
def p52():
    return load_example("5.2").problem


@pytest.fixture(scope="session")
def p53():
    return load_example("5.3").problem


@pytest.fixture(scope="session")
def p54():
    return load_example("5.4").problem


@pytest.fixture(scope="session")
def cfg53():
    return load_example("5.3")
