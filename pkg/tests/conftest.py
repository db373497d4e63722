import pytest

from helpers import registry_doc

from reactbench.toolbox import load_registry


@pytest.fixture
def registry():
    return load_registry(registry_doc())
