import pytest

import slicemarket
from slicemarket.model import load_scenario


@pytest.fixture(scope="session")
def table1():
    return load_scenario(slicemarket.table1_path())
