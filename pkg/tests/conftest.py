import json
import os

import pytest

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def oracles():
    with open(os.path.join(DATA, "oracles.json")) as fh:
        return json.load(fh)


def cz(v):
    return complex(v[0], v[1])
