import json
from pathlib import Path

import numpy as np
import pytest

from rydmis.instances import instance_from_dict, six_node_demo
from rydmis.model import Register

REPO_ROOT = Path(__file__).resolve().parent.parent

# Eight maximum independent sets of the bundled six-node instance, frozen
# from an exhaustive scan of all 2^6 subsets.
SIX_NODE_OPTIMA = {
    frozenset(s)
    for s in [(0, 3), (1, 3), (0, 4), (1, 4), (2, 4), (0, 5), (1, 5), (2, 5)]
}


@pytest.fixture(scope="session")
def six_node_dict():
    return six_node_demo()


@pytest.fixture(scope="session")
def six_node_path():
    return str(REPO_ROOT / "instances" / "six_node_demo.json")


@pytest.fixture(scope="session")
def six_node_instance(six_node_dict):
    return instance_from_dict(six_node_dict)


@pytest.fixture()
def write_instance(tmp_path):
    def _write(data, name="instance.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return _write


@pytest.fixture()
def pair_register():
    def _make(dist):
        return Register(np.array([[0.0, 0.0], [dist, 0.0]]))

    return _make
