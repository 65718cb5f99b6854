import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from widthjump import parse_domain, parse_instance, toys


@pytest.fixture(scope="session")
def bw_domain():
    return parse_domain(toys.BLOCKSWORLD_DOMAIN)


@pytest.fixture(scope="session")
def gripper_domain():
    return parse_domain(toys.GRIPPER_DOMAIN)


@pytest.fixture(scope="session")
def delivery_domain():
    return parse_domain(toys.DELIVERY_DOMAIN)


@pytest.fixture(scope="session")
def spanner_domain():
    return parse_domain(toys.SPANNER_DOMAIN)


@pytest.fixture()
def bw3(bw_domain):
    text = toys.blocksworld_instance([["a", "b"], ["c"]], [["c", "b", "a"]], name="bw3")
    return parse_instance(text, bw_domain)


@pytest.fixture()
def bw2(bw_domain):
    text = toys.blocksworld_instance([["a"], ["b"]], [["b", "a"]], name="bw2")
    return parse_instance(text, bw_domain)


@pytest.fixture()
def gripper2(gripper_domain):
    return parse_instance(toys.gripper_instance(2), gripper_domain)


@pytest.fixture()
def delivery1(delivery_domain):
    return parse_instance(toys.delivery_toy(1), delivery_domain)


@pytest.fixture()
def spanner_small(spanner_domain):
    return parse_instance(toys.spanner_instance(3, [1, 2], 1, name="spanner-small"), spanner_domain)


@pytest.fixture()
def spanner_degenerate(spanner_domain):
    return parse_instance(toys.spanner_degenerate(), spanner_domain)
