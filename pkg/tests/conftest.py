import dataclasses

import pytest

from plc import RobotDescription, enumerate_workspace


def desc_with(**overrides) -> RobotDescription:
    return dataclasses.replace(RobotDescription(), **overrides)


@pytest.fixture(scope="session")
def default_desc():
    return RobotDescription()


@pytest.fixture(scope="session")
def index_n2():
    return enumerate_workspace(desc_with(segment_count=2))


@pytest.fixture(scope="session")
def index_n3():
    return enumerate_workspace(desc_with(segment_count=3))


@pytest.fixture(scope="session")
def index_n4():
    return enumerate_workspace(desc_with(segment_count=4))


@pytest.fixture(scope="session")
def index_n5(default_desc):
    return enumerate_workspace(default_desc)
