from pathlib import Path

import pytest

from core.instance_io import load_instance

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixture_dir():
    return FIXTURES


@pytest.fixture
def f1():
    """a -> b, binary, all four labelings."""
    return load_instance(FIXTURES / "f1_binary_pair.json")


@pytest.fixture
def f2():
    """Two x_i -> x_i' pairs, every x_i' labeled 1."""
    return load_instance(FIXTURES / "f2_pair_family.json")


@pytest.fixture
def f3():
    """a -> b, labels z1 < z2 < z3, all nine labelings."""
    return load_instance(FIXTURES / "f3_multiclass_pair.json")


@pytest.fixture
def f4():
    """f3 with the move a -> b costing 1.5."""
    return load_instance(FIXTURES / "f4_weighted_pair.json")
