import pytest

import helpers


@pytest.fixture
def table1():
    return helpers.table1_dataset()


@pytest.fixture
def fig_vtree():
    return helpers.fig_vtree()


@pytest.fixture
def golden():
    """Circuit learned from the worked example with the pinned clustering."""
    return helpers.golden_circuit()


@pytest.fixture
def reference():
    """The same circuit built by hand (shared input units)."""
    return helpers.reference_circuit()
