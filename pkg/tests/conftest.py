import pytest

from conjointrisk import reference
from conjointrisk.schema import default_schema


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def ref_design(schema):
    return reference.reference_design(schema)


@pytest.fixture(scope="session")
def ref_plan():
    return reference.reference_plan()


@pytest.fixture(scope="session")
def ref_beta():
    return dict(reference.REFERENCE_COEFFICIENTS)
