import pytest

from cimsim import DacConfig, MacConfig, TechParams, VariationSpec


@pytest.fixture
def params():
    return TechParams()


@pytest.fixture
def dac_root():
    return DacConfig()


@pytest.fixture
def dac_linear():
    return DacConfig(mode="linear")


@pytest.fixture
def mac_default():
    return MacConfig()


@pytest.fixture
def variation_default():
    return VariationSpec()
