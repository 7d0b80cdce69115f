"""
Shared pytest fixtures and configuration
"""

import math

import numpy as np
import pytest

from spinaddress.drive import DriveParams
from spinaddress.sequencer import six_site_fixture
from spinaddress.spectrum import SpectrumParams
from spinaddress.swap import ExchangeLink


@pytest.fixture
def spectrum_params():
    """Default spread: sigma = 60, delta = 10, centered at zero"""
    return SpectrumParams()


@pytest.fixture
def six_site_config(spectrum_params):
    """Six-site array with bins (1, 3, 6, 3, 1, -3)"""
    return six_site_fixture(spectrum_params)


@pytest.fixture
def quarter_turn_drive():
    """Optimal pi/2 drive for delta = 10, ell = 4"""
    return DriveParams.optimal(10.0, math.pi / 2)


@pytest.fixture
def default_link():
    """J_max = 50, delta E_z = 85"""
    return ExchangeLink(j_max=50.0, delta_ez=85.0)


@pytest.fixture
def rng():
    """Seeded generator for test-side randomness"""
    return np.random.default_rng(1234)
