import math

import pytest

from gouysim import cli
from gouysim.lens_design import AtomParams, CavityLensParams

TWO_PI = 2 * math.pi


@pytest.fixture(scope="session")
def paper_atom():
    return AtomParams(
        mass=1.44e-25,
        v_z=50.0,
        omega_i=0.0,
        omega_g=TWO_PI * (299792458.0 / 5.8e-3 + 3.2e9),
        omega_e=TWO_PI * (2 * 299792458.0 / 5.8e-3 + 3.2e9 - 3.0e7),
    )


@pytest.fixture(scope="session")
def paper_cavity():
    return CavityLensParams(
        wavelength=5.8e-3,
        photon_number=3e6,
        rabi_per_photon=TWO_PI * 47e3,
        detuning_g=-TWO_PI * 3.0e7,
        detuning_i=TWO_PI * 3.2e9,
        interaction_time=2e-4,
        quality_factor=4e6,
    )


@pytest.fixture(scope="session")
def default_config():
    return cli.parse_config("")


@pytest.fixture(scope="session")
def default_setup(default_config):
    return default_config.interferometer_setup()
