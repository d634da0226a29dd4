import pytest

from lattice_spectra.dispersion import DiscreteLaplacian


@pytest.fixture(scope="session")
def lap():
    return DiscreteLaplacian()
