import numpy as np
import pytest

from gnlab.gridfn import FamilyKind, FamilySpec, sample_family


@pytest.fixture(scope="session")
def gauss1d():
    spec = FamilySpec(FamilyKind.GAUSSIAN, (1.0,), (0.0,))
    return sample_family(spec, ((-8.0, 8.0),), (4097,))


@pytest.fixture(scope="session")
def gauss2d():
    spec = FamilySpec(FamilyKind.GAUSSIAN, (1.0,), (0.0, 0.0))
    return sample_family(spec, ((-6.0, 6.0), (-6.0, 6.0)), (513, 513))


@pytest.fixture(scope="session")
def bump1d():
    spec = FamilySpec(FamilyKind.BUMP, (1.0,), (0.0,))
    return sample_family(spec, ((-2.5, 2.5),), (2049,))


@pytest.fixture(scope="session")
def sine_bump1d():
    spec = FamilySpec(FamilyKind.SINE_BUMP, (1.4, 3.3), (0.0,))
    return sample_family(spec, ((-2.5, 2.5),), (2049,))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
