import numpy as np
import pytest

from bochnerlab.bochner import bochner_package
from bochnerlab.manifold import curvature_package
from bochnerlab.zoo import NAMES, default_point, zoo


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def zoo_packages():
    """Curvature and Bochner packages at each zoo manifold's default point."""
    out = {}
    for name in NAMES:
        M = zoo(name)
        pkg = curvature_package(M, default_point(name, M.n))
        out[name] = (M, pkg, bochner_package(pkg))
    return out
