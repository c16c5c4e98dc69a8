"""Numerical and exact checks for almost Hermitian manifolds with vanishing Bochner tensor."""

__version__ = "0.1.0"

from .bochner import bochner_package, phi, q_tensor
from .manifold import ChartManifold, curvature_package, validate
from .zoo import zoo

__all__ = ["__version__", "ChartManifold", "bochner_package", "curvature_package", "phi",
           "q_tensor", "validate", "zoo"]
