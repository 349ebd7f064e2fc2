"""Exact torsion-growth workbench for cyclic covers of Heegaard manifolds."""

__version__ = "0.1.0"

from .ringcore import CycElem, LaurentPoly
from .hermitian import FormMatrix, SurfaceModel, transvection
from .mahler import mahler_measure, kronecker_zero_test
from .homology import cover_homology, growth_scan, heegaard_homology, smith_normal_form
from .walks import WalkConfig, run_walk

__all__ = [
    "CycElem",
    "LaurentPoly",
    "FormMatrix",
    "SurfaceModel",
    "transvection",
    "mahler_measure",
    "kronecker_zero_test",
    "cover_homology",
    "growth_scan",
    "heegaard_homology",
    "smith_normal_form",
    "WalkConfig",
    "run_walk",
    "__version__",
]
