"""Deformations of algebras encoded as codifferentials on free coalgebras.

Lie and L∞ structures live on the symmetric coalgebra of W = ΠV, associative
and A∞ structures on the tensor coalgebra.  Everything is exact over the
rationals and truncated at a weight cap.
"""

from .basealg import BaseAlgebra, Generator, free_truncated, quotient
from .coderiv import (Coderivation, CoderivationAlgebra, bracket, big_d, is_codifferential,
                      structure_coderivation)
from .cohomology import CohomologyReport, cohomology
from .deform import Deformation, factor_through, mc_defect, miniversal, push_out
from .graded import GradedSpace
from .harrison import ha, universal_infinitesimal_extension
from .io import AlgebraInput, MiniversalReport, parse_input, run, serialize

__all__ = [
    "AlgebraInput", "BaseAlgebra", "Coderivation", "CoderivationAlgebra", "CohomologyReport",
    "Deformation", "Generator", "GradedSpace", "MiniversalReport", "big_d", "bracket",
    "cohomology", "factor_through", "free_truncated", "ha", "is_codifferential", "mc_defect",
    "miniversal", "parse_input", "push_out", "quotient", "run", "serialize",
    "structure_coderivation", "universal_infinitesimal_extension",
]

__version__ = "0.1.0"
