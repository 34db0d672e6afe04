"""Independence of sequences, liaison and freeness criteria over finite local algebras."""

from __future__ import annotations

__version__ = "0.1.0"

from .algebra import (AlgebraMorphism, AlgebraPresentation, Ideal, LocalAlgebra, build_algebra,
                      check_local_morphism, complete_intersection_data, is_complete_intersection)
from .errors import (CapExceeded, Disagreement, HypothesisFailed, IndepForgeError, ParseError,
                     PreconditionFailed, TheoremFalsified, ValidationError)
from .field import Field
from .freeness import (certify_balanced, certify_desmit, certify_max_independent, certify_special_fiber,
                       certify_strong_independence_freeness, check_generation_shift,
                       decompose_presentation, lower_bound_check)
from .independence import census, is_independent, is_strongly_independent, relation_submodule
from .koszul import build_koszul, construct_homotopy, independence_via_koszul
from .linkage import fitting_ideal, verify_liaison
from .module import (FpModule, algebra_as_module, base_change, direct_sum, free_module, freeness_oracle,
                     minimal_presentation, module_from_cokernel, quotient_ideal_module, restrict_scalars,
                     torsion_ratio)


def ring(field, variables, relations=(), truncation=2, order="degrevlex", max_dim=512) -> LocalAlgebra:
    """Shorthand for ``build_algebra(AlgebraPresentation.from_strings(...))``."""
    return build_algebra(AlgebraPresentation.from_strings(field, variables, relations, truncation, order),
                         max_dim=max_dim)
