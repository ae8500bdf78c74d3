"""Certified cohomology invariants of the compact complex manifolds built
from a number field and a subgroup of its units.

The pipeline: build_field isolates and orders the embeddings with ball
enclosures, validate_subgroup certifies the unit conditions, then
enumerate_spectrum decides which subset characters are trivial. On top of
the spectrum sit the Betti assembly, the twisted variants, the metric
admissibility test with its distinguished twist class, and a consistency
suite that cross-checks every identity the outputs must satisfy.
"""

from .characters import (
    IndexSet,
    SpectrumConfig,
    TrivialitySpectrum,
    TrivialityVerdict,
    certify_trivial,
    enumerate_spectrum,
    oracle_spectrum,
    screen_trivial,
    sigma_value,
)
from .cohomology import (
    BettiVector,
    LckReport,
    ThetaClass,
    betti_numbers,
    chern_vanishing_range,
    consistency_suite,
    is_lck_admissible,
    lck_betti_shortcut,
    lee_class,
    lee_pairs,
    lee_twisted_shortcut,
    trivializing_twist,
    twisted_betti,
    twisted_spectrum,
)
from .embeddings import NumberField, build_field, eval_embedding, refine
from .errors import ConsistencyError, InputError
from .units import AlgebraicNumber, UnitSubgroup, norm, validate_subgroup

__version__ = "0.1.0"

__all__ = [
    "AlgebraicNumber",
    "BettiVector",
    "ConsistencyError",
    "IndexSet",
    "InputError",
    "LckReport",
    "NumberField",
    "SpectrumConfig",
    "ThetaClass",
    "TrivialitySpectrum",
    "TrivialityVerdict",
    "UnitSubgroup",
    "betti_numbers",
    "build_field",
    "certify_trivial",
    "chern_vanishing_range",
    "consistency_suite",
    "enumerate_spectrum",
    "eval_embedding",
    "is_lck_admissible",
    "lck_betti_shortcut",
    "lee_class",
    "lee_pairs",
    "lee_twisted_shortcut",
    "norm",
    "oracle_spectrum",
    "refine",
    "screen_trivial",
    "sigma_value",
    "trivializing_twist",
    "twisted_betti",
    "twisted_spectrum",
    "validate_subgroup",
]
