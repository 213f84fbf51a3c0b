"""Exact Graev norms, free seminorms, torus generators and lattice-quotient checks."""

from .core import (
    LinComb,
    PointedSpace,
    SpaceMismatchError,
    SpaceShapeError,
    ValidationReport,
    Violation,
    Word,
    letter,
    pair_word,
    validate_space,
    word_combine,
    word_to_lincomb,
)
from .embedding import (
    AmbientModel,
    AmbientVector,
    LatticeElement,
    ZeroLatticeElement,
    circle_period_check,
    density_witness,
    lattice_min_norm,
    quotient_distance_bounds,
    separation_check,
    separation_sweep,
    tilde_distance,
    xi_vector,
)
from .freelcs import (
    DualityError,
    DualWitness,
    FlowCertificate,
    TUReport,
    dual_witness,
    free_seminorm,
    solve_seminorm,
    tu_check,
)
from .graev import (
    LipschitzPreconditionError,
    MatchingCertificate,
    OracleBoundError,
    brute_force_norm,
    graev_distance,
    graev_norm,
    graev_norm_family,
    homomorphic_extension_check,
)
from .numeric import Enclosure
from .rolewicz import (
    ApproximationContradiction,
    ConstructionError,
    GeneratorCertificate,
    OmegaTorusModel,
    TruncationFloorError,
    approximate_target,
    construct_generator,
    verify_certificate,
)
from .torus import (
    Angle,
    InconclusiveError,
    TorusPoint,
    circle_distance,
    independence_check,
    kronecker_search,
    net_check,
    orbit_net_check,
    torus_distance,
)

__version__ = "0.1.0"
