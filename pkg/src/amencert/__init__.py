"""amencert: numerical non-amenability certificates for circle actions.

The toolkit decides, at desk scale, whether a finitely generated group acting
on the circle by C^1 diffeomorphisms can be certified not topologically
amenable from the averaged Hellinger distance between a quasi-invariant
measure and its generator translates versus half the Cayley-graph spectral
gap, and it replays the supporting Hilbert-module constructions
(representations, derivative cocycles, coboundary growth, witness checks)
with explicit tolerances everywhere.
"""

from .errors import (
    AmencertError,
    CapabilityError,
    InputError,
    NumericError,
    PolicyError,
    ResourceError,
    UnsupportedMeasureError,
)
from .groups import (
    CayleyBall,
    GroupSpec,
    Kernel,
    Word,
    ball,
    ball_size,
    convolve,
    generators,
    identity,
    inv,
    lattice_word,
    mul,
    reduce,
    sphere_size,
    word_from_string,
)
from .spectral import (
    CheegerCandidate,
    Lambda1Kind,
    Lambda1Value,
    cheeger_ratio,
    lambda1_dirichlet,
    lambda1_dirichlet_series,
    lambda1_exact,
    rayleigh_quotient,
)
from .circle import (
    ActionSpec,
    CircleDiffeo,
    act,
    c1_distance,
    c1_distance_at,
    compose,
    conjugated_rotation_action,
    diffeo_tolerance,
    identity_diffeo,
    invert,
    make_rotation,
    make_sine_perturbed,
    midpoints,
    periodic_interp,
    rotation_action,
    sine_action,
    translate_function,
)
from .measures import (
    GridMeasure,
    affinity,
    avg_hellinger_sq,
    avg_hellinger_sq_pushforward,
    cocycle_check,
    derivative_identity_defect,
    hellinger,
    integrate,
    l1_distance,
    lebesgue,
    pushforward,
    radon_nikodym,
    test_function_battery,
)
from .modules import (
    CocycleFamily,
    GrowthBounds,
    ModuleVector,
    WitnessReport,
    apply_L,
    apply_pi,
    ball_witness_family,
    build_ball_witness,
    build_folner_witness,
    cocycle_bounds,
    cocycle_defect,
    coboundary,
    constant_witness,
    envelope_shift_defect,
    lattice_interval_family,
    module_inner,
    random_witness,
    scalar_inner,
    support_overlap_radius,
    truncated_rho_bounds,
    verify_witness,
    weight_cocycle,
    weighted_cocycle_defect,
    witness_defect,
)
from .certify import (
    CertificateReport,
    EvidenceReport,
    NearIsometryReport,
    ReplayReport,
    certify_generator_derivative,
    certify_hellinger,
    near_isometry_check,
    positive_definite_kernel,
    properness_evidence,
    replay_chain,
)

__version__ = "0.1.0"
