"""Principal angles between random subspaces, spectra of polynomials in two
projections, and the free-probability limit laws of those spectra."""
from .blocks import (
    BlockDecomposition,
    SpectrumWithMultiplicity,
    block_structure,
    blocks_from_angles,
    eigs_p_plus_qpq,
    exact_spectrum,
    spectrum_anticommutator,
    spectrum_commutator,
    spectrum_pqp,
    spectrum_sum,
)
from .laws import (
    ACPiece,
    BernoulliParams,
    Branch,
    SpectralLaw,
    angle_law,
    anticommutator_law,
    anticommutator_law_half,
    arcsine_law,
    boxplus_bernoulli,
    boxplus_edges,
    boxtimes_bernoulli,
    boxtimes_edges,
    commutator_law,
    p_plus_qpq_law,
    p_plus_qpq_pushforward,
    pushforward,
    uniform_angle_law,
    uniform_law,
)
from .montecarlo import (
    EmpiricalDistribution,
    ExperimentConfig,
    convergence_report,
    empirical_spectrum,
    histogram,
    ks_distance,
    limit_law_for,
    w1_distance,
)
from .ncpoly import NCParseError, NCPolynomial, P, Q, evaluate, evaluate_on_angle_block, format_ncpoly, parse_ncpoly
from .subspace import (
    PrincipalAngleSpectrum,
    PrincipalVectorPair,
    Subspace,
    generic_dims,
    haar_subspace,
    planted_pair,
    principal_angles,
    principal_vectors,
    projector,
    rng_stream,
)

__version__ = "0.1.0"
