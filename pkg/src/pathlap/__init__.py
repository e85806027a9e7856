"""Path cohomology, Hodge decompositions, heat flow and lazy walks on digraphs."""

from .complexes import (
    Cochain,
    LinearOperator,
    PathBasis,
    Subspace,
    allowed_subspace,
    build_boundary,
    build_d,
    chain_homology_dim,
    cohomology_dim,
    omega_subspace,
    restricted_d,
)
from .digraph import (
    Digraph,
    DigraphError,
    DistanceTable,
    curvature_bound,
    degree,
    digraph_from_dict,
    enumerate_allowed,
    graph_distance,
    is_allowed,
    parse_digraph,
)
from .heat import (
    evolve,
    green_quadrature,
    harmonic_limit,
    heat_operator,
    spectral_gap,
    stochastic_completeness,
)
from .hodge import (
    green_spectral,
    harmonic_basis,
    harmonic_representative,
    hodge_decompose,
    laplacian,
    vertex_laplacian,
)
from .walk import (
    WALK_BACKEND,
    OrientedState,
    WalkSpaceError,
    expectation_exact,
    expectation_limit,
    expectation_mc,
    lower_laplacian,
    signed_neighbors,
    transition_matrix,
    upper_laplacian,
    weighted_d,
    witness_lower_bound,
)

__version__ = "0.1.0"
