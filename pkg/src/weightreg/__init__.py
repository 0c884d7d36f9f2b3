"""Weight-regular partitions of graphs via the Perron eigenvector."""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    Graph,
    GraphFormatError,
    GraphValidationError,
    VertexPartition,
    generate,
    is_bipartite,
    is_connected,
    load_edge_list,
    load_partition,
    save_edge_list,
    save_partition,
)
from .spectra import (  # noqa: E402
    NotConnectedError,
    PerronVector,
    SpectralData,
    eigendecompose,
    is_spectrum_symmetric,
    perron_vector,
)
from .partitions import (  # noqa: E402
    coarsest_weight_regular_refinement,
    is_regular_partition,
    lemma1_check,
    quotient_matrices,
    weight_degree,
    weight_intersection_numbers,
    weighted_view,
)
from .characterizations import (  # noqa: E402
    characterize,
    commutation_test,
    interlacing_report,
    omega_membership,
    polynomial_identity_test,
    tightness_implies_weight_regular_check,
    weight_hoffman_polynomial,
)
from .chromatic import audit_hoffman, exact_chromatic, hoffman_bound, verify_proposition3  # noqa: E402
