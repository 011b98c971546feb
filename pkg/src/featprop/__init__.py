"""Feature Propagation: graph-harmonic reconstruction of missing node features."""
from .baselines import (
    global_mean_fill,
    label_propagation,
    neighbor_mean_fill,
    predict,
    random_fill,
    zero_fill,
)
from .energy import (
    dirichlet_energy,
    fixed_point_residual,
    high_frequency_fraction,
    spectral_energy_profile,
)
from .exact import (
    SpectralBasis,
    closed_form_solve,
    graph_fourier_transform,
    laplacian_eigendecomposition,
    spectral_radius_submatrix,
    steady_state,
)
from .graph import (
    ComponentLabeling,
    Graph,
    GraphError,
    build_graph,
    connected_components,
    spmm,
)
from .propagation import (
    ConvergenceTrace,
    PropagationConfig,
    euler_step,
    feature_propagate,
    fp_step,
    initialize_unknown,
)

__version__ = "0.1.0"
