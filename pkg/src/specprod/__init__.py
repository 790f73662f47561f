"""specprod: desk-scale laboratory for products of spectral projections.

Submodules
----------
linalg        dense symmetric spectral core (projections, functional
              calculus, Schatten norms, kernel equivalence)
hankel        model Hankel/Carleman operator machinery and its bounds
schrodinger   1D Dirichlet-box pair and the projection products
scattering    2x2 scattering matrices, eigenphases, limit constants
experiments   sweep drivers and verification checks
tables, config, cli   file formats and the command-line surface
"""

__version__ = "0.1.0"

from .errors import ContractError, DomainError, InputError, NumericalError
from .linalg import (
    SchattenIndex,
    SpectralDecomposition,
    SpectralWindow,
    SymmetricOperator,
    apply_function,
    eigendecompose,
    kernel_equiv_check,
    schatten_norm,
    spectral_projection,
    trace_function,
)
from .hankel import (
    HankelModel,
    LaplaceGrid,
    build_gamma_operator,
    build_laplace_matrix,
    carleman_symbol,
    commutator_hs_check,
    gamma_eigen_counting,
    gamma_kernel,
    gamma_moment_constant,
    gamma_trace_moment,
    hankel_schatten_bound_check,
    laptev_safarov_check,
    pi_moment_constant,
)
from .schrodinger import (
    Grid1D,
    Potential,
    ProjectionProduct,
    Regularizer,
    build_hamiltonians,
    build_pi1,
    build_pi1_windowed,
    build_pi2,
)
from .scattering import (
    ScatteringData,
    eigenphases,
    limit_constant,
    limit_density,
    logdet_constant,
    transfer_matrix_smatrix,
)
from .experiments import (
    FactorizedPerturbation,
    Functional,
    HankelSweepSystem,
    SchrodingerSweepSystem,
    ToyFlowModel,
    TraceSeries,
    VerificationReport,
    default_toy_model,
    epsilon_sweep,
    factorization_check,
    localization_check,
    logdet_experiment,
    run_verify_suite,
    sandwich_check,
    toy_kernel_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
