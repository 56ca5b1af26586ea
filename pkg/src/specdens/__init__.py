"""Spectral density estimation for large sparse real symmetric matrices.

Everything works through matrix-vector products: Chebyshev and Legendre
moment methods (with Jackson damping, spectroscopic top-coefficient halving,
per-point delta expansions, Gauss-regularized Legendre coefficients, and a
half-cost product-formula moment scheme), Lanczos quadrature with Gaussian
blurring, Haydock continued fractions, and a monotone spline refinement of
the cumulative density. A dense-eigensolve oracle, error metrics, and a
phonon heat-capacity functional support validation on small problems.
"""

from .compare import (
    ALL_METHODS,
    CHEBYSHEV_METHODS,
    LANCZOS_METHODS,
    LEGENDRE_METHODS,
    MethodComparisonRow,
    analytic_matvec_count,
    estimate_dos,
    run_method_comparison,
)
from .density import (
    DEFAULT_GRID_POINTS,
    EDGE_GUARD,
    RegularizationKernel,
    SpectralDensityEstimate,
    SpectralInterval,
    interval_grid,
    unit_grid,
)
from .dgl import (
    DEFAULT_DGL_TOL,
    DGLCoefficients,
    compute_dgl_coefficients,
    evaluate_dgl_dos,
    gamma_zero,
)
from .errors import NumericalFailure, OracleCapExceeded
from .kpm import (
    DampingKernel,
    MomentSequence,
    compute_chebyshev_moments,
    compute_legendre_moments,
    delta_chebyshev_dos,
    evaluate_chebyshev_series,
    evaluate_kpm_dos,
    evaluate_kpml_dos,
    evaluate_legendre_series,
    jackson_damping,
    moments_to_coefficients,
    moments_via_product_formula,
    spectroscopic_dos,
)
from .lanczos import (
    RitzQuadrature,
    TridiagonalFactorization,
    blur_nodes,
    cdos_dos,
    cdos_refine,
    continued_fraction_resolvent,
    haydock_dos,
    lanczos_dos,
    lanczos_factorize,
    pool_ritz_quadratures,
    prefix_factorization,
    ritz_quadrature,
    ritz_residual_bounds,
    tridiagonal_resolvent_first,
)
from .matrix import (
    DEFAULT_BUMPS,
    MappedOperator,
    MatvecCounter,
    SparseSymmetricMatrix,
    apply_spectral_map,
    as_operator,
    estimate_spectral_interval,
    generate_modified_laplacian_2d,
    load_matrix_market,
    save_matrix_market,
)
from .metrics import (
    ErrorReport,
    PhysicalConstants,
    default_temperatures,
    error_lp,
    error_sup_gaussian,
    heat_capacity,
    phonon_heat_weight,
)
from .reference import (
    DENSE_ORACLE_CAP,
    ExactSpectrum,
    dense_eigensolve,
    eigenvalue_count,
    exact_regularized_dos,
    histogram_dos,
    spectrum_interval,
)
from .stochastic import (
    PROBE_KINDS,
    ProbeVectorSource,
    TraceEstimate,
    estimate_trace_quadratic,
    map_probes,
)

__version__ = "0.1.0"
