"""Monte Carlo and quadrature laboratory for the energy variance of
smoothed eigenvalue-counting statistics under the Poisson model of the
primitive geodesic length spectrum, with the GOE variance as target."""

from .numerics import (
    BudgetError,
    QuadratureError,
    QuadratureSpec,
    RngStream,
    TabulatedCdf,
    composite_kronrod,
    integrate,
    poisson_draw,
    sinh_ratio,
)
from .pointprocess import (
    IntensityMeasure,
    LengthConfiguration,
    SamplerBudget,
    campbell_oracle,
    factorial_moment2_oracle,
    intensity_density,
    intensity_mass,
    load_length_file,
    sample,
    save_length_file,
)
from .statistics import (
    EigenvalueList,
    WindowParams,
    energy_average,
    energy_variance_direct,
    kernel_HL,
    kernel_H_L_tau,
    kernel_UT,
    load_eigenvalue_file,
    oscillating_statistic,
    smooth_term,
    spectral_count,
)
from .testfuncs import (
    TestFunction,
    WeightFunction,
    WeightTruncationError,
    closed_form_sigma2,
    make_polynomial_testfn,
    make_weight,
    sigma2_goe,
)
from .variance import (
    MarkSet,
    VarianceDecomposition,
    build_marks,
    d_term,
    diag11_correction,
    diag11_mean_oracle,
    diag11_secondmoment_oracles,
    offdiag_abs_oracle,
    phi,
    phi_brute_force,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    OracleCheck,
    OracleReport,
    ResultRecord,
    SummaryRow,
    default_replicates,
    experiment_stream_index,
    run_oracle_suite,
    run_replicate,
    run_schedule,
)

__version__ = "0.1.0"
