"""Spiked-eigenvalue limits, support sets and estimators for high-dimensional
Fisher matrices."""

from ._core import (  # noqa: F401
    AggregateReport,
    AllExcluded,
    AspectRatios,
    AtomCollision,
    BadDimension,
    CompanionRoot,
    DegenerateDenominator,
    EigenSample,
    EntryDistribution,
    Error,
    Histogram,
    MHatResult,
    NoCriticalPoint,
    NoRoot,
    NotOutsideSupport,
    PopulationSpec,
    ReplicationRecord,
    SimulationConfig,
    SingularS2,
    SpectralMeasure,
    Spike,
    SpikeAggregate,
    SpikeClassification,
    SpikeEstimate,
    SpikeGroupConfig,
    SpikeKind,
    StieltjesPair,
    StreamRng,
    SupportSet,
    ZeroDenominator,
    ZeroEigenvalue,
    __version__,
    build_lambda,
    condition_ii,
    draw_matrix,
    empirical_m_hat,
    empirical_m_underline_hat,
    estimate_spike_at,
    estimate_spike_group,
    fisher_eigenvalues,
    is_distant_spike,
    load_eigen_sample,
    load_simulation_config,
    lsd_support,
    phase_transition_limit,
    population_m_pair,
    psi,
    psi_prime,
    run_monte_carlo,
    run_replication,
    save_eigenvalues,
    sigma1_sqrt,
    solve_m0,
    toeplitz_eigvecs,
    write_report,
)
