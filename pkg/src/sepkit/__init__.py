"""Separation bounds for random point sets in high dimension.

Samplers for the distribution families the bounds cover, log-space bound
calculators, empirical separability checks with an exact LP oracle,
one-shot linear correctors for legacy decision rules, and a Monte Carlo
harness verifying that empirical frequencies dominate the bounds.
"""

from .bounds import (
    BallBoundParams,
    BoundResult,
    CubeBoundParams,
    MaxM,
    ball_angle,
    ball_max_m_pairwise,
    ball_max_m_simple,
    ball_max_m_single,
    ball_pairwise,
    ball_single,
    cascade_bound,
    cube_layer_probability,
    cube_max_m_pairwise,
    cube_max_m_single,
    cube_pairwise,
    cube_pairwise_simplified,
    cube_single,
    cube_single_simplified,
    hoeffding,
)
from .corrector import (
    CorrectionAudit,
    Corrector,
    LegacyModel,
    audit_corrector,
    build_corrector,
    corrected_decision,
)
from .experiments import (
    Fig2Config,
    Fig2Table,
    ValidationCell,
    ValidationTable,
    run_bound_validation,
    run_cascade_examples,
    run_fig2,
    run_remark1,
)
from .geometry import (
    Bernoulli,
    DiscreteMixture,
    DistributionSpec,
    LayerGeometry,
    SampleSet,
    UniformInterval,
    ball_spec,
    concentration_radius_sq,
    cube_spec,
    empirical_mean_and_r0,
    product_spec,
    read_binary,
    read_csv,
    sample_ball,
    sample_cube,
    sample_product,
    spawn_rng,
    write_binary,
    write_csv,
)
from .separability import (
    CascadeSeparator,
    LinearFunctional,
    OracleDecision,
    PointVerdict,
    SeparationReport,
    WhiteningTransform,
    cascade_separate,
    check_all_pairs,
    check_point_separable,
    fisher_functional,
    fisher_report,
    oracle_separable,
    whiten,
)

__version__ = "0.1.0"
