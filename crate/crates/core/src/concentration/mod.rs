//! Tail bounds for order statistics and quantiles, problem complexity, and
//! Monte-Carlo validation of the bounds.

pub mod bounds;
pub mod complexity;
pub mod validate;

pub use bounds::{
    epsilon_for_gamma, implied_gamma_right, os_left_radius, os_right_radius,
    quantile_epsilon_bound, quantile_left_radius, quantile_n_form_bound,
    quantile_n_form_bound_unrestricted, quantile_radii, quantile_right_radius, EpsilonBound,
    OsBoundParams, QuantileBoundParams, TailPair,
};
pub use complexity::{
    min_budget_for_bound, problem_complexity, qsar_error_bound, ArmHardness, BoundVariant,
    ComplexityReport, ComplexityTerm,
};
pub use validate::{
    estimate_bias_constant, mc_expected_order_statistic, mc_expected_spacing, mc_validate_os_tail,
    mc_validate_quantile_tail, write_reports_csv, BiasEstimate, McEstimate, Side, TailCheck,
    TailReport, CSV_HEADER,
};
