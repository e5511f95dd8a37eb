pub mod adversarial;
pub mod counterexample;
pub mod fit;
pub mod product;
pub mod ratios;

pub use adversarial::{adversarial_pair, knapp_field, PairKind, PairShape};
pub use counterexample::{
    counterexample_exact, counterexample_integrand, counterexample_lhs, counterexample_report,
    counterexample_verdict,
    CounterexampleConfig, CounterexampleReport, CounterexampleValue, Quadrature, Verdict,
};
pub use fit::{fit_exponent, least_squares, log_log_slope, worst_case_per_n, RatioSample, SampleMeta, ScalingFit};
pub use product::{field_signals, for_each_product_mode, product_field, product_norm, ProductMode};
pub use ratios::{bilinear_ratio, strichartz2d_ratio, strichartz3d_ratio};
