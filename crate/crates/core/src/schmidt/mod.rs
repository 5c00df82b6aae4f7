//! Gcd-restricted interval systems `E_n`, the surrogate `F*` and the
//! quantities used to bound its variance.

mod arcs;
mod audit;
mod config;
mod fstar;
mod overlap;
mod phi;
mod variance;

pub use arcs::{en_arcs, en_intersection, en_measure_formula, ArcSet};
pub use audit::{fmt_big, BoundAudit};
pub use config::SchmidtConfig;
pub use fstar::{f_star, in_en, l1_distance_exact, FStarEvaluator, L1Report};
pub use overlap::{
    avg_overlap_audit, avg_overlap_sum, avg_overlap_sum_brute, overlap_brute, overlap_count, overlap_measure_audit,
    overlap_measure_check, overlap_sweep, OverlapCheck, AVG_OVERLAP_LIMIT,
};
pub use phi::{phi_brute, phi_deficits, phi_moment_audit, phi_t};
pub use variance::{variance_components, variance_mc, VarianceComponents, VarianceReport, MIN_SAMPLES, SUPPORT_LIMIT};
