//! The pair correlation function `F(α, s, X) = N⁻¹ #{a != b : ‖α(a − b)‖ <= s/N}`.

mod alpha;
mod corr;
mod sandwich;

pub use alpha::{norm_dist, norm_dist_exact, AlphaValue};
pub(crate) use alpha::Window;
pub use corr::{
    corr_scan, mean_corr_exact, mean_corr_mc, pair_corr_direct, pair_corr_via_r, sample_alpha, CorrelationParams,
    CorrelationValue, SampleStats, ScanRow,
};
pub use sandwich::{
    check_sandwich, sandwich_len, sandwich_ratio, sandwich_schedule, SandwichCheck, SandwichRow, SandwichSchedule,
};
