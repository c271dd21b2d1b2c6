//! Entropy of PL maps by lap counting, subshifts of finite type with
//! prescribed entropy, and word counts on the skew-product model.
//!
//! Every entropy is an [`EntropyInterval`] with rational endpoints. Floating
//! point enters only inside logarithms and is rounded outward.

mod bracket;
mod lap;
mod product;
mod sft;

pub use bracket::{
    ln_big, ln_big_up, ln_down, ln_up, log_spectral_bracket, perron_bracket, recurrent_blocks, EntropyInterval, Rows,
};
pub use lap::{entropy_lap, golden_markov_map, lap_count, lap_data, LapData, INTERVAL_BUDGET};
pub use product::{product_entropy_check, ProductReport, ProductRow};
pub use sft::{
    sft_entropy, sft_with_entropy, sft_with_entropy_budget, word_count, word_count_matrix, Clock, RealizedSft, Sft,
    BRACKET_WIDTH, MAX_ITER, STATE_BUDGET,
};
