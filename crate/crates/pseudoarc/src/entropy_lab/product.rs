use num::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::entropy_lab::bracket::{ln_big, EntropyInterval};
use crate::entropy_lab::sft::sft_entropy;
use crate::rees_scaffold::SkewModel;
use crate::report::Check;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductRow {
    pub n: usize,
    pub odometer_words: usize,
    #[serde(with = "crate::json::uint")]
    pub fiber_words: BigUint,
    #[serde(with = "crate::json::uint")]
    pub product_words: BigUint,
    pub odometer_estimate: f64,
    pub fiber_estimate: f64,
    pub product_estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub fiber_entropy: EntropyInterval,
    pub rows: Vec<ProductRow>,
    pub checks: Vec<Check>,
}

impl ProductReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn last(&self) -> &ProductRow {
        self.rows.last().expect("report has rows")
    }
}

fn estimate(count: &BigUint, n: usize) -> f64 {
    ln_big(count) / n as f64
}

/// Word-count entropy estimates for the marker coding, the fibre and the
/// product at each `n`. Checks run at the largest `n`.
pub fn product_entropy_check(model: &SkewModel, ns: &[usize], tol: f64) -> Result<ProductReport> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::Domain("word lengths must be positive".into()));
    }
    let fiber_entropy = sft_entropy(&model.fiber);
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = Vec::new();
    for &n in &sorted {
        let o = model.odometer_word_count(n)?;
        let f = model.fiber_word_count(n)?;
        let p = BigUint::from(o) * &f;
        rows.push(ProductRow {
            n,
            odometer_words: o,
            odometer_estimate: estimate(&BigUint::from(o), n),
            fiber_estimate: estimate(&f, n),
            product_estimate: estimate(&p, n),
            fiber_words: f,
            product_words: p,
        });
    }
    let r = rows.last().unwrap();
    let slack = 2.0 * (model.fiber.states() as f64).ln() / r.n as f64;
    let lower = fiber_entropy.lo() * (r.n - 1) as f64 / r.n as f64;
    let mut checks = vec![
        Check::new(
            "odometer estimate",
            r.odometer_estimate <= tol,
            format!("ln(count)/n = {:.6} at n = {}", r.odometer_estimate, r.n),
        ),
        Check::new(
            "product minus fibre",
            (r.product_estimate - r.fiber_estimate).abs() <= tol,
            format!("{:.6} - {:.6}", r.product_estimate, r.fiber_estimate),
        ),
        Check::new(
            "fibre within bracket",
            r.fiber_estimate >= lower - tol && r.fiber_estimate <= fiber_entropy.hi() + slack + tol,
            format!("{:.6} vs [{:.9}, {:.9}] + {slack:.6}", r.fiber_estimate, fiber_entropy.lo(), fiber_entropy.hi()),
        ),
    ];
    checks.push(Check::new(
        "marginals below product",
        rows.iter().all(|r| r.fiber_estimate <= r.product_estimate + tol && r.odometer_estimate <= r.product_estimate + tol),
        format!("{} word lengths", rows.len()),
    ));
    Ok(ProductReport { fiber_entropy, rows, checks })
}
