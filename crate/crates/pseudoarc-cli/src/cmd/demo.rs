use anyhow::Result;
use clap::Args;
use num::BigUint;
use pseudoarc::odometer_measure::build_k;
use pseudoarc::odometer_measure::residue::modulus;
use pseudoarc::rees_scaffold::{model_system, SkewModel};
use pseudoarc::report::Check;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{entropy, odometer, rees};
use crate::parse;
use crate::run::Run;

#[derive(Args, Debug)]
pub struct FullDemo {
    #[arg(long)]
    pub rate: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value = "3,9,516")]
    pub kseq: String,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long, default_value_t = 4096)]
    pub nmax: usize,
    /// Sampled points for the skew-action identity.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

impl FullDemo {
    pub fn config(&self) -> Value {
        json!({"rate": self.rate, "tol": self.tol, "kseq": self.kseq, "depth": self.depth, "nmax": self.nmax, "samples": self.samples})
    }

    pub fn run(&self, run: &mut Run, seed: u64) -> Result<()> {
        let ks = parse::kseq(&self.kseq)?;
        let kc = build_k(&ks, ks.len() - 1)?;
        run.write_json("k.json", &kc)?;
        odometer::report(&kc, run)?;
        rees::generate(&kc, self.depth, run)?;
        let r = entropy::realize(self.rate, self.tol, pseudoarc::entropy_lab::STATE_BUDGET, run)?;
        let model = model_system(&kc, &r.sft)?;
        run.check(action_sweep(&model, self.samples, seed)?);
        let rep = entropy::product(&model, self.rate, self.nmax, run)?;
        run.note(
            "result",
            json!({
                "rate": self.rate,
                "fiber_bracket": [rep.fiber_entropy.lo(), rep.fiber_entropy.hi()],
                "estimate": rep.last().product_estimate,
                "n": rep.last().n,
            }),
        );
        Ok(())
    }
}

/// `G^q(x, w)` against `q` single steps at seeded random points.
fn action_sweep(model: &SkewModel, samples: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = model.kc.top_bits();
    let p = modulus(bits);
    let s = &model.fiber;
    for i in 0..samples {
        let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
        rng.fill_bytes(&mut bytes);
        let x = model.point(&(BigUint::from_bytes_le(&bytes) % &p))?;
        let mut w = vec![rng.gen_range(0..s.alphabet)];
        while w.len() < 16 {
            let next = &s.succ[*w.last().unwrap()];
            w.push(next[rng.gen_range(0..next.len())]);
        }
        let q = rng.gen_range(1..=8);
        let direct = model.act(&x, &w, q)?;
        let mut step = (x, w);
        for _ in 0..q {
            step = model.act(&step.0, &step.1, 1)?;
        }
        if direct != step {
            return Ok(Check::new("skew action sweep", false, format!("sample {i}: G^{q} differs from {q} steps")));
        }
    }
    Ok(Check::new("skew action sweep", true, format!("{samples} seeded samples, seed {seed}")))
}
