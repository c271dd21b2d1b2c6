//! Crookedness decisions and the fold / crooked perturbation operators.

mod arc_check;
mod certify;
mod exact;
mod expansion;
mod fold;
pub mod pattern;
mod perturb;

pub use arc_check::{arc_is_crooked, sublevel_params};
pub use certify::{certify_map_crooked, certify_with, CertifyOptions};
pub use exact::{exactness_certificate, grid_segments};
pub use expansion::{expansion_check, expansion_witness, ExpansionWitness};
pub use fold::{fold_expand, sawtooth, FoldResult};
pub use perturb::{crooked_perturb, crooked_perturb_with, CrookResult, PerturbOptions, PerturbReport};

use num::rational::BigRational;
use serde_json::{json, Value};

use crate::json::rat_to_json;
use crate::pl_tree::{Arc, TreePoint};
use crate::scalar::Scalar;

/// Injective arcs are the only path class enumerated by the checkers.
pub const PATH_CLASS: &str = "injective arcs";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrookStatus {
    Crooked,
    NotCrooked,
}

impl CrookStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CrookStatus::Crooked => "CROOKED",
            CrookStatus::NotCrooked => "NOT_CROOKED",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrookednessVerdict<S> {
    pub status: CrookStatus,
    /// Violating arc for `NotCrooked`.
    pub witness: Option<Arc<S>>,
    /// `(s, t)` realising crookedness for a single-arc verdict.
    pub params: Option<(S, S)>,
    pub requested_eps: S,
    pub certified_eps: S,
    pub delta_net: Option<S>,
    pub eps_internal: Option<S>,
    pub path_class: &'static str,
}

impl<S: Scalar> CrookednessVerdict<S> {
    pub fn is_crooked(&self) -> bool {
        self.status == CrookStatus::Crooked
    }

    pub fn to_json(&self) -> Value {
        let r = |x: &S| rat_to_json(&x.to_ratio());
        let pt = |p: &TreePoint<S>| json!([p.arm, r(&p.radius)]);
        json!({
            "status": self.status.as_str(),
            "witness": self.witness.as_ref().map(|a| Value::Array(a.points().iter().map(pt).collect())),
            "params": self.params.as_ref().map(|(s, t)| json!([r(s), r(t)])),
            "requested_eps": r(&self.requested_eps),
            "certified_eps": r(&self.certified_eps),
            "delta_net": self.delta_net.as_ref().map(r),
            "eps_internal": self.eps_internal.as_ref().map(r),
            "path_class": self.path_class,
        })
    }
}

pub type QVerdict = CrookednessVerdict<BigRational>;
