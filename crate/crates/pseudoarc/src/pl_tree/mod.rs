//! Trees with the arc-length metric and exact piecewise-linear maps.

pub mod json;
pub mod map;
pub mod path;
pub mod subtree;
pub mod tree;

pub use json::{map_from_json, map_from_str, map_to_json, map_to_string};
pub use map::PLMap;
pub use path::Breaks;
pub use subtree::Subtree;
pub use tree::{metric_dist, metric_dist_on, Arc, Tree, TreePoint};

use crate::scalar::Scalar;

/// Tent map `x -> min(2x, 2 - 2x)` on the 2-arm tree, i.e. `u -> min(2u + 1, 1 - 2u)`.
pub fn tent<S: Scalar>() -> PLMap<S> {
    let one = S::one();
    PLMap::from_signed_graph(&[(-one.clone(), -one.clone()), (S::zero(), one.clone()), (one.clone(), -one)])
        .expect("tent")
}

/// Odd N-shaped map of slope 3 through `(-1,-1), (-1/3,1), (1/3,-1), (1,1)`.
pub fn n_map<S: Scalar>() -> PLMap<S> {
    let one = S::one();
    let third = S::ratio(1, 3);
    PLMap::from_signed_graph(&[
        (-one.clone(), -one.clone()),
        (-third.clone(), one.clone()),
        (third, -one.clone()),
        (one.clone(), one),
    ])
    .expect("n-map")
}
