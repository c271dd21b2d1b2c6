//! Rectangles, families and the A-conditions over the odometer Cantor set,
//! plus the skew-product model `(x, c) -> (x + 1, σ c)`.
//!
//! Cubes are symbolic: a rectangle is its odometer cylinder together with a
//! box id recording the lineage of its cube, and `Y ⊂ Int X` is strict
//! lineage descent with strict cylinder containment. Families too large to
//! list are [`OrbitFamily`] values and are decided on residue sets.
//!
//! The remaining conditions of the construction quantify over
//! homeomorphisms of the limit space and are recorded here without a
//! runnable check:
//!
//! - B1: for `n > 0` the support of `h_n` lies in `𝔰(ℰ^{n-1}_{(n-1)})`.
//! - B2: `h_n` commutes with `R` along edges of `𝒢(ℰ^{n-1}_{(n-1)})`.
//! - B3: `mesh ψ_{n-1}^{-1}(ℰ^{n+1}_{(n)} \ ℰ^{n-1}_{(n)}) -> 0`.
//! - B5: `K_X × C ⊂ ψ_n^{-1}(Int X)` for `X` in `ℰ^0_{(n)}`.
//! - B6: along first-return paths of `𝒢(ℰ^n_{(n)})`, `g_n^q(x, c) = (R^q x, σ^q c)`.
//! - B7: nested chains `𝒞_n` with `mesh ψ_n^{-1}(𝒞_n) < 2^{-n}` shrinking to the pseudo-arc.
//! - C1, C2: as B1, B2 for `H_n` over `ℰ^{n-1}_{(n)}`.
//! - C5: `H_n` preserves `h_n ψ_n({x} × C)` for `x` in `K`.
//! - C6: along paths of `𝒢(ℰ^n_{(n)})`, `G_n^q(x, c) = (R^q x, σ^q c)`.
//! - C7, C8: waste-bin collection of orbits leaving `O_n` into the `P^{(n)}_i`.
//!
//! B6 and C6 survive as the defining identity of [`SkewModel::act`].

mod family;
mod generate;
mod model;
mod orbit;
mod rect;

pub use family::{
    build_graph, compatible, q_iterable, q_iterable_verdict, refines, refines_verdict, Compatibility, IterationGraph,
    Verdict,
};
pub use generate::{family_at, generate_e, verify_families, Generated, CROSS_CHECK};
pub use model::{fiber_words, model_system, SkewModel};
pub use orbit::{children_counts, orbit_acyclic, orbit_compatible, orbit_q_iterable, orbit_refines, OrbitFamily};
pub use rect::{BoxId, BoxLevel, Rectangle, RectangleFamily, EXPLICIT_BUDGET};
