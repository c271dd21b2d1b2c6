//! Diagonal towers of crooked maps, truncated inverse limits and chain
//! covers of the arc.

mod base;
mod build;
mod chain;
mod io;
mod limit;

pub use base::{base_map, build_base_map, flattening_deviation, BaseMapContract, Flattening};
pub use build::{
    build_tower, schedule_bound, schedule_check, Estimate, ScheduleEntry, StageCertificate, Tower, TowerSpec,
    TowerStrategy, PATTERN_LAP_BUDGET,
};
pub use chain::{chain_cover_arc, mesh, ChainCover, Diam, Link};
pub use io::{load_tower, save_tower, verify_tower, Check};
pub use limit::{
    eps_map_bound, eps_map_check, eps_map_formula, rotation_orbit_check, shift_on_truncation, unshift_on_truncation, EpsMapReport,
    LimitPoint,
};
