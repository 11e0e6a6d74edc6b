//! Thin-spectrum constructions: gap opening by phase perturbation, rotation
//! covers, concatenation, one-step refinement and the three tower schedules.

mod cover;
mod gaps;
mod refine;
mod tower;

#[cfg(test)]
mod tests;

pub use cover::{block_layout, concatenate_cover, cover_family, CoverFamily, StructuredWord};
pub use gaps::{open_gaps, rotate_spectrum, GapOpenResult, CONSTRUCTION_GRID_PER_Q};
pub use refine::{
    estimate_eta, minimal_n_prime, plan_refinement, thin_refine, thin_refine_with, RefineOptions, RefinePlan,
    RefinementCertificate, DEFAULT_QCAP, ETA_GRID,
};
pub use tower::{
    build_tower, build_tower_partial, Modulus, TowerLevel, TowerMode, TowerRun, TowerSchedule, Witness,
    HAUSDORFF_GAMMAS,
};
