//! Randomized polar subcodes, nested code pairs, and their design procedure.

mod codefile;
mod constraint;
mod design;
mod nested;
mod subcode;

pub use codefile::{read_code_file, write_code_file};
pub use constraint::{ConstraintMatrix, ConstraintRow, RowKind};
pub use design::{
    default_p_grid, default_ptilde_grid, design_nested, design_quantizer, distortion_seed, find_pc, interpolate_pc,
    mean_distortion, search_pc, simulate_bler, unfreeze_order, BlerPoint, CandidateReport, DesignParams, DesignReport,
    DistortionPoint, DistortionStat, PcSearch, QuantizerDesign,
};
pub use nested::{stack_nested, NestedCodePair};
pub use subcode::{build_randomized_psc, default_ta_tb, PolarSubcode};
