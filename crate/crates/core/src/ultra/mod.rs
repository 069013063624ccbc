//! Łoś-style evaluation over ultraproducts `∏ M_t / U` of rule-generated
//! sequences. Only statements on which every nonprincipal ultrafilter agrees
//! are decided: a set of coordinates that is cofinite or has cofinite
//! complement.

mod coloring;
mod element;
mod los;
mod sequence;
mod transfer;
mod trending;
mod verdict;

pub use coloring::{
    class_verdict, internal_color, ColoringRule, CoordOverride, InternalColor, PerCoordColorings,
};
pub use element::{project_copy, CoordRule, UltraElement};
pub use los::{age_union_check, copy_defined, los_eval};
pub use sequence::{StructureSequence, TailRule};
pub use transfer::{phi_bs_eval, select_s, transfer_shadow, TransferReport};
pub use trending::{is_trending, TrendingReport, Truth};
pub use verdict::{FrechetVerdict, LosOutcome};
