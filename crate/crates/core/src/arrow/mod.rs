//! Partition arrows `C → (B)^A_{k,ℓ}` decided by exhaustive search over
//! colorings, and small Ramsey degree bounds.

mod coloring;
mod degree;
mod search;

pub use coloring::{chromatic_count, Coloring};
pub use degree::degree_search;
pub use search::{
    arrow_check, arrow_check_parallel, ArrowInstance, ArrowOutcome, ArrowVerdict, SearchStats,
};
