//! Desk-scale structural Ramsey workbench.
//!
//! * [`structure`]: finite relational structures, embeddings, copies, ages and
//!   existential formula evaluation.
//! * [`arrow`]: exhaustive partition-arrow decisions `C → (B)^A_{k,ℓ}` and
//!   small Ramsey degree bounds.
//! * [`tree`]: binary-tree orders, meet closures, embedding types, Devlin
//!   types and the antichain constructions built on them.
//! * [`ultra`]: Łoś-transfer evaluation over rule-generated sequences of
//!   finite structures, restricted to what every nonprincipal ultrafilter
//!   agrees on.
//! * [`formats`]: text formats and run reports.

pub mod arrow;
pub mod error;
pub mod formats;
pub mod structure;
pub mod tree;
pub mod ultra;

pub use error::{Error, Result};
pub use structure::{CanonicalCode, FinStructure, Signature, SubsetCopy};
