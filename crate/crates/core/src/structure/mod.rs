//! Finite relational structures: embeddings, copies, ages, canonical codes,
//! diagram formulas and their evaluation.

mod canon;
mod classes;
mod embed;
mod formula;
mod model;

pub use canon::{are_isomorphic, canonical_code, canonical_form, structure_from_code, CanonicalCode};
pub use classes::{
    cofinal_chain, jep_witness, verify_cofinal_chain, AllStructures, Chains, ClassEnumerator,
    Cliques, CofinalChainRule, Filtered, Graphs,
};
pub use embed::{
    age, embeds, enumerate_copies, enumerate_embeddings, find_embedding, for_each_copy,
    for_each_embedding, induced_substructure, is_embedding, theta_check,
};
#[allow(unused_imports)]
pub(crate) use formula::next_permutation;
pub use formula::{
    exists_copy_formula, iso_formula, phi_bs_formula, qf_eval, theta_formula, Assignment,
    ColorOracle, Formula, FormulaDisplay, Var,
};
pub use model::{EmbeddingMap, FinStructure, Relation, RelationSymbol, Signature, SubsetCopy};
