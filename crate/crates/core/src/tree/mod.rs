//! The binary tree `2^{<ω}`: orders, meet closures, embedding types, Devlin
//! types, the skew tree `W₀` and its antichain, and pruning of perfect
//! subtrees.

mod devlin;
mod node;
mod prune;
pub mod sample;
mod set;
mod types;
mod w0;

pub use devlin::{devlin_color, devlin_types, enumerate_devlin_types, tangent, DevlinColor, DevlinTypes};
pub use node::{common_prefix_len, e_cmp, e_less, lex_less, meet, preorder_cmp, Node};
pub use prune::{
    find_all_types_in, prune_perfect, prune_with_leaves, w0_representatives, Pruned, Route,
    TypeSearch, TypeWitness, W0Representatives,
};
pub use set::{antichain_x, meet_closure, TreeSet};
pub use types::{embedding_type, is_devlin, same_embedding_type, TypeCode};
pub use w0::{build_w0, check_pruned, check_w0, graft_shadow, w0_height, w0_node, W0Check};
