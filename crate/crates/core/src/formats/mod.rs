//! Text formats for structures, colorings, tree sets, formulas, sequences,
//! elements and per-coordinate colorings, plus run reports. Parsers report
//! errors with 1-based line numbers; serializers write the normalized form.

mod coloring;
mod formula;
mod lines;
mod report;
mod structure;
mod tree;
mod ultra;

pub use coloring::{parse_coloring, serialize_coloring};
pub use formula::{parse_formula, serialize_formula};
pub use report::{inputs_digest, RunReport};
pub use structure::{parse_structure, serialize_structure};
pub use tree::{parse_tree_set, serialize_tree_set};
pub use ultra::{
    parse_colorings, parse_elements, parse_sequence, serialize_colorings, serialize_elements,
    serialize_sequence,
};
