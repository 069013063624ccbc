use super::lines::{at_line, Lines};
use crate::error::{Error, Result};
use crate::tree::{Node, TreeSet};

/// One node per line, `e` for the root, sorted by length then
/// lexicographically. Unsorted or repeated nodes are rejected.
pub fn parse_tree_set(text: &str) -> Result<TreeSet> {
    let mut lines = Lines::new(text);
    let mut out = TreeSet::new();
    let mut prev: Option<Node> = None;
    while let Some((line, word)) = lines.next() {
        let node: Node = at_line(line, word.parse())?;
        if prev.as_ref().is_some_and(|p| p >= &node) {
            return Err(Error::parse(line, "nodes must be sorted by length, then lexicographically"));
        }
        out.insert(node.clone());
        prev = Some(node);
    }
    Ok(out)
}

pub fn serialize_tree_set(set: &TreeSet) -> String {
    set.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_round_trip() {
        let text = "e\n0\n1\n01\n110\n";
        let set = parse_tree_set(text).unwrap();
        assert_eq!(set.len(), 5);
        assert_eq!(serialize_tree_set(&set), text);
        assert!(matches!(parse_tree_set("0\n1\n10\n01\n"), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(parse_tree_set("0\n\n0x\n"), Err(Error::Parse { line: 3, .. })));
    }
}
