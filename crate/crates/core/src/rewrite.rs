//! Tree-to-text rewriting.
//!
//! [`Emitter::emit`] renders a node by copying its source bytes, except that
//! each child is rendered recursively and a [`Rewrite`] may substitute the
//! text of any node. Transformations therefore see already-rewritten text for
//! the sub-parts they splice, and nested sites compose naturally.

use std::ops::Range;

use tree_sitter::Node;

use crate::syntax::ParseTree;

pub trait Rewrite {
    /// Returns replacement text for `node`, or `None` to copy it with its
    /// children rewritten.
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String>;
}

pub struct Emitter<'t> {
    pub tree: &'t ParseTree,
}

impl<'t> Emitter<'t> {
    pub fn new(tree: &'t ParseTree) -> Self {
        Emitter { tree }
    }

    pub fn src(&self) -> &'t str {
        self.tree.source()
    }

    pub fn text(&self, node: Node<'_>) -> &'t str {
        &self.src()[node.byte_range()]
    }

    pub fn emit<R: Rewrite + ?Sized>(&self, node: Node<'_>, rw: &mut R) -> String {
        match rw.rewrite(node, self) {
            Some(text) => text,
            None => self.emit_default(node, rw),
        }
    }

    pub fn emit_default<R: Rewrite + ?Sized>(&self, node: Node<'_>, rw: &mut R) -> String {
        self.emit_span(node.byte_range(), node, rw)
    }

    /// Renders `span` (which must lie within `node`), rewriting every child of
    /// `node` that falls inside it.
    pub fn emit_span<R: Rewrite + ?Sized>(
        &self,
        span: Range<usize>,
        node: Node<'_>,
        rw: &mut R,
    ) -> String {
        let src = self.src();
        let mut out = String::with_capacity(span.len());
        let mut at = span.start;
        let mut cursor = node.walk();
        for child in node.children(&mut cursor) {
            if child.start_byte() < span.start || child.end_byte() > span.end {
                continue;
            }
            if child.start_byte() < at {
                continue;
            }
            out.push_str(&src[at..child.start_byte()]);
            out.push_str(&self.emit(child, rw));
            at = child.end_byte();
        }
        out.push_str(&src[at..span.end]);
        out
    }

    /// Whitespace that starts the line holding `byte`.
    pub fn line_indent(&self, byte: usize) -> &'t str {
        line_indent(self.src(), byte)
    }

    /// Indentation of a block whose first statement starts its own line, or
    /// `None` for an inline body such as `if x: y()`.
    pub fn own_line_indent(&self, node: Node<'_>) -> Option<&'t str> {
        let src = self.src();
        let line_start = src[..node.start_byte()].rfind('\n').map_or(0, |i| i + 1);
        let prefix = &src[line_start..node.start_byte()];
        prefix
            .chars()
            .all(|c| c == ' ' || c == '\t')
            .then_some(prefix)
    }
}

/// Renders a whole tree through `rw`.
pub fn rewrite_tree<R: Rewrite + ?Sized>(tree: &ParseTree, rw: &mut R) -> String {
    let em = Emitter::new(tree);
    em.emit(tree.root(), rw)
}

pub fn line_indent(src: &str, byte: usize) -> &str {
    let start = src[..byte].rfind('\n').map_or(0, |i| i + 1);
    let rest = &src[start..];
    let width = rest
        .find(|c: char| c != ' ' && c != '\t')
        .unwrap_or(rest.len());
    &rest[..width]
}

/// Moves a multi-line body from one indentation to another. The first line is
/// left alone (its indentation comes from the surrounding text).
pub fn reindent_tail(text: &str, from: &str, to: &str) -> String {
    if from == to {
        return text.to_string();
    }
    let mut out = String::with_capacity(text.len());
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if i == 0 {
            out.push_str(line);
            continue;
        }
        match line.strip_prefix(from) {
            Some(rest) => {
                out.push_str(to);
                out.push_str(rest);
            }
            None => out.push_str(line),
        }
    }
    out
}

/// Applies non-overlapping byte-range replacements.
pub fn apply_edits(text: &str, mut edits: Vec<(Range<usize>, String)>) -> String {
    edits.sort_by_key(|(r, _)| (r.start, r.end));
    let mut out = String::with_capacity(text.len());
    let mut at = 0;
    for (range, replacement) in edits {
        assert!(range.start >= at, "overlapping edits at byte {}", range.start);
        out.push_str(&text[at..range.start]);
        out.push_str(&replacement);
        at = range.end;
    }
    out.push_str(&text[at..]);
    out
}

/// Finds the first unnamed child token with the given text.
pub fn token<'a>(node: Node<'a>, kind: &str) -> Option<Node<'a>> {
    let mut cursor = node.walk();
    let found = node
        .children(&mut cursor)
        .find(|c| !c.is_named() && c.kind() == kind);
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Language};

    struct Identity;
    impl Rewrite for Identity {
        fn rewrite(&mut self, _: Node<'_>, _: &Emitter<'_>) -> Option<String> {
            None
        }
    }

    struct Upper;
    impl Rewrite for Upper {
        fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
            (node.kind() == "identifier").then(|| em.text(node).to_uppercase())
        }
    }

    #[test]
    fn identity_rewrite_is_lossless() {
        let src = "def f(a,  b):\n    # hi\n    return a+b  # tail\n\n\nx = 'q'\n";
        let tree = parse(src, Language::Python).unwrap();
        assert_eq!(rewrite_tree(&tree, &mut Identity), src);
    }

    #[test]
    fn substitutions_keep_surrounding_bytes() {
        let tree = parse("x = y  +  z  # c\n", Language::Python).unwrap();
        assert_eq!(rewrite_tree(&tree, &mut Upper), "X = Y  +  Z  # c\n");
    }

    #[test]
    fn edits_and_reindent() {
        assert_eq!(apply_edits("abcdef", vec![(4..5, "E".into()), (0..1, "AA".into())]), "AAbcdEf");
        assert_eq!(reindent_tail("a\n  b\n  c\n", "  ", "    "), "a\n    b\n    c\n");
        assert_eq!(line_indent("x\n   y", 5), "   ");
    }
}
