//! ITER: switch between element iteration and index iteration.
//!
//! `for x in data: body` becomes
//!
//! ```text
//! for x in range(len(data)):
//!     body with every read of x replaced by data[x]
//! ```
//!
//! when `x` is a plain name that is only read inside the body, and otherwise
//!
//! ```text
//! for i in range(len(data)):
//!     x = data[i]
//!     body
//! ```
//!
//! and `for i in range(len(data)):` whose body only reads `data[i]` becomes
//! `for item in data:`. The forward direction needs `data` to be a sequence;
//! it is skipped when the unit shows evidence that `data` is a mapping, set,
//! iterator or file, and when the body mentions `data` at all (it might be
//! resized while iterating) or rebinds `x`.

use std::collections::HashSet;
use std::ops::Range;

use tree_sitter::Node;

use crate::error::Result;
use crate::idents::all_names;
use crate::ops::{parse_unit, OperatorId, OperatorOutcome};
use crate::rewrite::{rewrite_tree, token, Emitter, Rewrite};
use crate::syntax::ParseTree;
use crate::units::CodeUnit;

pub fn apply(unit: &CodeUnit) -> Result<OperatorOutcome> {
    OperatorId::Iter.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let mut rw = IterSwap {
        tree: &tree,
        taken: all_names(&tree),
        sites: 0,
        notes: Vec::new(),
    };
    let text = rewrite_tree(&tree, &mut rw);
    let (sites, notes) = (rw.sites, rw.notes);
    Ok(OperatorOutcome::new(OperatorId::Iter, &unit.text, text, sites, notes))
}

struct IterSwap<'t> {
    tree: &'t ParseTree,
    taken: HashSet<String>,
    sites: usize,
    notes: Vec<String>,
}

const NON_SEQUENCE_CALLS: &[&str] = &[
    "dict", "set", "frozenset", "iter", "map", "filter", "zip", "open", "enumerate", "reversed",
    "defaultdict", "Counter", "OrderedDict",
];
const NON_SEQUENCE_METHODS: &[&str] = &[
    "items", "keys", "values", "get", "add", "discard", "readlines", "setdefault", "update",
];
const NON_SEQUENCE_TYPES: &[&str] = &[
    "dict", "Dict", "set", "Set", "Mapping", "Iterable", "Iterator", "Generator", "FrozenSet",
    "frozenset", "MutableMapping", "IO", "TextIO",
];

fn is_name_chain(node: Node<'_>) -> bool {
    match node.kind() {
        "identifier" => true,
        "attribute" => node.child_by_field_name("object").is_some_and(is_name_chain),
        _ => false,
    }
}

fn walk<'t>(node: Node<'t>, out: &mut Vec<Node<'t>>) {
    out.push(node);
    let mut cursor = node.walk();
    for child in node.named_children(&mut cursor) {
        walk(child, out);
    }
}

fn descendants(node: Node<'_>) -> Vec<Node<'_>> {
    let mut out = Vec::new();
    walk(node, &mut out);
    out
}

impl<'t> IterSwap<'t> {
    fn text(&self, node: Node<'_>) -> &'t str {
        &self.tree.source()[node.byte_range()]
    }

    fn fresh(&mut self, options: &[&str]) -> String {
        let name = options
            .iter()
            .map(|s| s.to_string())
            .chain((1..).map(|n| format!("idx{n}")))
            .find(|c| !self.taken.contains(c))
            .unwrap();
        self.taken.insert(name.clone());
        name
    }

    fn mentions(&self, scope: Node<'_>, expr: &str) -> bool {
        descendants(scope)
            .into_iter()
            .any(|n| matches!(n.kind(), "identifier" | "attribute") && self.text(n) == expr)
    }

    /// Evidence anywhere in the unit that `expr` is not an indexable sequence.
    fn non_sequence(&self, expr: &str) -> bool {
        let all = descendants(self.tree.root());
        all.into_iter().any(|n| match n.kind() {
            "assignment" => {
                n.child_by_field_name("left").is_some_and(|l| self.text(l) == expr)
                    && n.child_by_field_name("right").is_some_and(|r| match r.kind() {
                        "dictionary" | "set" | "dictionary_comprehension" | "set_comprehension"
                        | "generator_expression" => true,
                        "call" => r.child_by_field_name("function").is_some_and(|f| {
                            let name = self.text(f).rsplit('.').next().unwrap_or("");
                            NON_SEQUENCE_CALLS.contains(&name)
                                || NON_SEQUENCE_METHODS.contains(&name)
                        }),
                        _ => false,
                    })
            }
            "attribute" => {
                n.child_by_field_name("object").is_some_and(|o| self.text(o) == expr)
                    && n.child_by_field_name("attribute")
                        .is_some_and(|a| NON_SEQUENCE_METHODS.contains(&self.text(a)))
            }
            "typed_parameter" | "typed_default_parameter" => {
                let name_matches = n.named_child(0).is_some_and(|c| self.text(c) == expr);
                name_matches
                    && n.child_by_field_name("type").is_some_and(|t| {
                        let ty = self.text(t);
                        NON_SEQUENCE_TYPES.iter().any(|bad| {
                            ty == *bad || ty.starts_with(&format!("{bad}[")) || ty.contains(&format!(".{bad}"))
                        })
                    })
            }
            _ => false,
        })
    }

    fn forward(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        let left = node.child_by_field_name("left")?;
        let right = node.child_by_field_name("right")?;
        let body = node.child_by_field_name("body")?;
        if !is_name_chain(right) {
            return None;
        }
        let data = self.text(right);
        if self.mentions(body, data) {
            self.notes.push(format!("line {}: `{data}` used inside the loop", node.start_position().row + 1));
            return None;
        }
        if self.non_sequence(data) {
            self.notes.push(format!("line {}: `{data}` may not be a sequence", node.start_position().row + 1));
            return None;
        }
        let target_name = self.text(left);
        let rebound = descendants(body).into_iter().any(|n| {
            n.kind() == "identifier"
                && self.text(n) == target_name
                && (is_stored(n) || n.parent().is_some_and(|p| STORE_PARENTS.contains(&p.kind())))
        });
        if rebound {
            self.notes.push(format!("line {}: loop variable reassigned in the body", node.start_position().row + 1));
            return None;
        }
        if let Some(reads) = self.body_reads(node, left, body) {
            let colon = token(node, ":")?;
            let mut index = IndexReads {
                reads,
                data: data.to_string(),
                inner: self,
            };
            let rest = em.emit_span(colon.start_byte()..node.end_byte(), node, &mut index);
            self.sites += 1;
            return Some(format!("for {} in range(len({data})){rest}", self.text(left)));
        }
        let colon = token(node, ":")?;
        let indent = em.line_indent(node.start_byte()).to_string();
        let body_indent = em
            .own_line_indent(body)
            .map_or_else(|| format!("{indent}    "), str::to_string);
        let idx = self.fresh(&["i", "j", "k", "idx"]);
        let target = em.emit(left, self);
        let header_gap = &em.src()[colon.end_byte()..body.start_byte()];
        let gap = if header_gap.contains('\n') {
            header_gap.to_string()
        } else {
            format!("\n{body_indent}")
        };
        let body_text = em.emit(body, self);
        let rest = em.emit_span(body.end_byte()..node.end_byte(), node, self);
        self.sites += 1;
        Some(format!(
            "for {idx} in range(len({data})):{gap}{target} = {data}[{idx}]\n{body_indent}{body_text}{rest}"
        ))
    }

    /// Byte ranges of the loop variable's reads when the variable can itself
    /// serve as the index: a plain name that occurs nowhere in the unit but
    /// as the loop target and as plain reads in the loop body, outside
    /// nested scopes and nested loops.
    fn body_reads(&self, node: Node<'_>, left: Node<'_>, body: Node<'_>) -> Option<HashSet<Range<usize>>> {
        if left.kind() != "identifier" {
            return None;
        }
        let name = self.text(left);
        let mut reads = HashSet::new();
        for n in descendants(self.tree.root()) {
            if n.kind() != "identifier" || self.text(n) != name || n.id() == left.id() {
                continue;
            }
            let parent = n.parent()?;
            let field_of = |field: &str| parent.child_by_field_name(field).is_some_and(|c| c.id() == n.id());
            if (parent.kind() == "attribute" && field_of("attribute"))
                || (parent.kind() == "keyword_argument" && field_of("name"))
            {
                continue;
            }
            if !body.byte_range().contains(&n.start_byte()) || is_stored(n) || STORE_PARENTS.contains(&parent.kind()) {
                return None;
            }
            let mut up = parent;
            while up.id() != node.id() {
                if NESTED.contains(&up.kind()) {
                    return None;
                }
                up = up.parent()?;
            }
            reads.insert(n.byte_range());
        }
        Some(reads)
    }

    /// `for i in range(len(data))` where `i` only ever appears as `data[i]`.
    fn backward(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        let left = node.child_by_field_name("left")?;
        let right = node.child_by_field_name("right")?;
        let body = node.child_by_field_name("body")?;
        if left.kind() != "identifier" || right.kind() != "call" {
            return None;
        }
        if self.text(right.child_by_field_name("function")?) != "range" {
            return None;
        }
        let args = right.child_by_field_name("arguments")?;
        if args.named_child_count() != 1 {
            return None;
        }
        let len_call = args.named_child(0).filter(|c| c.kind() == "call")?;
        if self.text(len_call.child_by_field_name("function")?) != "len" {
            return None;
        }
        let len_args = len_call.child_by_field_name("arguments")?;
        let seq = len_args.named_child(0).filter(|_| len_args.named_child_count() == 1)?;
        if !is_name_chain(seq) {
            return None;
        }
        let data = self.text(seq);
        let index = self.text(left);

        // Every use of the index in the body must be a read of `data[index]`;
        // `data` itself must not appear anywhere else in the body.
        let mut reads = Vec::new();
        for n in descendants(body) {
            let is_index = n.kind() == "identifier" && self.text(n) == index;
            let is_data = matches!(n.kind(), "identifier" | "attribute") && self.text(n) == data;
            if !is_index && !is_data {
                continue;
            }
            let sub = n.parent().filter(|p| {
                p.kind() == "subscript"
                    && p.child_by_field_name("value").is_some_and(|v| self.text(v) == data)
                    && p.child_by_field_name("subscript").is_some_and(|s| self.text(s) == index)
                    && p.named_child_count() == 2
            });
            let sub = sub?;
            if is_stored(sub) {
                return None;
            }
            if is_index {
                reads.push(sub.byte_range());
            }
        }
        // The index must not be read after the loop.
        let after_loop = descendants(self.tree.root()).into_iter().any(|n| {
            n.kind() == "identifier" && self.text(n) == index && n.start_byte() >= node.end_byte()
        });
        if after_loop || reads.is_empty() {
            return None;
        }

        let stem = data.rsplit('.').next().unwrap_or(data);
        let singular = stem.strip_suffix('s').filter(|s| s.len() > 1).map(str::to_string);
        let mut options: Vec<&str> = Vec::new();
        if let Some(s) = singular.as_deref() {
            options.push(s);
        }
        options.extend(["item", "elem", "element"]);
        let elem = self.fresh(&options);

        let mut replace = ReplaceReads {
            reads: reads.into_iter().collect(),
            with: elem.clone(),
        };
        let colon = token(node, ":")?;
        let body_text = em.emit_span(colon.start_byte()..node.end_byte(), node, &mut replace);
        self.sites += 1;
        Some(format!("for {elem} in {data}{body_text}"))
    }
}

fn is_stored(node: Node<'_>) -> bool {
    let Some(parent) = node.parent() else { return false };
    match parent.kind() {
        "assignment" | "augmented_assignment" => parent
            .child_by_field_name("left")
            .is_some_and(|l| l.id() == node.id() || l.byte_range().contains(&node.start_byte())),
        "delete_statement" | "pattern_list" | "tuple_pattern" | "list_pattern" => true,
        "for_statement" | "for_in_clause" => parent
            .child_by_field_name("left")
            .is_some_and(|l| l.byte_range().contains(&node.start_byte())),
        "expression_list" | "tuple" | "list" => is_stored(parent),
        _ => false,
    }
}

/// Parents under which a name is bound rather than read.
const STORE_PARENTS: &[&str] = &[
    "named_expression", "as_pattern_target", "global_statement", "nonlocal_statement",
    "aliased_import", "dotted_name", "case_pattern", "keyword_pattern",
];

/// Nodes that open a scope or rebind names on their own.
const NESTED: &[&str] = &[
    "function_definition", "lambda", "class_definition", "list_comprehension",
    "set_comprehension", "dictionary_comprehension", "generator_expression", "for_statement",
];

/// Rewrites reads of the loop variable to indexed accesses, leaving every
/// other node to the enclosing rewrite.
struct IndexReads<'a, 't> {
    reads: HashSet<Range<usize>>,
    data: String,
    inner: &'a mut IterSwap<'t>,
}

impl Rewrite for IndexReads<'_, '_> {
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        if node.kind() == "identifier" && self.reads.contains(&node.byte_range()) {
            return Some(format!("{}[{}]", self.data, &em.src()[node.byte_range()]));
        }
        self.inner.rewrite(node, em)
    }
}

struct ReplaceReads {
    reads: HashSet<Range<usize>>,
    with: String,
}

impl Rewrite for ReplaceReads {
    fn rewrite(&mut self, node: Node<'_>, _: &Emitter<'_>) -> Option<String> {
        (node.kind() == "subscript" && self.reads.contains(&node.byte_range())).then(|| self.with.clone())
    }
}

impl Rewrite for IterSwap<'_> {
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        if node.kind() != "for_statement" || token(node, "async").is_some() {
            return None;
        }
        let right = node.child_by_field_name("right")?;
        if right.kind() == "call" {
            self.backward(node, em)
        } else {
            self.forward(node, em)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{reparses, Language};
    use crate::units::Granularity;

    fn iter(text: &str) -> OperatorOutcome {
        apply(&CodeUnit::from_text("t", Language::Python, Granularity::Method, text)).unwrap()
    }

    #[test]
    fn element_loop_becomes_index_loop() {
        let out = iter("def f(rows):\n    for row in rows:\n        print(row)\n");
        assert_eq!(out.text, "def f(rows):\n    for row in range(len(rows)):\n        print(rows[row])\n");

        let out = iter("def f(rows):\n    for row in rows:\n        row = row.strip()\n        print(row)\n");
        assert!(!out.applied);
    }

    #[test]
    fn index_loop_becomes_element_loop() {
        let src = "def f(values):\n    t = 0\n    for i in range(len(values)):\n        t += values[i] * values[i]\n    return t\n";
        let out = iter(src);
        assert_eq!(
            out.text,
            "def f(values):\n    t = 0\n    for value in values:\n        t += value * value\n    return t\n"
        );
    }

    #[test]
    fn index_loops_with_other_index_uses_are_kept() {
        for src in [
            "for i in range(len(xs)):\n    print(i, xs[i])\n",
            "for i in range(len(xs)):\n    xs[i] = 0\n",
            "for i in range(len(xs)):\n    pass\nprint(i)\n",
        ] {
            assert!(!iter(src).applied, "{src}");
        }
    }

    #[test]
    fn non_sequences_and_mutation_are_skipped() {
        for src in [
            "def f(d):\n    for k in d:\n        print(d.get(k))\n",
            "def f(d: dict):\n    for k in d:\n        print(k)\n",
            "def f():\n    s = set()\n    for k in s:\n        print(k)\n",
            "def f(xs):\n    for x in xs:\n        xs.append(x)\n",
            "def f():\n    for x in g():\n        print(x)\n",
        ] {
            assert!(!iter(src).applied, "{src}");
        }
    }

    #[test]
    fn reads_in_nested_scopes_keep_the_element_variable() {
        for src in [
            "for x in xs:\n    f(lambda: x)\n",
            "for x in xs:\n    print([x for _ in ys])\n",
            "for x in xs:\n    for y in x:\n        print(y)\n",
        ] {
            let out = iter(src);
            assert!(out.text.starts_with("for i in range(len(xs)):\n    x = xs[i]\n"), "{}", out.text);
        }
        let out = iter("for x in xs:\n    f(x=x, y=x.real)\n");
        assert_eq!(out.text, "for x in range(len(xs)):\n    f(x=xs[x], y=xs[x].real)\n");
    }

    #[test]
    fn inline_body_and_fresh_index() {
        let out = iter("for x in xs: i = x\nprint(x)\n");
        assert_eq!(out.text, "for j in range(len(xs)):\n    x = xs[j]\n    i = x\nprint(x)\n");
        assert!(reparses(&out.text, Language::Python));
    }
}
