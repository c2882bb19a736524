//! COMM: reorder the operands of `and` / `or` chains.
//!
//! Reordering is only behavior-preserving when no operand can raise, has side
//! effects, or guards another, and when the chain's value is a plain boolean
//! (or only its truthiness is used). Operands are therefore limited to
//! comparisons, negations and boolean literals over names, literals and
//! `+ - *` arithmetic, and bare names are accepted only where the chain sits
//! in a condition. Operands may share a name only when neither can raise on
//! any value of it (`==`, `!=`, `is`, `is not` between plain names and
//! literals, and negated names), so no operand can be guarding another.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use tree_sitter::Node;

use crate::error::Result;
use crate::ops::{parse_unit, rng, OperatorId, OperatorOutcome};
use crate::rewrite::{rewrite_tree, Emitter, Rewrite};
use crate::units::CodeUnit;

pub fn apply(unit: &CodeUnit, seed: u64) -> Result<OperatorOutcome> {
    OperatorId::Comm.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let mut rw = Commute {
        rng: rng(seed),
        sites: 0,
        rejected: 0,
    };
    let text = rewrite_tree(&tree, &mut rw);
    let mut notes = Vec::new();
    if rw.rejected > 0 {
        notes.push(format!("{} chain(s) left in place: operands not order-independent", rw.rejected));
    }
    Ok(OperatorOutcome::new(OperatorId::Comm, &unit.text, text, rw.sites, notes))
}

struct Commute {
    rng: rand_chacha::ChaCha8Rng,
    sites: usize,
    rejected: usize,
}

fn operator_text<'s>(node: Node<'_>, src: &'s str) -> Option<&'s str> {
    node.child_by_field_name("operator").map(|op| &src[op.byte_range()])
}

/// Operands of a same-operator chain, left to right. Parenthesized
/// sub-chains are single operands.
fn flatten<'t>(node: Node<'t>, op: &str, src: &str, out: &mut Vec<Node<'t>>) {
    for field in ["left", "right"] {
        let Some(child) = node.child_by_field_name(field) else { continue };
        if child.kind() == "boolean_operator" && operator_text(child, src) == Some(op) {
            flatten(child, op, src, out);
        } else {
            out.push(child);
        }
    }
}

/// Whether the chain's value is only used for its truthiness.
fn truth_context(node: Node<'_>) -> bool {
    let mut cur = node;
    while let Some(parent) = cur.parent() {
        match parent.kind() {
            "parenthesized_expression" | "boolean_operator" | "not_operator" => {
                if parent.kind() == "not_operator" {
                    return true;
                }
                cur = parent;
            }
            "if_statement" | "elif_clause" | "while_statement" => {
                return parent
                    .child_by_field_name("condition")
                    .is_some_and(|c| c.id() == cur.id());
            }
            "assert_statement" => return parent.named_child(0).is_some_and(|c| c.id() == cur.id()),
            "conditional_expression" => {
                return parent.named_child(1).is_some_and(|c| c.id() == cur.id());
            }
            _ => return false,
        }
    }
    false
}

fn pure_value(node: Node<'_>, src: &str) -> bool {
    match node.kind() {
        "identifier" | "integer" | "float" | "true" | "false" | "none" => true,
        "string" => {
            let mut cursor = node.walk();
            let plain = node.named_children(&mut cursor).all(|c| c.kind() != "interpolation");
            plain
        }
        "parenthesized_expression" => node.named_child(0).is_some_and(|c| pure_value(c, src)),
        "unary_operator" => node.named_child(0).is_some_and(|c| pure_value(c, src)),
        "binary_operator" => {
            matches!(operator_text(node, src), Some("+" | "-" | "*"))
                && ["left", "right"]
                    .iter()
                    .all(|f| node.child_by_field_name(f).is_some_and(|c| pure_value(c, src)))
        }
        _ => false,
    }
}

fn boolean_operand(node: Node<'_>, src: &str, truthy: bool) -> bool {
    match node.kind() {
        "true" | "false" => true,
        "identifier" => truthy,
        "comparison_operator" => {
            let mut cursor = node.walk();
            let children: Vec<Node<'_>> = node.children(&mut cursor).collect();
            children.iter().all(|c| {
                if c.is_named() {
                    pure_value(*c, src)
                } else {
                    let op = src[c.byte_range()].split_whitespace().collect::<Vec<_>>().join(" ");
                    matches!(op.as_str(), "==" | "!=" | "<" | "<=" | ">" | ">=" | "is" | "is not")
                }
            })
        }
        "not_operator" => node
            .child_by_field_name("argument")
            .is_some_and(|a| boolean_operand(a, src, true) || pure_value(a, src)),
        "parenthesized_expression" => node
            .named_child(0)
            .is_some_and(|c| boolean_operand(c, src, truthy)),
        "boolean_operator" => ["left", "right"].iter().all(|f| {
            node.child_by_field_name(f)
                .is_some_and(|c| boolean_operand(c, src, truthy))
        }),
        _ => false,
    }
}

/// Operands that evaluate without raising whatever their names hold.
fn never_raises(node: Node<'_>, src: &str) -> bool {
    let atom = |n: Node<'_>| matches!(n.kind(), "identifier" | "integer" | "float" | "true" | "false" | "none" | "string") && pure_value(n, src);
    match node.kind() {
        "true" | "false" | "identifier" => true,
        "comparison_operator" => {
            let mut cursor = node.walk();
            let children: Vec<Node<'_>> = node.children(&mut cursor).collect();
            children.iter().all(|c| {
                if c.is_named() {
                    atom(*c)
                } else {
                    let op = src[c.byte_range()].split_whitespace().collect::<Vec<_>>().join(" ");
                    matches!(op.as_str(), "==" | "!=" | "is" | "is not")
                }
            })
        }
        "not_operator" => node.child_by_field_name("argument").is_some_and(|a| never_raises(a, src)),
        "parenthesized_expression" => node.named_child(0).is_some_and(|c| never_raises(c, src)),
        "boolean_operator" => ["left", "right"]
            .iter()
            .all(|f| node.child_by_field_name(f).is_some_and(|c| never_raises(c, src))),
        _ => false,
    }
}

fn names(node: Node<'_>, src: &str, out: &mut HashSet<String>) {
    if node.kind() == "identifier" {
        out.insert(src[node.byte_range()].to_string());
    }
    let mut cursor = node.walk();
    for child in node.named_children(&mut cursor) {
        names(child, src, out);
    }
}

impl Rewrite for Commute {
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        if node.kind() != "boolean_operator" {
            return None;
        }
        let src = em.src();
        let op = operator_text(node, src)?;
        // Only the top of a same-operator chain is rewritten.
        if node
            .parent()
            .is_some_and(|p| p.kind() == "boolean_operator" && operator_text(p, src) == Some(op))
        {
            return None;
        }
        let mut operands = Vec::new();
        flatten(node, op, src, &mut operands);
        if operands.iter().any(|c| c.kind() == "comment") {
            return None;
        }
        let truthy = truth_context(node);
        // Names of operands that might raise; sharing one of those with any
        // other operand could mean a guard.
        let mut seen = HashSet::new();
        let mut guarded = HashSet::new();
        let mut independent = true;
        for operand in &operands {
            let mut own = HashSet::new();
            names(*operand, src, &mut own);
            let safe = never_raises(*operand, src);
            if !boolean_operand(*operand, src, truthy)
                || own.iter().any(|n| guarded.contains(n) || (!safe && seen.contains(n)))
            {
                independent = false;
            }
            if !safe {
                guarded.extend(own.iter().cloned());
            }
            seen.extend(own);
        }

        let texts: Vec<String> = operands.iter().map(|o| em.emit(*o, self)).collect();
        let separators: Vec<&str> = operands
            .windows(2)
            .map(|w| &src[w[0].end_byte()..w[1].start_byte()])
            .collect();
        let mut order: Vec<usize> = (0..operands.len()).collect();
        if independent && order.len() > 1 {
            let identity = order.clone();
            order.shuffle(&mut self.rng);
            if order == identity {
                order.shuffle(&mut self.rng);
            }
            if order == identity {
                order.rotate_left(1);
            }
            self.sites += 1;
        } else if !independent {
            self.rejected += 1;
        }

        let mut out = src[node.start_byte()..operands[0].start_byte()].to_string();
        for (slot, &from) in order.iter().enumerate() {
            out.push_str(&texts[from]);
            if let Some(sep) = separators.get(slot) {
                out.push_str(sep);
            }
        }
        out.push_str(&src[operands[operands.len() - 1].end_byte()..node.end_byte()]);
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{reparses, Language};
    use crate::units::Granularity;

    fn comm(text: &str, seed: u64) -> OperatorOutcome {
        apply(&CodeUnit::from_text("t", Language::Python, Granularity::Method, text), seed).unwrap()
    }

    #[test]
    fn swaps_two_comparisons() {
        let out = comm("if a > 0 and b < 3:\n    pass\n", 1);
        assert_eq!(out.text, "if b < 3 and a > 0:\n    pass\n");
    }

    #[test]
    fn permutes_whole_chain_and_keeps_separators() {
        let src = "ok = (a == 1 or\n      b == 2 or c == 3)\n";
        let out = comm(src, 5);
        assert!(out.applied);
        assert!(reparses(&out.text, Language::Python));
        let mut got: Vec<&str> = out.text.split(['(', ')']).nth(1).unwrap()
            .split(" or").map(str::trim).collect();
        got.sort();
        assert_eq!(got, ["a == 1", "b == 2", "c == 3"]);
        assert!(out.text.contains(" or\n      "));
    }

    #[test]
    fn guards_and_calls_are_left_alone() {
        for src in [
            "if x is not None and x > 0:\n    pass\n",
            "if len(row) > 0 and max(row) >= n:\n    pass\n",
            "y = a or b\n",
            "if b != 0 and a / b > 1:\n    pass\n",
            "if (n := f()) and m:\n    pass\n",
        ] {
            let out = comm(src, 3);
            assert!(!out.applied, "{src}");
        }
    }

    #[test]
    fn shared_names_in_non_raising_comparisons() {
        let out = comm("if v is None or v == u'' or v != v:\n    pass\n", 4);
        assert!(out.applied);
        assert_ne!(out.text, "if v is None or v == u'' or v != v:\n    pass\n");
        assert!(!comm("if v is not None and v > 0:\n    pass\n", 4).applied);
        assert!(!comm("if v == 0 or v + 1 == 2:\n    pass\n", 4).applied);
    }

    #[test]
    fn bare_names_in_conditions() {
        let out = comm("while a and not b:\n    pass\n", 2);
        assert_eq!(out.text, "while not b and a:\n    pass\n");
    }

    #[test]
    fn nested_chains_inside_parentheses() {
        let out = comm("if (a and b) or c:\n    pass\n", 9);
        assert!(out.applied);
        assert!(reparses(&out.text, Language::Python));
        assert!(out.text.contains("b and a"));
    }
}
