//! SHUF: permute the methods of a class.
//!
//! Only the method slots are permuted; other class-body statements and
//! comments keep their positions. Methods whose position matters stay put:
//! redefinitions, methods referenced by a decorator (`@x.setter`) or by
//! another class-body statement.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use tree_sitter::Node;

use crate::error::{Error, Result};
use crate::ops::{parse_unit, rng, OperatorId, OperatorOutcome};
use crate::rewrite::apply_edits;
use crate::units::{first_class, CodeUnit};

pub fn apply(unit: &CodeUnit, seed: u64) -> Result<OperatorOutcome> {
    OperatorId::Shuf.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let src = tree.source();
    let class = first_class(tree.root())
        .ok_or_else(|| Error::Precondition("SHUF needs a class".into()))?;
    let body = class
        .child_by_field_name("body")
        .ok_or_else(|| Error::Precondition("class has no body".into()))?;

    let mut cursor = body.walk();
    let members: Vec<Node<'_>> = body.named_children(&mut cursor).collect();
    let methods: Vec<(Node<'_>, String)> = members
        .iter()
        .filter_map(|m| method_name(*m, src).map(|n| (*m, n)))
        .collect();
    if methods.len() < 2 {
        return Err(Error::Precondition(format!(
            "SHUF needs at least two methods, found {}",
            methods.len()
        )));
    }

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for (_, name) in &methods {
        *counts.entry(name.as_str()).or_default() += 1;
    }
    let mut pinned_names: HashSet<String> = HashSet::new();
    for member in &members {
        if method_name(*member, src).is_none() {
            identifiers(*member, src, &mut pinned_names);
        } else if member.kind() == "decorated_definition" {
            let mut c = member.walk();
            for deco in member.named_children(&mut c).filter(|d| d.kind() == "decorator") {
                identifiers(deco, src, &mut pinned_names);
            }
        }
    }
    let movable: Vec<usize> = methods
        .iter()
        .enumerate()
        .filter(|(_, (_, name))| counts[name.as_str()] == 1 && !pinned_names.contains(name))
        .map(|(i, _)| i)
        .collect();
    let mut notes = Vec::new();
    if movable.len() < methods.len() {
        notes.push(format!("{} method(s) pinned in place", methods.len() - movable.len()));
    }
    if movable.len() < 2 {
        return Ok(OperatorOutcome::unchanged(OperatorId::Shuf, &unit.text, notes));
    }

    let mut rng = rng(seed);
    let mut order = movable.clone();
    order.shuffle(&mut rng);
    if order == movable {
        order.shuffle(&mut rng);
    }
    if order == movable {
        order.rotate_left(1);
    }
    let edits = movable
        .iter()
        .zip(&order)
        .map(|(&slot, &from)| (methods[slot].0.byte_range(), src[methods[from].0.byte_range()].to_string()))
        .collect();
    let text = apply_edits(src, edits);
    Ok(OperatorOutcome::new(OperatorId::Shuf, &unit.text, text, 1, notes))
}

fn method_name(node: Node<'_>, src: &str) -> Option<String> {
    let def = match node.kind() {
        "function_definition" => node,
        "decorated_definition" => node
            .child_by_field_name("definition")
            .filter(|d| d.kind() == "function_definition")?,
        _ => return None,
    };
    def.child_by_field_name("name")
        .map(|n| src[n.byte_range()].to_string())
}

fn identifiers(node: Node<'_>, src: &str, out: &mut HashSet<String>) {
    if node.kind() == "identifier" {
        out.insert(src[node.byte_range()].to_string());
    }
    let mut cursor = node.walk();
    for child in node.named_children(&mut cursor) {
        identifiers(child, src, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{reparses, Language};
    use crate::units::Granularity;

    fn class(text: &str) -> CodeUnit {
        CodeUnit::from_text("t", Language::Python, Granularity::Class, text)
    }

    const SRC: &str = "class A:\n    x = 1\n\n    def a(self):\n        return 1\n\n    # about b\n    def b(self):\n        return 2\n\n    @staticmethod\n    def c():\n        return 3\n";

    #[test]
    fn permutes_methods_only() {
        let out = apply(&class(SRC), 4).unwrap();
        assert!(out.applied);
        assert!(reparses(&out.text, Language::Python));
        assert!(out.text.starts_with("class A:\n    x = 1\n\n    def "));
        assert!(out.text.contains("\n\n    # about b\n    "));
        let mut lines: Vec<&str> = out.text.lines().collect();
        let mut orig: Vec<&str> = SRC.lines().collect();
        lines.sort();
        orig.sort();
        assert_eq!(lines, orig);
    }

    #[test]
    fn every_seed_changes_the_order() {
        for seed in 0..20 {
            assert_ne!(apply(&class(SRC), seed).unwrap().text, SRC);
        }
    }

    #[test]
    fn precondition_and_pinned_methods() {
        let one = class("class A:\n    def a(self):\n        pass\n");
        assert!(matches!(apply(&one, 0), Err(Error::Precondition(_))));
        let props = class("class A:\n    @property\n    def x(self):\n        return 1\n\n    @x.setter\n    def x(self, v):\n        pass\n\n    def y(self):\n        pass\n");
        let out = apply(&props, 0).unwrap();
        assert!(!out.applied);
        assert_eq!(out.notes.len(), 1);
    }
}
