//! INHR: copy inherited methods into the subclass, then shuffle its methods.
//!
//! A copied method behaves like the inherited one as long as it does not
//! depend on the class it is defined in. Methods using zero-argument
//! `super()`, `__class__`, private (name-mangled) attributes, abstract
//! methods, `__init__`, and methods with decorators other than
//! `staticmethod` / `classmethod` are never copied. Only linear hierarchies
//! are handled, so method resolution is simply "nearest ancestor first".

use std::collections::HashSet;

use rand::seq::SliceRandom;
use tree_sitter::Node;

use crate::error::{Error, Result};
use crate::ops::{mix_seed, parse_unit, rng, shuf, OperatorId, OperatorOutcome};
use crate::rewrite::{line_indent, reindent_tail};
use crate::syntax::ParseTree;
use crate::units::{first_class, superclass_names, CodeUnit};

pub fn apply(
    unit: &CodeUnit,
    superclasses: &[CodeUnit],
    max_methods: usize,
    seed: u64,
) -> Result<OperatorOutcome> {
    OperatorId::Inhr.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let src = tree.source();
    let class = first_class(tree.root())
        .ok_or_else(|| Error::Precondition("INHR needs a class".into()))?;
    if superclasses.is_empty() {
        return Ok(OperatorOutcome::unchanged(
            OperatorId::Inhr,
            &unit.text,
            vec!["no superclass defined in the same file".into()],
        ));
    }
    let linear = superclass_names(unit).len() <= 1
        && superclasses.iter().all(|s| superclass_names(s).len() <= 1);
    if !linear {
        return Ok(OperatorOutcome::unchanged(
            OperatorId::Inhr,
            &unit.text,
            vec!["multiple inheritance is not handled".into()],
        ));
    }
    let body = class
        .child_by_field_name("body")
        .ok_or_else(|| Error::Precondition("class has no body".into()))?;

    let mut defined = HashSet::new();
    collect_member_names(body, src, &mut defined);

    // Nearest ancestor first; the first definition of a name wins.
    let mut candidates: Vec<(String, String)> = Vec::new();
    let mut shadowed = defined.clone();
    for sup in superclasses {
        let sup_tree = parse_unit(sup)?;
        let Some(sup_class) = first_class(sup_tree.root()) else { continue };
        let Some(sup_body) = sup_class.child_by_field_name("body") else { continue };
        let mut cursor = sup_body.walk();
        for member in sup_body.named_children(&mut cursor) {
            let Some((name, def)) = method(member, &sup_tree) else { continue };
            if !shadowed.insert(name.clone()) {
                continue;
            }
            if copyable(member, def, &name, &sup_tree) {
                let indent = line_indent(sup_tree.source(), member.start_byte());
                let text = sup_tree.text(member).to_string();
                candidates.push((indent.to_string(), text));
            }
        }
    }
    if candidates.is_empty() {
        return Ok(OperatorOutcome::unchanged(
            OperatorId::Inhr,
            &unit.text,
            vec!["no copyable inherited methods".into()],
        ));
    }

    let mut rng = rng(seed);
    candidates.shuffle(&mut rng);
    candidates.truncate(max_methods);

    let mut cursor = body.walk();
    let last = body
        .named_children(&mut cursor)
        .filter(|c| c.kind() != "comment")
        .last()
        .ok_or_else(|| Error::Precondition("class body is empty".into()))?;
    let target_indent = line_indent(src, last.start_byte()).to_string();
    let mut insertion = String::new();
    for (from, text) in &candidates {
        insertion.push_str("\n\n");
        insertion.push_str(&target_indent);
        insertion.push_str(&reindent_tail(text, from, &target_indent));
    }
    let at = last.end_byte();
    let text = format!("{}{insertion}{}", &src[..at], &src[at..]);
    let copied = candidates.len();
    let mut notes = vec![format!("copied {copied} inherited method(s)")];

    let shuffled = match shuf::apply(&unit.with_text(text.clone()), mix_seed(seed, "SHUF")) {
        Ok(out) => {
            notes.extend(out.notes);
            out.text
        }
        Err(Error::Precondition(reason)) => {
            notes.push(reason);
            text
        }
        Err(other) => return Err(other),
    };
    Ok(OperatorOutcome::new(OperatorId::Inhr, &unit.text, shuffled, copied, notes))
}

fn method<'t>(member: Node<'t>, tree: &ParseTree) -> Option<(String, Node<'t>)> {
    let def = match member.kind() {
        "function_definition" => member,
        "decorated_definition" => member.child_by_field_name("definition")?,
        _ => return None,
    };
    if def.kind() != "function_definition" {
        return None;
    }
    let name = tree.text(def.child_by_field_name("name")?).to_string();
    Some((name, def))
}

fn collect_member_names(body: Node<'_>, src: &str, out: &mut HashSet<String>) {
    let mut cursor = body.walk();
    for member in body.named_children(&mut cursor) {
        let target = match member.kind() {
            "decorated_definition" => member.child_by_field_name("definition"),
            "function_definition" | "class_definition" => Some(member),
            "expression_statement" => member
                .named_child(0)
                .filter(|a| a.kind() == "assignment")
                .and_then(|a| a.child_by_field_name("left")),
            _ => None,
        };
        let Some(target) = target else { continue };
        let name_node = match target.kind() {
            "identifier" => Some(target),
            _ => target.child_by_field_name("name"),
        };
        if let Some(n) = name_node {
            out.insert(src[n.byte_range()].to_string());
        }
    }
}

fn copyable(member: Node<'_>, def: Node<'_>, name: &str, tree: &ParseTree) -> bool {
    if name == "__init__" || (name.starts_with("__") && !name.ends_with("__")) {
        return false;
    }
    if member.kind() == "decorated_definition" {
        let mut cursor = member.walk();
        let plain = member
            .named_children(&mut cursor)
            .filter(|d| d.kind() == "decorator")
            .all(|d| {
                let text = tree.text(d).trim_start_matches('@').trim();
                text == "staticmethod" || text == "classmethod"
            });
        if !plain {
            return false;
        }
    }
    !class_bound(def, tree)
}

/// Whether a method body depends on the class it is written in.
fn class_bound(node: Node<'_>, tree: &ParseTree) -> bool {
    if node.kind() == "identifier" {
        let text = tree.text(node);
        if text == "__class__" || (text.starts_with("__") && !text.ends_with("__")) {
            return true;
        }
    }
    if node.kind() == "call" {
        let zero_arg_super = node
            .child_by_field_name("function")
            .is_some_and(|f| tree.text(f) == "super")
            && node
                .child_by_field_name("arguments")
                .is_some_and(|a| a.named_child_count() == 0);
        if zero_arg_super {
            return true;
        }
    }
    if node.kind() == "decorator" && tree.text(node).contains("abstractmethod") {
        return true;
    }
    let mut cursor = node.walk();
    let bound = node.named_children(&mut cursor).any(|c| class_bound(c, tree));
    bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{reparses, Language};
    use crate::units::{extract_units, Granularity, SourceFile};

    fn classes(src: &str) -> Vec<CodeUnit> {
        extract_units(&SourceFile::new("m.py", Language::Python, src), Granularity::Class).unwrap()
    }

    const SRC: &str = "\
class Base:
    def greet(self):
        return 'hi ' + self.name()

    def name(self):
        return 'base'

    def uses_super(self):
        return super().__repr__()

    def __init__(self):
        self.x = 1


class Child(Base):
    def name(self):
        return 'child'
";

    #[test]
    fn copies_only_safe_non_overridden_methods() {
        let units = classes(SRC);
        let child = units.iter().find(|u| u.name == "Child").unwrap();
        assert_eq!(child.superclasses.len(), 1);
        let out = apply(child, &child.superclasses, 3, 0).unwrap();
        assert!(out.applied);
        assert_eq!(out.sites, 1);
        assert!(reparses(&out.text, Language::Python));
        assert!(out.text.contains("    def greet(self):\n        return 'hi ' + self.name()\n"));
        assert_eq!(out.text.matches("def name").count(), 1);
        assert!(!out.text.contains("uses_super"));
        assert!(!out.text.contains("__init__"));
    }

    #[test]
    fn no_superclass_is_not_applied() {
        let units = classes("class A:\n    def f(self):\n        pass\n");
        let out = apply(&units[0], &units[0].superclasses, 3, 0).unwrap();
        assert!(!out.applied);
    }

    #[test]
    fn respects_the_limit() {
        let src = "class B:\n    def a(self):\n        return 1\n\n    def b(self):\n        return 2\n\n    def c(self):\n        return 3\n\n\nclass C(B):\n    pass\n";
        let units = classes(src);
        let c = units.iter().find(|u| u.name == "C").unwrap();
        let out = apply(c, &c.superclasses, 2, 5).unwrap();
        assert_eq!(out.sites, 2);
        assert_eq!(out.text.matches("def ").count(), 2);
        assert!(reparses(&out.text, Language::Python));
    }
}
