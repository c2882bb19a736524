//! LOOP: rewrite for-loops as while-loops and while-loops as for-loops.
//!
//! Python `for x in xs: body` becomes
//!
//! ```text
//! _iter1 = iter(xs)
//! while True:
//!     try:
//!         x = next(_iter1)
//!     except StopIteration:
//!         break
//!     body
//! ```
//!
//! and `while cond: body` becomes `for _step1 in iter(lambda: bool(cond), False): body`.
//! Java counted `for` loops become a block holding the initializer and a
//! `while`; Java `while` loops become `for (; cond; )`.

use std::collections::HashSet;

use tree_sitter::Node;

use crate::error::Result;
use crate::idents::all_names;
use crate::ops::{parse_unit, OperatorId, OperatorOutcome};
use crate::rewrite::{reindent_tail, rewrite_tree, token, Emitter, Rewrite};
use crate::syntax::Language;
use crate::units::CodeUnit;

pub fn apply(unit: &CodeUnit) -> Result<OperatorOutcome> {
    OperatorId::Loop.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let mut rw = LoopSwap {
        taken: all_names(&tree),
        sites: 0,
        notes: Vec::new(),
    };
    let text = match unit.language {
        Language::Python => rewrite_tree(&tree, &mut rw),
        Language::Java => rewrite_tree(&tree, &mut JavaLoopSwap(&mut rw)),
    };
    Ok(OperatorOutcome::new(OperatorId::Loop, &unit.text, text, rw.sites, rw.notes))
}

struct LoopSwap {
    taken: HashSet<String>,
    sites: usize,
    notes: Vec<String>,
}

impl LoopSwap {
    /// `{stem}{n}` for the smallest n ≥ 1 not used anywhere in the unit.
    fn fresh(&mut self, stem: &str) -> String {
        let name = (1..)
            .map(|n| format!("{stem}{n}"))
            .find(|c| !self.taken.contains(c))
            .unwrap();
        self.taken.insert(name.clone());
        name
    }

    fn note(&mut self, node: Node<'_>, why: &str) {
        self.notes.push(format!(
            "line {}: loop skipped ({why})",
            node.start_position().row + 1
        ));
    }
}

/// Whether a `break` (or `continue`, for `keyword`) inside `body` targets the
/// loop owning `body` rather than a nested loop.
fn has_own_jump(body: Node<'_>, keyword: &str, loop_kinds: &[&str]) -> bool {
    let mut stack = vec![body];
    while let Some(node) = stack.pop() {
        if node.kind() == keyword {
            return true;
        }
        let mut cursor = node.walk();
        for child in node.named_children(&mut cursor) {
            let nested = loop_kinds.contains(&child.kind())
                || matches!(
                    child.kind(),
                    "function_definition"
                        | "class_definition"
                        | "lambda"
                        | "method_declaration"
                        | "class_body"
                        | "lambda_expression"
                );
            if !nested {
                stack.push(child);
            }
        }
    }
    false
}

fn contains_kind(node: Node<'_>, kinds: &[&str]) -> bool {
    if kinds.contains(&node.kind()) {
        return true;
    }
    let mut cursor = node.walk();
    let found = node.named_children(&mut cursor).any(|c| contains_kind(c, kinds));
    found
}

fn step_of(outer: &str, inner: &str) -> String {
    match inner.strip_prefix(outer) {
        Some(step) if !step.is_empty() => step.to_string(),
        _ => "    ".to_string(),
    }
}

const PY_LOOPS: &[&str] = &["for_statement", "while_statement"];

impl Rewrite for LoopSwap {
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        match node.kind() {
            "for_statement" => self.python_for(node, em),
            "while_statement" => self.python_while(node, em),
            _ => None,
        }
    }
}

impl LoopSwap {
    fn python_for(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        if token(node, "async").is_some() {
            self.note(node, "async for");
            return None;
        }
        if node.child_by_field_name("alternative").is_some() {
            self.note(node, "else clause");
            return None;
        }
        let body = node.child_by_field_name("body")?;
        if has_own_jump(body, "break_statement", PY_LOOPS) {
            self.note(node, "break leaves the iterator pending");
            return None;
        }
        let left = node.child_by_field_name("left")?;
        let right = node.child_by_field_name("right")?;

        let indent = em.line_indent(node.start_byte()).to_string();
        let body_indent = em
            .own_line_indent(body)
            .map_or_else(|| format!("{indent}    "), str::to_string);
        let step = step_of(&indent, &body_indent);
        let it = self.fresh("_iter");
        let iterable = em.emit(right, self);
        let iterable = if right.kind() == "expression_list" {
            format!("({iterable})")
        } else {
            iterable
        };
        let target = em.emit(left, self);
        let body_text = em.emit(body, self);
        self.sites += 1;
        Some(format!(
            "{it} = iter({iterable})\n\
             {indent}while True:\n\
             {body_indent}try:\n\
             {body_indent}{step}{target} = next({it})\n\
             {body_indent}except StopIteration:\n\
             {body_indent}{step}break\n\
             {body_indent}{body_text}"
        ))
    }

    fn python_while(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        if node.child_by_field_name("alternative").is_some() {
            self.note(node, "else clause");
            return None;
        }
        let condition = node.child_by_field_name("condition")?;
        if contains_kind(condition, &["named_expression", "yield", "await", "lambda"]) {
            self.note(node, "condition cannot move into a lambda");
            return None;
        }
        let in_class_body = {
            let mut cur = node.parent();
            let mut found = false;
            while let Some(p) = cur {
                match p.kind() {
                    "function_definition" | "module" => break,
                    "class_definition" => {
                        found = true;
                        break;
                    }
                    _ => cur = p.parent(),
                }
            }
            found
        };
        if in_class_body {
            self.note(node, "class-body scope");
            return None;
        }
        let colon = token(node, ":")?;
        let var = self.fresh("_step");
        let cond_text = em.emit(condition, self);
        let rest = em.emit_span(colon.start_byte()..node.end_byte(), node, self);
        self.sites += 1;
        Some(format!(
            "for {var} in iter(lambda: bool({cond_text}), False){rest}"
        ))
    }
}

struct JavaLoopSwap<'a>(&'a mut LoopSwap);

const JAVA_LOOPS: &[&str] = &[
    "for_statement",
    "while_statement",
    "enhanced_for_statement",
    "do_statement",
];

impl Rewrite for JavaLoopSwap<'_> {
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        match node.kind() {
            "for_statement" => self.counted_for(node, em),
            "while_statement" => self.java_while(node, em),
            "enhanced_for_statement" => {
                self.0.note(node, "enhanced for has no counted form");
                None
            }
            _ => None,
        }
    }
}

impl JavaLoopSwap<'_> {
    fn java_while(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        let condition = node.child_by_field_name("condition")?;
        let body = node.child_by_field_name("body")?;
        let inner = condition.named_child(0)?;
        let cond_text = em.emit(inner, self);
        let body_text = em.emit(body, self);
        let gap = &em.src()[condition.end_byte()..body.start_byte()];
        self.0.sites += 1;
        Some(format!("for (; {cond_text}; ){gap}{body_text}"))
    }

    fn counted_for(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        if node.parent().is_some_and(|p| p.kind() == "labeled_statement") {
            self.0.note(node, "labeled loop");
            return None;
        }
        let body = node.child_by_field_name("body")?;
        if has_own_jump(body, "continue_statement", JAVA_LOOPS) {
            self.0.note(node, "continue would skip the update");
            return None;
        }
        if em.text(node).contains("\"\"\"") {
            self.0.note(node, "text block");
            return None;
        }
        let mut cursor = node.walk();
        let inits: Vec<Node<'_>> = node.children_by_field_name("init", &mut cursor).collect();
        let mut cursor = node.walk();
        let updates: Vec<Node<'_>> = node.children_by_field_name("update", &mut cursor).collect();
        let condition = node
            .child_by_field_name("condition")
            .map_or_else(|| "true".to_string(), |c| em.emit(c, self));

        let indent = em.line_indent(node.start_byte()).to_string();
        let inner_indent = match body.kind() {
            "block" => body
                .named_child(0)
                .and_then(|s| em.own_line_indent(s))
                .map_or_else(|| format!("{indent}    "), str::to_string),
            _ => em
                .own_line_indent(body)
                .map_or_else(|| format!("{indent}    "), str::to_string),
        };
        let step = step_of(&indent, &inner_indent);

        let mut init_text = String::new();
        for init in &inits {
            let text = em.emit(*init, self);
            init_text.push_str(&text);
            if !text.trim_end().ends_with(';') {
                init_text.push(';');
            }
            init_text.push('\n');
        }
        let update_text: String = updates
            .iter()
            .map(|u| format!("{};", em.emit(*u, self)))
            .collect::<Vec<_>>()
            .join(" ");

        let body_text = em.emit(body, self);
        let loop_body = if body.kind() == "block" {
            // Insert the update before the closing brace.
            let close = body_text.rfind('}')?;
            let (head, tail) = body_text.split_at(close);
            let head = head.trim_end_matches([' ', '\t']);
            let sep = if head.ends_with('\n') { "" } else { "\n" };
            format!("{head}{sep}{inner_indent}{update_text}\n{indent}{tail}")
        } else {
            format!("{{\n{inner_indent}{body_text}\n{inner_indent}{update_text}\n{indent}}}")
        };
        let loop_body = if update_text.is_empty() {
            body_text
        } else {
            loop_body
        };
        let while_text = format!("while ({condition}) {loop_body}");

        self.0.sites += 1;
        if inits.is_empty() {
            return Some(while_text);
        }
        // Keep initializer declarations scoped to the loop.
        let nested = format!("{indent}{step}");
        let mut block = String::from("{\n");
        for line in init_text.lines() {
            block.push_str(&format!("{nested}{}\n", line.trim_start()));
        }
        block.push_str(&nested);
        block.push_str(&reindent_tail(&while_text, &indent, &nested));
        block.push_str(&format!("\n{indent}}}"));
        Some(block)
    }
}
