//! IFF: negate an if-condition and swap its branches.
//!
//! `if c: A else: B` becomes `if not (c): B else: A`. Without an else-branch
//! the new then-branch is the no-op statement. `elif` / `else if` chains are
//! left alone.

use tree_sitter::Node;

use crate::error::Result;
use crate::ops::{parse_unit, OperatorId, OperatorOutcome};
use crate::rewrite::{reindent_tail, rewrite_tree, token, Emitter, Rewrite};
use crate::syntax::Language;
use crate::units::CodeUnit;

pub fn apply(unit: &CodeUnit) -> Result<OperatorOutcome> {
    OperatorId::Iff.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let mut rw = Flip {
        sites: 0,
        skipped_chains: 0,
    };
    let text = match unit.language {
        Language::Python => rewrite_tree(&tree, &mut rw),
        Language::Java => rewrite_tree(&tree, &mut JavaFlip(&mut rw)),
    };
    let mut notes = Vec::new();
    if rw.skipped_chains > 0 {
        notes.push(format!("skipped {} elif/else-if chain(s)", rw.skipped_chains));
    }
    Ok(OperatorOutcome::new(OperatorId::Iff, &unit.text, text, rw.sites, notes))
}

struct Flip {
    sites: usize,
    skipped_chains: usize,
}

/// Body of one clause: the text after its `:` up to the end of its block.
struct Clause {
    gap: String,
    body: String,
    indent: Option<String>,
}

impl Flip {
    fn clause(&mut self, em: &Emitter<'_>, colon: Node<'_>, block: Node<'_>) -> Clause {
        Clause {
            gap: em.src()[colon.end_byte()..block.start_byte()].to_string(),
            body: em.emit(block, self),
            indent: em.own_line_indent(block).map(str::to_string),
        }
    }

    /// Places `moved` under a clause whose original layout was `slot`.
    fn place(slot: &Clause, moved_body: &str, moved_indent: Option<&str>, fallback: &str) -> String {
        let target = slot.indent.as_deref().unwrap_or(fallback);
        let gap = match slot.indent {
            Some(_) => slot.gap.clone(),
            None => format!("\n{target}"),
        };
        let body = match moved_indent {
            Some(from) => reindent_tail(moved_body, from, target),
            None => moved_body.to_string(),
        };
        format!("{gap}{body}")
    }
}

impl Rewrite for Flip {
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        if node.kind() != "if_statement" {
            return None;
        }
        let src = em.src();
        let mut cursor = node.walk();
        let alternatives: Vec<Node<'_>> = node
            .children_by_field_name("alternative", &mut cursor)
            .collect();
        if alternatives.iter().any(|a| a.kind() == "elif_clause") {
            self.skipped_chains += 1;
            return None;
        }
        let condition = node.child_by_field_name("condition")?;
        let consequence = node.child_by_field_name("consequence")?;
        let colon = token(node, ":")?;
        if colon.start_byte() < condition.end_byte() {
            return None;
        }

        let if_indent = em.line_indent(node.start_byte()).to_string();
        let cond_text = em.emit(condition, self);
        let mut head = src[node.start_byte()..condition.start_byte()].to_string();
        if !head.ends_with(char::is_whitespace) {
            head.push(' ');
        }
        head.push_str(&format!("not ({cond_text})"));
        head.push_str(&src[condition.end_byte()..colon.end_byte()]);

        let then_clause = self.clause(em, colon, consequence);
        let else_node = alternatives.first().copied();
        let fallback = match (&then_clause.indent, else_node) {
            (Some(ind), _) => ind.clone(),
            _ => format!("{if_indent}    "),
        };

        let out = match else_node {
            Some(else_clause) => {
                let else_colon = token(else_clause, ":")?;
                let else_body = else_clause.child_by_field_name("body")?;
                let else_part = self.clause(em, else_colon, else_body);
                let fallback = else_part
                    .indent
                    .clone()
                    .unwrap_or_else(|| fallback.clone());
                let new_then =
                    Self::place(&then_clause, &else_part.body, else_part.indent.as_deref(), &fallback);
                let new_else =
                    Self::place(&else_part, &then_clause.body, then_clause.indent.as_deref(), &fallback);
                format!(
                    "{head}{new_then}{between}{else_head}{new_else}{tail}",
                    between = &src[consequence.end_byte()..else_clause.start_byte()],
                    else_head = &src[else_clause.start_byte()..else_colon.end_byte()],
                    tail = &src[else_body.end_byte()..node.end_byte()],
                )
            }
            None => {
                let body_indent = then_clause.indent.clone().unwrap_or(fallback);
                let else_slot = Clause {
                    gap: then_clause.gap.clone(),
                    body: String::new(),
                    indent: then_clause.indent.clone(),
                };
                let new_else = Self::place(
                    &else_slot,
                    &then_clause.body,
                    then_clause.indent.as_deref(),
                    &body_indent,
                );
                format!(
                    "{head}\n{body_indent}pass\n{if_indent}else:{new_else}{tail}",
                    tail = &src[consequence.end_byte()..node.end_byte()],
                )
            }
        };
        self.sites += 1;
        Some(out)
    }
}

struct JavaFlip<'a>(&'a mut Flip);

impl JavaFlip<'_> {
    fn in_chain(node: Node<'_>) -> bool {
        let alternative_is_if = node
            .child_by_field_name("alternative")
            .is_some_and(|a| a.kind() == "if_statement");
        let is_alternative = node.parent().is_some_and(|p| {
            p.kind() == "if_statement"
                && p.child_by_field_name("alternative")
                    .is_some_and(|a| a.id() == node.id())
        });
        alternative_is_if || is_alternative
    }

    fn braced(node: Node<'_>, text: String) -> String {
        if node.kind() == "block" {
            text
        } else {
            format!("{{ {text} }}")
        }
    }
}

impl Rewrite for JavaFlip<'_> {
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        if node.kind() != "if_statement" {
            return None;
        }
        if Self::in_chain(node) {
            self.0.skipped_chains += 1;
            return None;
        }
        let src = em.src();
        let condition = node.child_by_field_name("condition")?;
        let consequence = node.child_by_field_name("consequence")?;
        let cond_text = em.emit(condition, self);
        let head = format!(
            "{}(!{cond_text}){}",
            &src[node.start_byte()..condition.start_byte()],
            &src[condition.end_byte()..consequence.start_byte()],
        );
        let then_text = em.emit(consequence, self);
        let out = match node.child_by_field_name("alternative") {
            Some(alternative) => {
                let else_text = em.emit(alternative, self);
                format!(
                    "{head}{new_then}{between}{then_text}",
                    new_then = Self::braced(alternative, else_text),
                    between = &src[consequence.end_byte()..alternative.start_byte()],
                )
            }
            None => format!("{head}{{}} else {then_text}"),
        };
        self.0.sites += 1;
        Some(out)
    }
}
