//! NORM: normalize surface layout.
//!
//! * Binary, comparison and boolean operators get exactly one space on each
//!   side (gaps that span lines or hold comments are left alone).
//! * An operand that is itself an operation with a different operator is
//!   parenthesized, making precedence explicit: `a + b * 2` becomes
//!   `a + (b * 2)`.
//! * Python double-quoted strings become single-quoted where that is safe.
//!
//! The result is a fixed point: normalizing twice gives the same text.

use tree_sitter::Node;

use crate::error::Result;
use crate::ops::{parse_unit, OperatorId, OperatorOutcome};
use crate::rewrite::{rewrite_tree, Emitter, Rewrite};
use crate::syntax::Language;
use crate::units::CodeUnit;

pub fn apply(unit: &CodeUnit) -> Result<OperatorOutcome> {
    OperatorId::Norm.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let mut rw = Normalize {
        language: unit.language,
        sites: 0,
    };
    let text = rewrite_tree(&tree, &mut rw);
    Ok(OperatorOutcome::new(OperatorId::Norm, &unit.text, text, rw.sites, Vec::new()))
}

struct Normalize {
    language: Language,
    sites: usize,
}

fn is_operation(kind: &str) -> bool {
    matches!(
        kind,
        "binary_operator" | "boolean_operator" | "comparison_operator" | "not_operator" | "binary_expression"
    )
}

/// Operator token text of an operation node, e.g. `+`, `and`, `<`, `not in`.
fn operator_of(node: Node<'_>, src: &str) -> Option<String> {
    if node.kind() == "not_operator" {
        return Some("not".to_string());
    }
    let mut cursor = node.walk();
    let ops: Vec<String> = node
        .children(&mut cursor)
        .filter(|c| !c.is_named())
        .map(|c| src[c.byte_range()].split_whitespace().collect::<Vec<_>>().join(" "))
        .collect();
    (!ops.is_empty()).then(|| ops.join(" "))
}

impl Normalize {
    fn operation(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        let src = em.src();
        let own_op = operator_of(node, src)?;
        let mut cursor = node.walk();
        let children: Vec<Node<'_>> = node.children(&mut cursor).collect();
        if children.iter().any(|c| c.kind() == "comment") {
            return None;
        }
        let mut out = String::new();
        for (i, child) in children.iter().enumerate() {
            if i > 0 {
                let gap = &src[children[i - 1].end_byte()..child.start_byte()];
                if gap.contains('\n') || gap.contains('\\') {
                    out.push_str(gap);
                } else {
                    if gap != " " {
                        self.sites += 1;
                    }
                    out.push(' ');
                }
            }
            let mut text = em.emit(*child, self);
            if !child.is_named() && text.contains(char::is_whitespace) {
                // Two-word operators such as `is not` are single tokens.
                let joined = text.split_whitespace().collect::<Vec<_>>().join(" ");
                if joined != text {
                    self.sites += 1;
                    text = joined;
                }
            }
            let wrap = child.is_named()
                && is_operation(child.kind())
                && node.kind() != "not_operator"
                && operator_of(*child, src).is_some_and(|op| op != own_op);
            if wrap {
                self.sites += 1;
                out.push('(');
                out.push_str(&text);
                out.push(')');
            } else {
                out.push_str(&text);
            }
        }
        Some(out)
    }

    fn python_string(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        let mut ancestor = node.parent();
        while let Some(a) = ancestor {
            if a.kind() == "interpolation" {
                return None;
            }
            ancestor = a.parent();
        }
        let start = node.named_child(0).filter(|c| c.kind() == "string_start")?;
        let end = node
            .named_child(node.named_child_count().saturating_sub(1) as u32)
            .filter(|c| c.kind() == "string_end")?;
        let src = em.src();
        let opener = &src[start.byte_range()];
        let prefix_len = opener.find(['"', '\'']).unwrap_or(opener.len());
        let (prefix, quote) = opener.split_at(prefix_len);
        if quote != "\"" && quote != "\"\"\"" {
            return None;
        }
        let lower = prefix.to_ascii_lowercase();
        let raw = lower.contains('r');
        let formatted = lower.contains('f');
        let content = &src[start.end_byte()..end.start_byte()];
        let triple = quote.len() == 3;
        if (formatted || raw || triple) && content.contains(['\'', '"']) {
            return None;
        }
        if triple && content.ends_with('\\') {
            return None;
        }
        let body = if formatted {
            em.emit_span(start.end_byte()..end.start_byte(), node, self)
        } else {
            escape_single(content)
        };
        let new_quote = if triple { "'''" } else { "'" };
        self.sites += 1;
        Some(format!("{prefix}{new_quote}{body}{new_quote}"))
    }
}

/// Re-escapes the body of a `"..."` literal for use between single quotes.
fn escape_single(content: &str) -> String {
    let mut out = String::with_capacity(content.len());
    let mut chars = content.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                out.push('\\');
                if let Some(next) = chars.next() {
                    out.push(next);
                }
            }
            '\'' => out.push_str("\\'"),
            _ => out.push(c),
        }
    }
    out
}

impl Rewrite for Normalize {
    fn rewrite(&mut self, node: Node<'_>, em: &Emitter<'_>) -> Option<String> {
        match node.kind() {
            k if is_operation(k) && k != "not_operator" => self.operation(node, em),
            "string" if self.language == Language::Python => self.python_string(node, em),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::reparses;
    use crate::units::Granularity;

    fn norm(lang: Language, text: &str) -> String {
        apply(&CodeUnit::from_text("t", lang, Granularity::Method, text))
            .unwrap()
            .text
    }

    #[test]
    fn spacing_and_parentheses() {
        assert_eq!(norm(Language::Python, "x = a+b*2\n"), "x = a + (b * 2)\n");
        assert_eq!(norm(Language::Python, "y = a  and b or c\n"), "y = (a and b) or c\n");
        assert_eq!(norm(Language::Python, "z = a+1<b\n"), "z = (a + 1) < b\n");
        assert_eq!(norm(Language::Python, "w = a is  not b\n"), "w = a is not b\n");
        assert_eq!(norm(Language::Python, "v = a - b + c\n"), "v = (a - b) + c\n");
        assert_eq!(norm(Language::Python, "u = a + b + c\n"), "u = a + b + c\n");
    }

    #[test]
    fn multi_line_gaps_are_kept() {
        let src = "x = (a +\n     b)\n";
        assert_eq!(norm(Language::Python, src), src);
    }

    #[test]
    fn strings_switch_to_single_quotes() {
        assert_eq!(norm(Language::Python, "s = \"a\"\n"), "s = 'a'\n");
        assert_eq!(norm(Language::Python, "s = \"it's\"\n"), "s = 'it\\'s'\n");
        assert_eq!(norm(Language::Python, "s = \"\\\"q\\\"\"\n"), "s = '\\\"q\\\"'\n");
        assert_eq!(norm(Language::Python, "s = r\"it's\"\n"), "s = r\"it's\"\n");
        assert_eq!(norm(Language::Python, "s = u\"{\"\n"), "s = u'{'\n");
        assert_eq!(norm(Language::Python, "s = f\"{a+b}\"\n"), "s = f'{a + b}'\n");
        assert_eq!(norm(Language::Python, "s = f\"{d['k']}\"\n"), "s = f\"{d['k']}\"\n");
        assert_eq!(norm(Language::Python, "\"\"\"Doc.\"\"\"\n"), "'''Doc.'''\n");
    }

    #[test]
    fn idempotent_and_valid() {
        let src = "def f(a,b):\n    if a>b and not b: return \"x\"+str(a*b-1)\n    return a%b==0\n";
        let once = norm(Language::Python, src);
        assert!(reparses(&once, Language::Python));
        assert_eq!(norm(Language::Python, &once), once);
    }

    #[test]
    fn java_spacing_and_parentheses() {
        let src = "int f(int a) {\n  return a+a*2;\n}\n";
        assert_eq!(norm(Language::Java, src), "int f(int a) {\n  return a + (a * 2);\n}\n");
    }
}
