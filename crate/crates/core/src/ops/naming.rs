//! Identifier word splitting, case styles and binding-wide renames shared by
//! RENM and STYL.

use std::collections::HashSet;

use crate::idents::{BindingKind, IdentifierBinding, ScopeKind};
use crate::rewrite::apply_edits;
use crate::syntax::{Language, ParseTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// `snake_case` with at least two words.
    Snake,
    /// `camelCase` with at least two words.
    Camel,
    /// `PascalCase`.
    Pascal,
    /// `UPPER_CASE` constants.
    Upper,
    /// A single lowercase word.
    Single,
    Other,
}

/// An identifier split into lowercase words plus its leading and trailing
/// underscores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Words {
    pub prefix: String,
    pub words: Vec<String>,
    pub suffix: String,
    pub style: Style,
}

impl Words {
    pub fn split(name: &str) -> Words {
        let core = name.trim_matches('_');
        let prefix = "_".repeat(name.len() - name.trim_start_matches('_').len());
        let suffix = if core.is_empty() {
            String::new()
        } else {
            "_".repeat(name.len() - name.trim_end_matches('_').len())
        };
        let has_lower = core.chars().any(|c| c.is_ascii_lowercase());
        let has_upper = core.chars().any(|c| c.is_ascii_uppercase());
        let ascii = core.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        let mut words = Vec::new();
        for part in core.split('_').filter(|p| !p.is_empty()) {
            words.extend(split_case(part));
        }
        let style = if !ascii || core.is_empty() || core.contains("__") {
            Style::Other
        } else if !has_lower && has_upper {
            Style::Upper
        } else if core.contains('_') {
            if has_upper {
                Style::Other
            } else {
                Style::Snake
            }
        } else if core.starts_with(|c: char| c.is_ascii_uppercase()) {
            Style::Pascal
        } else if has_upper {
            Style::Camel
        } else {
            Style::Single
        };
        Words {
            prefix,
            words,
            suffix,
            style,
        }
    }

    /// Renders the words in `style`, keeping the underscores around them.
    pub fn render(&self, style: Style) -> String {
        let body = match style {
            Style::Snake | Style::Single | Style::Other => self.words.join("_"),
            Style::Upper => self.words.join("_").to_ascii_uppercase(),
            Style::Camel => {
                let mut out = String::new();
                for (i, w) in self.words.iter().enumerate() {
                    if i == 0 {
                        out.push_str(w);
                    } else {
                        out.push_str(&capitalize(w));
                    }
                }
                out
            }
            Style::Pascal => self.words.iter().map(|w| capitalize(w)).collect(),
        };
        format!("{}{body}{}", self.prefix, self.suffix)
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_ascii_uppercase().to_string() + chars.as_str(),
        None => String::new(),
    }
}

/// Splits one underscore-free chunk at case boundaries: `parseHTTPResponse`
/// gives `parse`, `http`, `response`; digits stay with the preceding word.
fn split_case(part: &str) -> Vec<String> {
    let chars: Vec<char> = part.chars().collect();
    let mut words = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let prev = chars[i - 1];
        let cur = chars[i];
        let next = chars.get(i + 1).copied();
        let boundary = (cur.is_ascii_uppercase() && (prev.is_ascii_lowercase() || prev.is_ascii_digit()))
            || (cur.is_ascii_uppercase()
                && prev.is_ascii_uppercase()
                && next.is_some_and(|n| n.is_ascii_lowercase()));
        if boundary {
            words.push(chars[start..i].iter().collect::<String>().to_ascii_lowercase());
            start = i;
        }
    }
    if start < chars.len() {
        words.push(chars[start..].iter().collect::<String>().to_ascii_lowercase());
    }
    words
}

/// Bindings that RENM and STYL may rename.
pub fn rename_candidates(
    bindings: &[IdentifierBinding],
    rename_functions: bool,
) -> Vec<&IdentifierBinding> {
    bindings
        .iter()
        .filter(|b| {
            let local = b.renameable && !b.keyword_passable;
            let function = rename_functions
                && b.kind == BindingKind::FunctionName
                && !matches!(b.scope_kind, ScopeKind::External | ScopeKind::Class)
                && !b.is_reserved
                && !(b.name.starts_with("__") && b.name.ends_with("__"));
            local || function
        })
        .collect()
}

/// Whether `name` can be introduced without clashing with any existing name
/// or a reserved word.
pub fn is_free(name: &str, language: Language, taken: &HashSet<String>) -> bool {
    !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && !taken.contains(name)
        && !language.is_reserved(name)
        && !language.is_keyword(name)
}

/// Renames every occurrence of each binding.
pub fn rename(tree: &ParseTree, renames: &[(&IdentifierBinding, String)]) -> String {
    let edits = renames
        .iter()
        .flat_map(|(b, new)| b.occurrences.iter().map(move |r| (r.clone(), new.clone())))
        .collect();
    apply_edits(tree.source(), edits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_and_styles() {
        let w = Words::split("parseHTTPResponse");
        assert_eq!(w.words, ["parse", "http", "response"]);
        assert_eq!(w.style, Style::Camel);
        assert_eq!(w.render(Style::Snake), "parse_http_response");
        let back = Words::split("parse_http_response");
        assert_eq!(back.style, Style::Snake);
        assert_eq!(back.render(Style::Camel), "parseHttpResponse");
        assert_eq!(Words::split("_new_data").render(Style::Camel), "_newData");
        assert_eq!(Words::split("MAX_SIZE").style, Style::Upper);
        assert_eq!(Words::split("Node").style, Style::Pascal);
        assert_eq!(Words::split("x").style, Style::Single);
        assert_eq!(Words::split("row2col").words, ["row2col"]);
        assert_eq!(Words::split("row2Col").words, ["row2", "col"]);
        assert_eq!(Words::split("__").style, Style::Other);
    }
}
