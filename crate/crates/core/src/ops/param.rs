//! PARAM: give every function catch-all `*args` and `**kwargs` parameters.
//!
//! Calls that worked before still bind the same way; a bare `*` marker is
//! replaced by the variadic parameter, which keeps the keyword-only
//! parameters after it keyword-only.

use std::collections::HashSet;

use tree_sitter::Node;

use crate::error::Result;
use crate::idents::all_names;
use crate::ops::{parse_unit, OperatorId, OperatorOutcome};
use crate::rewrite::apply_edits;
use crate::units::CodeUnit;

pub fn apply(unit: &CodeUnit) -> Result<OperatorOutcome> {
    OperatorId::Param.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let mut taken = all_names(&tree);
    let mut edits = Vec::new();
    let mut sites = 0;
    for func in tree
        .named_nodes()
        .into_iter()
        .filter(|n| n.kind() == "function_definition")
    {
        let Some(params) = func.child_by_field_name("parameters") else { continue };
        let before = edits.len();
        extend(params, &mut taken, &mut edits);
        if edits.len() > before {
            sites += 1;
        }
    }
    let text = apply_edits(&unit.text, edits);
    Ok(OperatorOutcome::new(OperatorId::Param, &unit.text, text, sites, Vec::new()))
}

fn fresh(stem: &str, taken: &mut HashSet<String>) -> String {
    let name = std::iter::once(stem.to_string())
        .chain(std::iter::once(format!("_{stem}")))
        .chain((1..).map(|n| format!("{stem}{n}")))
        .find(|c| !taken.contains(c))
        .unwrap();
    taken.insert(name.clone());
    name
}

/// The splat pattern of a parameter, looking through a type annotation.
fn splat_kind<'t>(param: Node<'t>) -> Option<&'static str> {
    let inner = if param.kind() == "typed_parameter" {
        param.named_child(0)?
    } else {
        param
    };
    match inner.kind() {
        "list_splat_pattern" => Some("list"),
        "dictionary_splat_pattern" => Some("dict"),
        _ => None,
    }
}

fn extend(
    params: Node<'_>,
    taken: &mut HashSet<String>,
    edits: &mut Vec<(std::ops::Range<usize>, String)>,
) {
    let mut cursor = params.walk();
    let items: Vec<Node<'_>> = params
        .named_children(&mut cursor)
        .filter(|c| c.kind() != "comment")
        .collect();
    let has_list = items.iter().any(|p| splat_kind(*p) == Some("list"));
    let dict = items.iter().find(|p| splat_kind(**p) == Some("dict")).copied();
    let marker = items.iter().find(|p| p.kind() == "keyword_separator").copied();

    if !has_list {
        let args = fresh("args", taken);
        match (marker, dict) {
            (Some(star), _) => edits.push((star.byte_range(), format!("*{args}"))),
            (None, Some(d)) => edits.push((d.start_byte()..d.start_byte(), format!("*{args}, "))),
            (None, None) => {
                let kwargs = fresh("kwargs", taken);
                append(params, &items, format!("*{args}, **{kwargs}"), edits);
                return;
            }
        }
    }
    if dict.is_none() {
        let kwargs = fresh("kwargs", taken);
        append(params, &items, format!("**{kwargs}"), edits);
    }
}

fn append(
    params: Node<'_>,
    items: &[Node<'_>],
    text: String,
    edits: &mut Vec<(std::ops::Range<usize>, String)>,
) {
    match items.last() {
        Some(last) => edits.push((last.end_byte()..last.end_byte(), format!(", {text}"))),
        None => {
            let at = params.start_byte() + 1;
            edits.push((at..at, text));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{reparses, Language};
    use crate::units::Granularity;

    fn param(text: &str) -> OperatorOutcome {
        apply(&CodeUnit::from_text("t", Language::Python, Granularity::Method, text)).unwrap()
    }

    #[test]
    fn appends_catch_alls() {
        assert_eq!(param("def f(a, b=1):\n    pass\n").text, "def f(a, b=1, *args, **kwargs):\n    pass\n");
        assert_eq!(param("def f():\n    pass\n").text, "def f(*args, **kwargs):\n    pass\n");
        assert_eq!(param("def f(a,):\n    pass\n").text, "def f(a, *args, **kwargs,):\n    pass\n");
    }

    #[test]
    fn keyword_marker_and_existing_splats() {
        assert_eq!(param("def f(a, *, c):\n    pass\n").text, "def f(a, *args, c, **kwargs):\n    pass\n");
        assert_eq!(param("def f(a, **kw):\n    pass\n").text, "def f(a, *args, **kw):\n    pass\n");
        assert_eq!(param("def f(*xs: int):\n    pass\n").text, "def f(*xs: int, **kwargs):\n    pass\n");
        assert!(!param("def f(*a, **k):\n    pass\n").applied);
    }

    #[test]
    fn names_avoid_collisions_and_nested_functions_count() {
        let out = param("def f(args):\n    def g(kwargs):\n        return args\n    return g\n");
        assert_eq!(out.sites, 2);
        assert!(out.text.starts_with("def f(args, *_args, **_kwargs):"));
        assert!(out.text.contains("def g(kwargs, *args1, **kwargs1):"));
        assert!(reparses(&out.text, Language::Python));
    }
}
