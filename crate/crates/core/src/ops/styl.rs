//! STYL: switch local identifiers between snake_case and camelCase.

use crate::error::Result;
use crate::idents::{all_names, collect_identifiers};
use crate::ops::naming::{is_free, rename, rename_candidates, Style, Words};
use crate::ops::{parse_unit, OperatorId, OperatorOutcome};
use crate::units::CodeUnit;

pub fn apply(unit: &CodeUnit, rename_functions: bool) -> Result<OperatorOutcome> {
    OperatorId::Styl.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let bindings = collect_identifiers(&tree);
    let mut taken = all_names(&tree);
    let mut renames = Vec::new();
    let mut notes = Vec::new();
    for b in rename_candidates(&bindings, rename_functions) {
        let words = Words::split(&b.name);
        let target = match words.style {
            Style::Snake => Style::Camel,
            Style::Camel => Style::Snake,
            _ => continue,
        };
        let new = words.render(target);
        if new == b.name {
            continue;
        }
        if !is_free(&new, unit.language, &taken) {
            notes.push(format!("kept `{}`: `{new}` is already in use", b.name));
            continue;
        }
        taken.insert(new.clone());
        renames.push((b, new));
    }
    let text = rename(&tree, &renames);
    Ok(OperatorOutcome::new(OperatorId::Styl, &unit.text, text, renames.len(), notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Language;
    use crate::units::Granularity;

    fn py(text: &str) -> CodeUnit {
        CodeUnit::from_text("t", Language::Python, Granularity::Method, text)
    }

    #[test]
    fn snake_and_camel_swap() {
        let src = "def f(rows):\n    current_row = 0\n    rowCount = len(rows)\n    return current_row + rowCount\n";
        let out = apply(&py(src), false).unwrap();
        assert_eq!(
            out.text,
            "def f(rows):\n    currentRow = 0\n    row_count = len(rows)\n    return currentRow + row_count\n"
        );
        assert_eq!(out.sites, 2);
    }

    #[test]
    fn collisions_and_non_locals_are_kept() {
        let src = "def f(a):\n    new_data = 1\n    newData = 2\n    return obj.some_attr + new_data + newData\n";
        let out = apply(&py(src), false).unwrap();
        assert!(!out.applied);
        assert_eq!(out.notes.len(), 2);
    }

    #[test]
    fn function_names_only_on_request() {
        let src = "def load_all(x):\n    return x\n";
        assert!(!apply(&py(src), false).unwrap().applied);
        assert_eq!(apply(&py(src), true).unwrap().text, "def loadAll(x):\n    return x\n");
    }

    #[test]
    fn java_is_rejected() {
        let unit = CodeUnit::from_text("j", Language::Java, Granularity::Method, "void f() {}\n");
        assert!(apply(&unit, false).is_err());
    }
}
