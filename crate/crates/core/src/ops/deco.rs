//! DECO: wrap functions in a transparent instrumentation decorator.
//!
//! One of two self-contained helpers (`timing` or `measure_memory_usage`) is
//! chosen by the seed, defined at the top of the unit, and applied as the
//! innermost decorator of every top-level function and method. The wrapper
//! passes all arguments through and returns the wrapped result unchanged.

use rand::Rng;

use crate::error::Result;
use crate::idents::all_names;
use crate::ops::{parse_unit, rng, OperatorId, OperatorOutcome};
use crate::rewrite::{apply_edits, line_indent, token};
use crate::units::CodeUnit;

const TIMING: &str = "\
def timing(func):
    import functools
    import time

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        wrapper.elapsed = time.perf_counter() - start
        return result

    return wrapper
";

const MEMORY: &str = "\
def measure_memory_usage(func):
    import functools
    import tracemalloc

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        started = not tracemalloc.is_tracing()
        if started:
            tracemalloc.start()
        try:
            return func(*args, **kwargs)
        finally:
            wrapper.peak = tracemalloc.get_traced_memory()[1]
            if started:
                tracemalloc.stop()

    return wrapper
";

pub const HELPERS: [(&str, &str); 2] = [("timing", TIMING), ("measure_memory_usage", MEMORY)];

pub fn apply(unit: &CodeUnit, seed: u64) -> Result<OperatorOutcome> {
    OperatorId::Deco.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let names = all_names(&tree);
    if let Some((name, _)) = HELPERS.iter().find(|(n, _)| names.contains(*n)) {
        return Ok(OperatorOutcome::unchanged(
            OperatorId::Deco,
            &unit.text,
            vec![format!("unit already uses the name `{name}`")],
        ));
    }
    let (name, helper) = HELPERS[rng(seed).gen_range(0..HELPERS.len())];

    let src = tree.source();
    let mut edits = Vec::new();
    let mut notes = Vec::new();
    for func in tree
        .named_nodes()
        .into_iter()
        .filter(|n| n.kind() == "function_definition")
    {
        let mut nested = false;
        let mut cur = func.parent();
        while let Some(p) = cur {
            if p.kind() == "function_definition" {
                nested = true;
                break;
            }
            cur = p.parent();
        }
        if nested {
            continue;
        }
        if token(func, "async").is_some() {
            notes.push(format!("skipped async function at line {}", func.start_position().row + 1));
            continue;
        }
        let at = func.start_byte();
        let indent = line_indent(src, at);
        edits.push((at..at, format!("@{name}\n{indent}")));
    }
    let sites = edits.len();
    if sites == 0 {
        return Ok(OperatorOutcome::unchanged(OperatorId::Deco, &unit.text, notes));
    }

    // Helpers go after any `from __future__ import` lines.
    let root = tree.root();
    let mut cursor = root.walk();
    let insert_at = root
        .named_children(&mut cursor)
        .take_while(|c| c.kind() == "future_import_statement" || c.kind() == "comment")
        .filter(|c| c.kind() == "future_import_statement")
        .last()
        .map_or(0, |c| src[c.end_byte()..].find('\n').map_or(src.len(), |i| c.end_byte() + i + 1));
    let block = if insert_at == 0 {
        format!("{helper}\n\n")
    } else {
        format!("\n\n{helper}\n\n")
    };
    edits.insert(0, (insert_at..insert_at, block));
    let text = apply_edits(src, edits);
    Ok(OperatorOutcome::new(OperatorId::Deco, &unit.text, text, sites, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{reparses, Language};
    use crate::units::Granularity;

    fn deco(text: &str, seed: u64) -> OperatorOutcome {
        apply(&CodeUnit::from_text("t", Language::Python, Granularity::Method, text), seed).unwrap()
    }

    #[test]
    fn decorates_innermost_and_defines_helper() {
        let out = deco("@staticmethod\ndef f(x):\n    return x\n", 0);
        assert!(out.applied);
        let (name, helper) = HELPERS.iter().find(|(n, _)| out.text.contains(&format!("@{n}\n"))).unwrap();
        assert!(out.text.starts_with(helper));
        assert!(out.text.ends_with(&format!("@staticmethod\n@{name}\ndef f(x):\n    return x\n")));
        assert!(reparses(&out.text, Language::Python));
    }

    #[test]
    fn both_helpers_are_reachable_by_seed() {
        let chosen: std::collections::HashSet<bool> = (0..16)
            .map(|s| deco("def f():\n    pass\n", s).text.contains("@timing"))
            .collect();
        assert_eq!(chosen.len(), 2);
    }

    #[test]
    fn methods_get_decorated_nested_functions_do_not() {
        let src = "class A:\n    def m(self):\n        def inner():\n            pass\n        return inner\n\n    async def n(self):\n        pass\n";
        let out = deco(src, 1);
        assert_eq!(out.sites, 1);
        assert_eq!(out.notes.len(), 1);
        assert!(reparses(&out.text, Language::Python));
    }

    #[test]
    fn future_imports_stay_first_and_name_clash_skips() {
        let out = deco("from __future__ import annotations\ndef f():\n    pass\n", 0);
        assert!(out.text.starts_with("from __future__ import annotations\n\n\ndef "));
        let out = deco("def f(timing):\n    return timing\n", 0);
        assert!(!out.applied);
    }
}
