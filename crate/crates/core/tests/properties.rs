//! Property tests: lossless round trip, NORM idempotence, COMM truth
//! tables and renaming soundness over generated programs.

use proptest::prelude::*;
use unleak_core::{
    apply, collect_identifiers, parse, render, reparses, CodeUnit, Granularity, Language, OperatorId, RefactorConfig,
};

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "count", "total", "row", "value", "item_list", "new_data"]).prop_map(str::to_string)
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![name(), (0i32..100).prop_map(|n| n.to_string()), Just("'x'".to_string())];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "==", "<"]), inner.clone())
                .prop_map(|(l, op, r)| format!("{l} {op} {r}")),
            inner.clone().prop_map(|e| format!("({e})")),
            inner.prop_map(|e| format!("len([{e}])")),
        ]
    })
}

fn statement(depth: u32) -> BoxedStrategy<String> {
    let simple = prop_oneof![
        (name(), expr()).prop_map(|(n, e)| format!("{n} = {e}")),
        expr().prop_map(|e| format!("print({e})")),
        Just("pass".to_string()),
    ];
    if depth == 0 {
        return simple.boxed();
    }
    let block = prop::collection::vec(statement(depth - 1), 1..3);
    prop_oneof![
        simple,
        (expr(), block.clone()).prop_map(|(c, b)| format!("if {c}:\n{}", indent(&b))),
        (expr(), block.clone(), block.clone())
            .prop_map(|(c, a, b)| format!("if {c}:\n{}else:\n{}", indent(&a), indent(&b))),
        (name(), name(), block).prop_map(|(v, xs, b)| format!("for {v} in {xs}:\n{}", indent(&b))),
    ]
    .boxed()
}

fn indent(block: &[String]) -> String {
    block.iter().flat_map(|s| s.lines()).map(|l| format!("    {l}\n")).collect()
}

fn function() -> impl Strategy<Value = String> {
    (prop::collection::vec(name(), 0..3), prop::collection::vec(statement(2), 1..5)).prop_map(|(params, body)| {
        let mut seen = Vec::new();
        for p in params {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        format!("def f({}):\n{}", seen.join(", "), indent(&body))
    })
}

fn py(text: &str) -> CodeUnit {
    CodeUnit::from_text("p", Language::Python, Granularity::Method, text)
}

/// Truth table of a Python boolean expression over `a`, `b`, `c`.
fn truth_table(expr: &str) -> Vec<bool> {
    (0..8)
        .map(|bits| {
            let env = |v: &str| match v {
                "a" => bits & 1 != 0,
                "b" => bits & 2 != 0,
                _ => bits & 4 != 0,
            };
            eval(expr.trim(), &env)
        })
        .collect()
}

fn eval(expr: &str, env: &dyn Fn(&str) -> bool) -> bool {
    // Lowest precedence first; splits only at depth zero.
    for op in [" or ", " and "] {
        let mut depth = 0;
        let bytes = expr.as_bytes();
        let mut parts = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'(' => depth += 1,
                b')' => depth -= 1,
                _ if depth == 0 && expr[i..].starts_with(op) => {
                    parts.push(&expr[start..i]);
                    i += op.len();
                    start = i;
                    continue;
                }
                _ => {}
            }
            i += 1;
        }
        if !parts.is_empty() {
            parts.push(&expr[start..]);
            let values: Vec<bool> = parts.iter().map(|p| eval(p.trim(), env)).collect();
            return if op == " or " { values.iter().any(|&v| v) } else { values.iter().all(|&v| v) };
        }
    }
    if let Some(rest) = expr.strip_prefix("not ") {
        return !eval(rest, env);
    }
    if let Some(inner) = expr.strip_prefix('(').and_then(|e| e.strip_suffix(')')) {
        return eval(inner, env);
    }
    env(expr)
}

fn bool_expr() -> impl Strategy<Value = String> {
    let leaf = prop::sample::select(vec!["a", "b", "c", "not a", "not b"]).prop_map(str::to_string);
    leaf.prop_recursive(3, 10, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| v.join(" and ")),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|v| v.join(" or ")),
            inner.prop_map(|e| format!("({e})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn render_is_lossless(src in function(), trailing in prop::sample::select(vec!["", "\n", "  \n\n", "# end\n"])) {
        let text = format!("{src}{trailing}");
        let tree = parse(&text, Language::Python).unwrap();
        prop_assert_eq!(render(&tree), text);
    }

    #[test]
    fn operators_keep_generated_programs_parseable(src in function(), seed in any::<u64>()) {
        let config = RefactorConfig::with_seed(seed);
        for op in OperatorId::full_chain(Language::Python, Granularity::Method) {
            match apply(op, &py(&src), &config) {
                Ok(out) => prop_assert!(reparses(&out.text, Language::Python), "{} broke:\n{}\n---\n{}", op, src, out.text),
                Err(unleak_core::Error::Precondition(_)) => {}
                Err(e) => prop_assert!(false, "{} failed: {}", op, e),
            }
        }
    }

    #[test]
    fn norm_is_idempotent(src in function()) {
        let config = RefactorConfig::default();
        let once = apply(OperatorId::Norm, &py(&src), &config).unwrap();
        let twice = apply(OperatorId::Norm, &py(&once.text), &config).unwrap();
        prop_assert_eq!(twice.text, once.text);
    }

    #[test]
    fn comm_preserves_truth_tables(e in bool_expr(), seed in any::<u64>()) {
        let src = format!("if {e}:\n    pass\n");
        let out = apply(OperatorId::Comm, &py(&src), &RefactorConfig::with_seed(seed)).unwrap();
        let cond = out.text.strip_prefix("if ").unwrap().strip_suffix(":\n    pass\n").unwrap();
        prop_assert_eq!(truth_table(cond), truth_table(&e), "{} -> {}", e, cond);
    }

    #[test]
    fn renaming_every_occurrence_is_sound(src in function()) {
        let tree = parse(&src, Language::Python).unwrap();
        for binding in collect_identifiers(&tree).into_iter().filter(|b| b.renameable) {
            let mut text = src.clone();
            let mut ranges = binding.occurrences.clone();
            ranges.sort_by_key(|r| std::cmp::Reverse(r.start));
            for r in ranges {
                text.replace_range(r, "zz_fresh");
            }
            let renamed = parse(&text, Language::Python).unwrap();
            prop_assert!(renamed.is_valid());
            let left: Vec<_> = collect_identifiers(&renamed)
                .into_iter()
                .filter(|b| b.name == binding.name && b.scope_kind == binding.scope_kind && b.kind == binding.kind && b.renameable)
                .collect();
            prop_assert!(left.is_empty(), "{} survived in\n{}", binding.name, text);
        }
    }
}
