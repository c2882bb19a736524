use proptest::prelude::*;
use unleak_sketch::{overlap, NgramSketch, Oracle, SketchParams};

fn exact(width: usize, docs: &[String]) -> NgramSketch {
    let mut s = NgramSketch::exact(width).unwrap();
    for d in docs {
        s.insert_text(d);
    }
    s
}

fn text() -> impl Strategy<Value = String> {
    // A small alphabet with whitespace so that windows repeat and straddle gaps.
    proptest::string::string_regex("[ab c\n\u{e9}]{0,60}").unwrap()
}

proptest! {
    #[test]
    fn exact_sketch_agrees_with_the_oracle(
        docs in prop::collection::vec(text(), 1..5),
        probe in text(),
        width in 1usize..6,
    ) {
        let sketch = exact(width, &docs);
        let refs: Vec<&str> = docs.iter().map(String::as_str).collect();
        let oracle = Oracle::new(width, &refs);
        let got = overlap(&probe, &sketch);
        let want = oracle.overlap(&probe);
        prop_assert_eq!(got.overlapped_chars, want.overlapped_chars);
        prop_assert_eq!(got.total_chars, want.total_chars);
        prop_assert_eq!(got.matched_ranges, want.matched_ranges);
    }

    #[test]
    fn filter_never_misses_and_only_overcounts(
        docs in prop::collection::vec(text(), 1..5),
        probe in text(),
        width in 1usize..6,
    ) {
        let params = SketchParams::for_capacity(width, 400, 1e-3).unwrap();
        let mut filter = NgramSketch::new(params).unwrap();
        for d in &docs {
            filter.insert_text(d);
        }
        let refs: Vec<&str> = docs.iter().map(String::as_str).collect();
        let want = Oracle::new(width, &refs).overlap(&probe);
        prop_assert!(overlap(&probe, &filter).overlapped_chars >= want.overlapped_chars);
        for d in &docs {
            prop_assert_eq!(overlap(d, &filter).overlapped_chars, overlap(d, &exact(width, &docs)).overlapped_chars);
        }
    }

    #[test]
    fn adding_documents_never_lowers_overlap(
        docs in prop::collection::vec(text(), 1..4),
        extra in text(),
        probe in text(),
    ) {
        let before = overlap(&probe, &exact(3, &docs)).ratio;
        let mut more = docs.clone();
        more.push(extra);
        prop_assert!(overlap(&probe, &exact(3, &more)).ratio >= before);
    }

    #[test]
    fn ratio_is_a_fraction(docs in prop::collection::vec(text(), 1..3), probe in text()) {
        let r = overlap(&probe, &exact(4, &docs));
        prop_assert!((0.0..=1.0).contains(&r.ratio));
        prop_assert!(r.overlapped_chars <= r.total_chars);
    }
}
