use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unleak_metrics::{aggregate, min_k_prob, pair_deltas, perplexity, LogProbTrace, SignConvention};

fn random_trace(rng: &mut ChaCha8Rng, unit: usize) -> LogProbTrace {
    let n = rng.gen_range(1..200);
    LogProbTrace::new("m", format!("u{unit}"), "original", (0..n).map(|_| -rng.gen_range(0.0..12.0)))
}

#[test]
fn uniform_half_traces_have_perplexity_two() {
    for n in 1..200 {
        let t = LogProbTrace::new("m", "u", "original", vec![0.5f64.ln(); n]);
        assert!((perplexity(&t).unwrap() - 2.0).abs() <= 1e-12, "n = {n}");
        for k in [1.0, 20.0, 50.0, 100.0] {
            assert!((min_k_prob(&t, k).unwrap() - 2f64.ln()).abs() <= 1e-12);
        }
    }
}

#[test]
fn full_min_k_is_log_perplexity_on_random_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for unit in 0..1000 {
        let t = random_trace(&mut rng, unit);
        let ppl = perplexity(&t).unwrap();
        assert!((min_k_prob(&t, 100.0).unwrap() - ppl.ln()).abs() <= 1e-12);
    }
}

#[test]
fn monotone_shift_makes_both_deltas_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let orig = random_trace(&mut rng, 0);
    let mut refac = orig.clone();
    refac.variant = "ALL".into();
    for t in &mut refac.tokens {
        t.lp -= 0.3;
    }
    let (deltas, _) = pair_deltas(&[orig, refac], 20.0, SignConvention::default()).unwrap();
    assert!(deltas[0].ppl_delta > 0.0 && deltas[0].mink_delta > 0.0);
    let table = aggregate(&deltas);
    assert_eq!(table.row("ALL").unwrap().cells["m"].ppl_delta, deltas[0].ppl_delta);
}

fn logprobs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0f64..=0.0, 1..100)
}

proptest! {
    #[test]
    fn lower_k_selects_a_less_likely_subset(lps in logprobs(), k1 in 0.1f64..100.0, k2 in 0.1f64..100.0) {
        let t = LogProbTrace::new("m", "u", "original", lps);
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        prop_assert!(min_k_prob(&t, lo).unwrap() >= min_k_prob(&t, hi).unwrap() - 1e-12);
    }

    #[test]
    fn scores_ignore_token_order(mut lps in logprobs(), k in 0.1f64..=100.0) {
        let a = LogProbTrace::new("m", "u", "original", lps.clone());
        lps.reverse();
        let b = LogProbTrace::new("m", "u", "original", lps);
        prop_assert_eq!(min_k_prob(&a, k).unwrap(), min_k_prob(&b, k).unwrap());
        prop_assert!((perplexity(&a).unwrap() - perplexity(&b).unwrap()).abs() <= 1e-9 * perplexity(&a).unwrap());
    }

    #[test]
    fn translation_shifts_scores(lps in logprobs(), c in 0.01f64..5.0, k in 0.1f64..=100.0) {
        let a = LogProbTrace::new("m", "u", "original", lps.clone());
        let b = LogProbTrace::new("m", "u", "original", lps.iter().map(|lp| lp - c));
        prop_assert!((min_k_prob(&b, k).unwrap() - min_k_prob(&a, k).unwrap() - c).abs() < 1e-9);
        let ratio = perplexity(&b).unwrap() / perplexity(&a).unwrap();
        prop_assert!((ratio / c.exp() - 1.0).abs() < 1e-9);
    }
}
