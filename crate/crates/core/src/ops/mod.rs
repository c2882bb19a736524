//! The eleven refactoring operators and the chain driver.
//!
//! Every operator is a pure function of its input unit, the configuration
//! and a seed. An operator that finds nothing to rewrite reports
//! `applied = false` and returns its input unchanged.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::syntax::{parse, reparses, Language, ParseTree};
use crate::units::{CodeUnit, Granularity};

pub mod comm;
pub mod deco;
pub mod iff;
pub mod inhr;
pub mod iter;
pub mod loops;
pub mod naming;
pub mod norm;
pub mod param;
pub mod renm;
pub mod shuf;
pub mod styl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorId {
    #[serde(rename = "IFF")]
    Iff,
    #[serde(rename = "LOOP")]
    Loop,
    #[serde(rename = "ITER")]
    Iter,
    #[serde(rename = "COMM")]
    Comm,
    #[serde(rename = "SHUF")]
    Shuf,
    #[serde(rename = "DECO")]
    Deco,
    #[serde(rename = "PARAM")]
    Param,
    #[serde(rename = "INHR")]
    Inhr,
    #[serde(rename = "RENM")]
    Renm,
    #[serde(rename = "NORM")]
    Norm,
    #[serde(rename = "STYL")]
    Styl,
}

impl OperatorId {
    /// Default order of the full chain: normalization first, then naming,
    /// then structural rewrites, then additions.
    pub const ALL_ORDER: [OperatorId; 11] = [
        OperatorId::Norm,
        OperatorId::Styl,
        OperatorId::Renm,
        OperatorId::Iff,
        OperatorId::Loop,
        OperatorId::Iter,
        OperatorId::Comm,
        OperatorId::Param,
        OperatorId::Deco,
        OperatorId::Shuf,
        OperatorId::Inhr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorId::Iff => "IFF",
            OperatorId::Loop => "LOOP",
            OperatorId::Iter => "ITER",
            OperatorId::Comm => "COMM",
            OperatorId::Shuf => "SHUF",
            OperatorId::Deco => "DECO",
            OperatorId::Param => "PARAM",
            OperatorId::Inhr => "INHR",
            OperatorId::Renm => "RENM",
            OperatorId::Norm => "NORM",
            OperatorId::Styl => "STYL",
        }
    }

    pub fn supports(self, language: Language) -> bool {
        match language {
            Language::Python => true,
            Language::Java => matches!(
                self,
                OperatorId::Iff | OperatorId::Loop | OperatorId::Renm | OperatorId::Norm
            ),
        }
    }

    /// Operators that only make sense on a whole class.
    pub fn class_level(self) -> bool {
        matches!(self, OperatorId::Shuf | OperatorId::Inhr)
    }

    /// The "ALL" chain for a unit of the given language and granularity.
    pub fn full_chain(language: Language, granularity: Granularity) -> Vec<OperatorId> {
        Self::ALL_ORDER
            .into_iter()
            .filter(|op| op.supports(language))
            .filter(|op| granularity != Granularity::Method || !op.class_level())
            .collect()
    }

    /// Parses `IFF,LOOP,...` (also accepts `+` as separator).
    pub fn parse_list(s: &str) -> Result<Vec<OperatorId>> {
        s.split([',', '+'])
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }

    pub(crate) fn check_language(self, language: Language) -> Result<()> {
        if self.supports(language) {
            Ok(())
        } else {
            Err(Error::UnsupportedOperator { op: self, language })
        }
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let op = match s.trim().to_ascii_uppercase().as_str() {
            "IFF" => OperatorId::Iff,
            "LOOP" => OperatorId::Loop,
            "ITER" => OperatorId::Iter,
            "COMM" => OperatorId::Comm,
            "SHUF" => OperatorId::Shuf,
            "DECO" => OperatorId::Deco,
            "PARAM" => OperatorId::Param,
            "INHR" => OperatorId::Inhr,
            "RENM" => OperatorId::Renm,
            "NORM" => OperatorId::Norm,
            "STYL" => OperatorId::Styl,
            other => return Err(Error::UnknownOperator(other.to_string())),
        };
        Ok(op)
    }
}

#[derive(Debug, Clone)]
pub struct RefactorConfig {
    pub seed: u64,
    pub max_renames: usize,
    pub max_inherited_methods: usize,
    pub lexicon: Arc<Lexicon>,
    /// Let RENM and STYL touch function names as well as locals.
    pub rename_functions: bool,
    pub operator_order: Vec<OperatorId>,
}

impl Default for RefactorConfig {
    fn default() -> Self {
        RefactorConfig {
            seed: 0,
            max_renames: 3,
            max_inherited_methods: 3,
            lexicon: Arc::new(Lexicon::default_english()),
            rename_functions: false,
            operator_order: OperatorId::ALL_ORDER.to_vec(),
        }
    }
}

impl RefactorConfig {
    pub fn with_seed(seed: u64) -> Self {
        RefactorConfig {
            seed,
            ..Default::default()
        }
    }

    /// Seed for one operator of a chain.
    pub fn op_seed(&self, op: OperatorId) -> u64 {
        mix_seed(self.seed, op.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorOutcome {
    pub operator: OperatorId,
    pub applied: bool,
    pub sites: usize,
    pub text: String,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub rolled_back: bool,
}

impl OperatorOutcome {
    pub(crate) fn new(
        operator: OperatorId,
        input: &str,
        text: String,
        sites: usize,
        notes: Vec<String>,
    ) -> Self {
        let applied = sites > 0 && text != input;
        OperatorOutcome {
            operator,
            applied,
            sites: if applied { sites } else { 0 },
            text: if applied { text } else { input.to_string() },
            notes,
            rolled_back: false,
        }
    }

    pub(crate) fn unchanged(operator: OperatorId, input: &str, notes: Vec<String>) -> Self {
        Self::new(operator, input, input.to_string(), 0, notes)
    }
}

/// Deterministic seed derivation (FNV-1a over the label, then splitmix64).
pub fn mix_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn parse_unit(unit: &CodeUnit) -> Result<ParseTree> {
    parse(&unit.text, unit.language)
}

pub fn apply_iff(unit: &CodeUnit) -> Result<OperatorOutcome> {
    iff::apply(unit)
}

pub fn apply_loop(unit: &CodeUnit) -> Result<OperatorOutcome> {
    loops::apply(unit)
}

pub fn apply_iter(unit: &CodeUnit) -> Result<OperatorOutcome> {
    iter::apply(unit)
}

pub fn apply_comm(unit: &CodeUnit, seed: u64) -> Result<OperatorOutcome> {
    comm::apply(unit, seed)
}

pub fn apply_shuf(unit: &CodeUnit, seed: u64) -> Result<OperatorOutcome> {
    shuf::apply(unit, seed)
}

pub fn apply_deco(unit: &CodeUnit, seed: u64) -> Result<OperatorOutcome> {
    deco::apply(unit, seed)
}

pub fn apply_param(unit: &CodeUnit) -> Result<OperatorOutcome> {
    param::apply(unit)
}

pub fn apply_inhr(
    class_unit: &CodeUnit,
    superclass_units: &[CodeUnit],
    max_methods: usize,
    seed: u64,
) -> Result<OperatorOutcome> {
    inhr::apply(class_unit, superclass_units, max_methods, seed)
}

pub fn apply_renm(
    unit: &CodeUnit,
    lexicon: &Lexicon,
    max_renames: usize,
    seed: u64,
) -> Result<OperatorOutcome> {
    renm::apply(unit, lexicon, max_renames, seed, false)
}

pub fn apply_norm(unit: &CodeUnit) -> Result<OperatorOutcome> {
    norm::apply(unit)
}

pub fn apply_styl(unit: &CodeUnit) -> Result<OperatorOutcome> {
    styl::apply(unit, false)
}

/// Runs one operator with the settings from `config`.
pub fn apply(op: OperatorId, unit: &CodeUnit, config: &RefactorConfig) -> Result<OperatorOutcome> {
    op.check_language(unit.language)?;
    let seed = config.op_seed(op);
    match op {
        OperatorId::Iff => iff::apply(unit),
        OperatorId::Loop => loops::apply(unit),
        OperatorId::Iter => iter::apply(unit),
        OperatorId::Comm => comm::apply(unit, seed),
        OperatorId::Shuf => shuf::apply(unit, seed),
        OperatorId::Deco => deco::apply(unit, seed),
        OperatorId::Param => param::apply(unit),
        OperatorId::Inhr => inhr::apply(unit, &unit.superclasses, config.max_inherited_methods, seed),
        OperatorId::Renm => renm::apply(
            unit,
            &config.lexicon,
            config.max_renames,
            seed,
            config.rename_functions,
        ),
        OperatorId::Norm => norm::apply(unit),
        OperatorId::Styl => styl::apply(unit, config.rename_functions),
    }
}

/// Applies `ops` in order, each consuming the previous output.
///
/// An operator whose output does not re-parse is rolled back and flagged;
/// precondition failures become notes on a not-applied outcome.
pub fn apply_chain(
    unit: &CodeUnit,
    ops: &[OperatorId],
    config: &RefactorConfig,
) -> Result<Vec<OperatorOutcome>> {
    for op in ops {
        op.check_language(unit.language)?;
    }
    let mut current = unit.clone();
    let mut outcomes = Vec::with_capacity(ops.len());
    for &op in ops {
        let outcome = match apply(op, &current, config) {
            Ok(outcome) if outcome.applied && !reparses(&outcome.text, unit.language) => {
                let mut rolled = OperatorOutcome::unchanged(
                    op,
                    &current.text,
                    vec![format!("{op} output failed to re-parse; rolled back")],
                );
                rolled.rolled_back = true;
                rolled
            }
            Ok(outcome) => outcome,
            Err(Error::Precondition(reason)) => {
                OperatorOutcome::unchanged(op, &current.text, vec![reason])
            }
            Err(other) => {
                let mut failed = OperatorOutcome::unchanged(op, &current.text, vec![other.to_string()]);
                failed.rolled_back = true;
                failed
            }
        };
        if outcome.applied {
            current = current.with_text(outcome.text.clone());
        }
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

/// Final text after a chain.
pub fn chain_text(unit: &CodeUnit, outcomes: &[OperatorOutcome]) -> String {
    outcomes
        .iter()
        .rev()
        .find(|o| o.applied)
        .map_or_else(|| unit.text.clone(), |o| o.text.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_names_round_trip() {
        for op in OperatorId::ALL_ORDER {
            assert_eq!(op.name().parse::<OperatorId>().unwrap(), op);
        }
        assert!("FOO".parse::<OperatorId>().is_err());
        assert_eq!(
            OperatorId::parse_list("norm, iff+LOOP").unwrap(),
            [OperatorId::Norm, OperatorId::Iff, OperatorId::Loop]
        );
    }

    #[test]
    fn full_chain_lengths() {
        assert_eq!(OperatorId::full_chain(Language::Python, Granularity::Method).len(), 9);
        assert_eq!(OperatorId::full_chain(Language::Python, Granularity::Class).len(), 11);
        let java = OperatorId::full_chain(Language::Java, Granularity::Class);
        assert_eq!(
            java,
            [OperatorId::Norm, OperatorId::Renm, OperatorId::Iff, OperatorId::Loop]
        );
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(mix_seed(7, "IFF"), mix_seed(7, "IFF"));
        assert_ne!(mix_seed(7, "IFF"), mix_seed(7, "COMM"));
        assert_ne!(mix_seed(7, "IFF"), mix_seed(8, "IFF"));
    }

    #[test]
    fn empty_chain_leaves_input() {
        let unit = CodeUnit::from_text("u", Language::Python, Granularity::Method, "def f():\n    return 1\n");
        let out = apply_chain(&unit, &[], &RefactorConfig::default()).unwrap();
        assert!(out.is_empty());
        assert_eq!(chain_text(&unit, &out), unit.text);
    }

    #[test]
    fn java_rejects_python_only_operators() {
        let unit = CodeUnit::from_text(
            "u",
            Language::Java,
            Granularity::Class,
            "class A { int f(int a) { return a; } }\n",
        );
        let config = RefactorConfig::default();
        for op in [
            OperatorId::Iter,
            OperatorId::Comm,
            OperatorId::Shuf,
            OperatorId::Deco,
            OperatorId::Param,
            OperatorId::Inhr,
            OperatorId::Styl,
        ] {
            assert!(matches!(
                apply(op, &unit, &config),
                Err(Error::UnsupportedOperator { .. })
            ));
            assert!(apply_chain(&unit, &[OperatorId::Norm, op], &config).is_err());
        }
    }
}
