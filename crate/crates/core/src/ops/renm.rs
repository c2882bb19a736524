//! RENM: replace words of local identifiers with synonyms from a lexicon,
//! e.g. `new_data` becomes `advanced_data`.

use rand::seq::SliceRandom;

use crate::error::Result;
use crate::idents::{all_names, collect_identifiers};
use crate::lexicon::Lexicon;
use crate::ops::naming::{is_free, rename, rename_candidates, Style, Words};
use crate::ops::{parse_unit, rng, OperatorId, OperatorOutcome};
use crate::units::CodeUnit;

pub fn apply(
    unit: &CodeUnit,
    lexicon: &Lexicon,
    max_renames: usize,
    seed: u64,
    rename_functions: bool,
) -> Result<OperatorOutcome> {
    OperatorId::Renm.check_language(unit.language)?;
    let tree = parse_unit(unit)?;
    let bindings = collect_identifiers(&tree);
    let mut taken = all_names(&tree);
    let mut rng = rng(seed);

    let mut candidates = rename_candidates(&bindings, rename_functions);
    candidates.retain(|b| {
        let words = Words::split(&b.name);
        words.style != Style::Other && words.words.iter().any(|w| !lexicon.synonyms(w).is_empty())
    });
    candidates.shuffle(&mut rng);

    let mut renames = Vec::new();
    for b in candidates {
        if renames.len() >= max_renames {
            break;
        }
        let words = Words::split(&b.name);
        let mut options = Vec::new();
        for (i, w) in words.words.iter().enumerate() {
            for syn in lexicon.synonyms(w) {
                let mut replaced = words.clone();
                replaced.words[i] = syn.clone();
                options.push(replaced.render(words.style));
            }
        }
        options.shuffle(&mut rng);
        if let Some(new) = options.into_iter().find(|n| is_free(n, unit.language, &taken)) {
            taken.insert(new.clone());
            renames.push((b, new));
        }
    }
    let notes = renames
        .iter()
        .map(|(b, new)| format!("{} -> {new}", b.name))
        .collect();
    let text = rename(&tree, &renames);
    Ok(OperatorOutcome::new(OperatorId::Renm, &unit.text, text, renames.len(), notes))
}
