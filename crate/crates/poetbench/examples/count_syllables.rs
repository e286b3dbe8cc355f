//! Count syllables for words and lines, with and without lexicon overrides.
//!
//! ```sh
//! cargo run --example count_syllables
//! cargo run --example count_syllables -- onomatopoeia "shall I compare thee"
//! ```

use anyhow::Result;
use poetbench::syllable::{count_syllables_line, count_syllables_word};
use poetbench::SyllableLexicon;

fn main() -> Result<()> {
    let inputs: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if inputs.is_empty() {
        ["poetry", "fire", "battle", "created", "rhythm", "the quality of mercy is not strained"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        inputs
    };

    let heuristic_only = SyllableLexicon::empty();
    let with_lexicon = SyllableLexicon::bundled();
    println!("{:<42} {:>9} {:>9}", "input", "heuristic", "lexicon");

    for input in &inputs {
        if input.split_whitespace().count() > 1 {
            let base = count_syllables_line(input, &heuristic_only);
            let adjusted = count_syllables_line(input, &with_lexicon);
            println!("{input:<42} {base:>9} {adjusted:>9}");
        } else {
            // Single words can fail (no vowels, digits); lines never do.
            let base = count_syllables_word(input, &heuristic_only)
                .map(|n| n.to_string())
                .unwrap_or_else(|e| format!("({e})"));
            let adjusted = count_syllables_word(input, &with_lexicon)
                .map(|n| n.to_string())
                .unwrap_or_else(|e| format!("({e})"));
            println!("{input:<42} {base:>9} {adjusted:>9}");
        }
    }
    Ok(())
}
