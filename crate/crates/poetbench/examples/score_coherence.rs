//! Break a coherence score into its parts: grammaticality, redundancy
//! penalty, focus penalty, and the clamped composite.
//!
//! ```sh
//! cargo run --example score_coherence
//! POETBENCH_SCORER_URL=http://host/score cargo run --example score_coherence
//! ```

use anyhow::Result;
use poetbench::coherence::{coherence_report, GrammarScorer, NeutralScorer, RemoteScorer};
use poetbench::Poem;

fn main() -> Result<()> {
    let focused = Poem::from_text(concat!(
        "The river carried morning light downstream,\n",
        "and every bridge the river passed beneath\n",
        "held travelers who watched the water gleam\n",
        "and felt the current tugging at their feet.",
    ))
    .expect("builtin poem is non-empty");

    let repetitive = Poem::from_text(concat!(
        "the rain falls on the town tonight\n",
        "the rain falls on the town tonight\n",
        "the rain falls on the town tonight\n",
        "the rain falls on the town again",
    ))
    .expect("builtin poem is non-empty");

    let scattered = Poem::from_text(concat!(
        "quantum ledgers audit obsolete flamingos\n",
        "bicycle sonatas rust beneath parliament\n",
        "yesterday's algebra dissolved the marmalade\n",
        "vacuum chandeliers rehearse tectonic gossip",
    ))
    .expect("builtin poem is non-empty");

    // A remote grammar endpoint is used when configured; otherwise every
    // line scores a neutral 0.5 and only the penalties distinguish poems.
    let scorer: Box<dyn GrammarScorer> = match RemoteScorer::from_env() {
        Some(remote) => {
            println!("using remote grammar scorer from POETBENCH_SCORER_URL");
            Box::new(remote)
        }
        None => Box::new(NeutralScorer),
    };

    println!(
        "\n{:<12} {:>8} {:>11} {:>7} {:>10} {:>9}",
        "poem", "grammar", "redundancy", "focus", "composite", "fallback"
    );
    for (name, poem) in [ ("focused", &focused), ("repetitive", &repetitive), ("scattered", &scattered) ] {
        let report = coherence_report(poem, scorer.as_ref());
        println!(
            "{:<12} {:>8.3} {:>11.3} {:>7.3} {:>10.3} {:>9}",
            name,
            report.grammaticality,
            report.redundancy_penalty,
            report.focus_penalty,
            report.composite,
            report.scorer_fallback,
        );
    }
    Ok(())
}
