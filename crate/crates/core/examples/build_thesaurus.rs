//! Build a distributional thesaurus over the bundled toy corpus and print the
//! closest words and most salient context features for a few queries.

use std::path::Path;

use amsem::corpus::read_corpus;
use amsem::thesaurus::{build_dt, HolingConfig};

fn main() -> amsem::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_corpus.txt");
    let sentences = read_corpus(path, None)?;
    let cfg = HolingConfig {
        window: 2,
        min_word_feature_count: 1,
        ..HolingConfig::default()
    };
    let dt = build_dt(&sentences, &cfg)?;
    println!("{} words with at least one salient feature", dt.len());

    for word in ["ሄደ", "ልጁ", "ውሃ"] {
        let Ok(similar) = dt.similar(word, 4) else {
            println!("{word}: not in the thesaurus");
            continue;
        };
        let list: Vec<String> = similar
            .iter()
            .map(|n| format!("{} ({})", n.word, n.overlap))
            .collect();
        println!("{word}: {}", list.join(", "));
        if let Some(features) = dt.salient(word) {
            for f in features.iter().take(3) {
                println!("    {:<16} LMI {:.3}", f.feature, f.score);
            }
        }
    }
    Ok(())
}
