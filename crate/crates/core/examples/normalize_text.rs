//! Normalize homophone characters, tokenize and split into sentences.
//!
//! ```text
//! cargo run --example normalize_text
//! ```

use amsem::text::{default_table, normalize, segment, tokenize};

fn main() {
    let raw = "ሠላም ፀሐይ፡ወጣች። ዐይኑ ታመመ? ልጁ መጣ፣፣ እናቱ ሄደች";
    let table = default_table();
    let text = normalize(raw, table);
    println!("raw:        {raw}");
    println!(
        "normalized: {text}  ({} mappings in {:?})",
        table.len(),
        table.name()
    );

    for (i, s) in segment(&tokenize(&text)).iter().enumerate() {
        let words: Vec<&str> = s.tokens.iter().map(|t| t.surface.as_str()).collect();
        println!("sentence {i} [{:?}]: {}", s.boundary, words.join(" | "));
    }
}
