//! Ethiopic text front-end: homophone folding, tokenization and sentence
//! segmentation.

mod segment;
mod table;
mod tokenize;

pub use segment::{segment, Boundary, Sentence};
pub use table::{default_table, normalize, NormalizationTable};
pub use tokenize::{is_digit, is_punctuation, is_separator, tokenize, Token, TokenKind};

/// Normalize, tokenize and segment raw text into sentences of word surfaces.
///
/// Punctuation tokens are dropped from the returned word lists; empty
/// sentences (punctuation only) are skipped.
pub fn preprocess(text: &str, table: &NormalizationTable) -> Vec<Vec<String>> {
    let normalized = normalize(text, table);
    segment(&tokenize(&normalized))
        .into_iter()
        .map(|s| {
            s.tokens
                .into_iter()
                .filter(|t| t.kind != TokenKind::Punctuation)
                .map(|t| t.surface)
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect()
}
