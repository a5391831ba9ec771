//! Linear-chain sequence tagging for POS and NER.

mod eval;
mod features;
mod perceptron;
mod viterbi;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eval::{bio_spans, evaluate_spans, evaluate_tokens, Span, SpanReport, TokenReport};
pub use features::{handcrafted_features, FeatureFn, FeatureSet, WordClusters};
pub use perceptron::{train, PerceptronTrainer, TaggerModel, TrainConfig};
pub use viterbi::{decode, path_score, Scores};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSequence {
    tokens: Vec<String>,
    labels: Vec<String>,
}

impl TaggedSequence {
    pub fn new(tokens: Vec<String>, labels: Vec<String>) -> Result<Self> {
        if tokens.is_empty() || tokens.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "tagged sequence needs equal, non-zero lengths (got {} tokens, {} labels)",
                tokens.len(),
                labels.len()
            )));
        }
        Ok(TaggedSequence { tokens, labels })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Read CoNLL data: `token<TAB>tag` per line, blank line between sequences.
pub fn read_conll(path: impl AsRef<Path>) -> Result<Vec<TaggedSequence>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_conll(BufReader::new(file), &path.display().to_string())
}

pub fn parse_conll<R: BufRead>(reader: R, what: &str) -> Result<Vec<TaggedSequence>> {
    let mut out = Vec::new();
    let (mut tokens, mut labels) = (Vec::new(), Vec::new());
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(what, idx + 1, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !tokens.is_empty() {
                out.push(TaggedSequence::new(
                    std::mem::take(&mut tokens),
                    std::mem::take(&mut labels),
                )?);
            }
            continue;
        }
        let Some((tok, tag)) = line.split_once('\t') else {
            return Err(Error::parse(what, idx + 1, "expected token<TAB>tag"));
        };
        if tok.is_empty() || tag.is_empty() || tag.contains('\t') {
            return Err(Error::parse(what, idx + 1, "expected token<TAB>tag"));
        }
        tokens.push(tok.to_string());
        labels.push(tag.to_string());
    }
    if !tokens.is_empty() {
        out.push(TaggedSequence::new(tokens, labels)?);
    }
    Ok(out)
}

pub fn write_conll(path: impl AsRef<Path>, data: &[TaggedSequence]) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for seq in data {
        for (t, l) in seq.tokens.iter().zip(&seq.labels) {
            writeln!(out, "{t}\t{l}").map_err(|e| Error::io(path, e))?;
        }
        writeln!(out).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conll_parse() {
        let text = "ሰው\tN\nመጣ\tV\n\n\nእሱ\tPRON\n";
        let data = parse_conll(text.as_bytes(), "x").unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data[0].labels(), &["N", "V"]);
        let err = parse_conll("a b\n".as_bytes(), "x").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn sequence_lengths() {
        assert!(TaggedSequence::new(vec![], vec![]).is_err());
        assert!(TaggedSequence::new(vec!["a".into()], vec![]).is_err());
    }
}
