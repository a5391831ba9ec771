use super::tokenize::{Token, TokenKind};

/// What closed a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// A sentence-final mark (።, ?, ፧, !).
    Mark,
    /// Two consecutive commas of the same script, read as a full stop.
    CommaPair,
    /// Trailing fragment with no terminator.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    /// All tokens of the sentence, terminator included.
    pub tokens: Vec<Token>,
    /// The token that ended the sentence (the second comma of a pair).
    pub terminator: Option<Token>,
    pub boundary: Boundary,
}

fn is_final_mark(t: &Token) -> bool {
    t.kind == TokenKind::Punctuation && matches!(t.surface.as_str(), "።" | "?" | "፧" | "!")
}

fn is_comma(t: &Token) -> bool {
    t.kind == TokenKind::Punctuation && matches!(t.surface.as_str(), "፣" | ",")
}

pub fn segment(tokens: &[Token]) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    // true when the last pushed token is an unpaired comma
    let mut open_comma = false;

    for tok in tokens {
        let pairs_with_prev = open_comma
            && is_comma(tok)
            && current
                .last()
                .is_some_and(|prev| prev.surface == tok.surface);
        current.push(tok.clone());

        let boundary = if is_final_mark(tok) {
            Some(Boundary::Mark)
        } else if pairs_with_prev {
            Some(Boundary::CommaPair)
        } else {
            None
        };

        match boundary {
            Some(boundary) => {
                sentences.push(Sentence {
                    tokens: std::mem::take(&mut current),
                    terminator: Some(tok.clone()),
                    boundary,
                });
                open_comma = false;
            }
            None => open_comma = is_comma(tok),
        }
    }
    if !current.is_empty() {
        sentences.push(Sentence {
            tokens: current,
            terminator: None,
            boundary: Boundary::Open,
        });
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    #[test]
    fn two_marked_sentences() {
        let s = segment(&tokenize("ጤና ይስጥ። ደህና ነህ?"));
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].terminator.as_ref().unwrap().surface, "።");
        assert_eq!(s[1].terminator.as_ref().unwrap().surface, "?");
        assert!(s.iter().all(|s| s.boundary == Boundary::Mark));
    }

    #[test]
    fn empty_input() {
        assert!(segment(&[]).is_empty());
    }

    #[test]
    fn double_comma_is_full_stop() {
        let s = segment(&tokenize("መጣ,, ሄደ"));
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].boundary, Boundary::CommaPair);
        assert_eq!(s[0].tokens.len(), 3);
        assert_eq!(s[1].boundary, Boundary::Open);
        assert!(s[1].terminator.is_none());

        let s = segment(&tokenize("መጣ ፣ ፣ ሄደ"));
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].boundary, Boundary::CommaPair);
    }

    #[test]
    fn mixed_or_separated_commas_do_not_split() {
        assert_eq!(segment(&tokenize("መጣ ፣, ሄደ")).len(), 1);
        assert_eq!(segment(&tokenize("መጣ, ሄደ, ቆመ")).len(), 1);
    }

    #[test]
    fn triple_comma_splits_once() {
        let s = segment(&tokenize("ሀ,,, ለ"));
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].tokens[0].surface, ",");
    }

    #[test]
    fn wordspace_never_counts_as_comma() {
        assert_eq!(segment(&tokenize("ሰው፡፡መጣ")).len(), 1);
    }
}
