use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Punctuation,
    Number,
}

/// A token with its byte span into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub span: Range<usize>,
    pub kind: TokenKind,
}

/// Ethiopic wordspace (U+1361) separates words like a space does.
pub fn is_separator(c: char) -> bool {
    c.is_whitespace() || c == '\u{1361}'
}

pub fn is_punctuation(c: char) -> bool {
    matches!(c, '\u{1362}'..='\u{1367}' | '.' | ',' | ';' | '?' | '!')
}

/// ASCII digits and Ethiopic numerals (U+1369..=U+137C).
pub fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || ('\u{1369}'..='\u{137C}').contains(&c)
}

fn class(c: char) -> Option<TokenKind> {
    if is_separator(c) {
        None
    } else if is_punctuation(c) {
        Some(TokenKind::Punctuation)
    } else if is_digit(c) {
        Some(TokenKind::Number)
    } else {
        Some(TokenKind::Word)
    }
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<(usize, TokenKind)> = None;

    let flush = |tokens: &mut Vec<Token>, start: usize, end: usize, kind: TokenKind| {
        tokens.push(Token {
            surface: text[start..end].to_string(),
            span: start..end,
            kind,
        });
    };

    for (pos, c) in text.char_indices() {
        let kind = class(c);
        if let Some((start, open)) = current {
            // punctuation never extends a run
            if kind != Some(open) || open == TokenKind::Punctuation {
                flush(&mut tokens, start, pos, open);
                current = None;
            }
        }
        if current.is_none() {
            current = kind.map(|k| (pos, k));
        }
    }
    if let Some((start, kind)) = current {
        flush(&mut tokens, start, text.len(), kind);
    }
    tokens
}
