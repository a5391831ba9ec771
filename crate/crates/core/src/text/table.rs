use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const DEFAULT_TABLE_TSV: &str = include_str!("../../data/normalization.tsv");

/// Character folding map for homophone Fidel variants.
///
/// Every canonical character is guaranteed not to be a key, so applying the
/// table is idempotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationTable {
    name: String,
    entries: BTreeMap<char, char>,
}

impl NormalizationTable {
    /// Build a table from explicit pairs, validating its invariants.
    pub fn from_pairs(
        name: impl Into<String>,
        pairs: impl IntoIterator<Item = (char, char)>,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (src, canon) in pairs {
            if let Some(prev) = entries.insert(src, canon) {
                if prev != canon {
                    return Err(Error::InvalidInput(format!(
                        "conflicting entries for {src:?}: {prev:?} and {canon:?}"
                    )));
                }
            }
        }
        let table = NormalizationTable {
            name: name.into(),
            entries,
        };
        table.validate()?;
        Ok(table)
    }

    /// Parse the `source<TAB>canonical` format. `#` lines and blank lines
    /// are ignored.
    pub fn from_tsv(name: impl Into<String>, text: &str) -> Result<Self> {
        let name = name.into();
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (src, canon) = match (cols.next(), cols.next(), cols.next()) {
                (Some(a), Some(b), None) => (single_char(a), single_char(b)),
                _ => {
                    return Err(Error::parse(
                        &name,
                        idx + 1,
                        "expected two tab-separated columns",
                    ))
                }
            };
            match (src, canon) {
                (Some(s), Some(c)) => pairs.push((s, c)),
                _ => {
                    return Err(Error::parse(
                        &name,
                        idx + 1,
                        "each column must hold exactly one character",
                    ))
                }
            }
        }
        Self::from_pairs(name, pairs)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv(path.display().to_string(), &text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn get(&self, c: char) -> Option<char> {
        self.entries.get(&c).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, char)> + '_ {
        self.entries.iter().map(|(&s, &c)| (s, c))
    }

    fn validate(&self) -> Result<()> {
        for (&src, &canon) in &self.entries {
            if src == canon {
                return Err(Error::InvalidInput(format!("identity entry for {src:?}")));
            }
            if self.entries.contains_key(&canon) {
                return Err(Error::InvalidInput(format!(
                    "canonical character {canon:?} is itself a key"
                )));
            }
        }
        self.check_families()
    }

    /// Ethiopic syllables are laid out in rows of eight code points, one
    /// row per consonant. Mapped rows must fold order-by-order onto a single
    /// canonical row.
    fn check_families(&self) -> Result<()> {
        let mut row_target: BTreeMap<u32, u32> = BTreeMap::new();
        for (&src, &canon) in &self.entries {
            if !is_syllable(src) || !is_syllable(canon) {
                continue;
            }
            let (s, c) = (src as u32, canon as u32);
            if s & 7 != c & 7 {
                return Err(Error::InvalidInput(format!(
                    "{src:?} and {canon:?} are different vowel orders"
                )));
            }
            let target = c & !7;
            match row_target.insert(s & !7, target) {
                Some(prev) if prev != target => {
                    return Err(Error::InvalidInput(format!(
                        "family of {src:?} maps onto more than one canonical family"
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn single_char(s: &str) -> Option<char> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

fn is_syllable(c: char) -> bool {
    ('\u{1200}'..='\u{135A}').contains(&c)
}

/// The shipped homophone table (ሀ, ሰ, አ and ጸ families).
pub fn default_table() -> &'static NormalizationTable {
    static TABLE: OnceLock<NormalizationTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        NormalizationTable::from_tsv("default", DEFAULT_TABLE_TSV)
            .expect("bundled normalization table is valid")
    })
}

pub fn normalize(text: &str, table: &NormalizationTable) -> String {
    text.chars().map(|c| table.get(c).unwrap_or(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lookups() {
        let t = default_table();
        assert_eq!(t.get('ሠ'), Some('ሰ'));
        assert_eq!(t.get('ሰ'), None);
        assert_eq!(t.get('ዐ'), Some('አ'));
    }

    #[test]
    fn normalize_examples() {
        let t = default_table();
        assert_eq!(normalize("ሠው", t), "ሰው");
        assert_eq!(normalize("", t), "");
        assert_eq!(normalize("ፀሐይ", t), "ጸሀይ");
        assert_eq!(normalize("abc ሰላም", t), "abc ሰላም");
    }

    #[test]
    fn rejects_identity_and_chains() {
        assert!(NormalizationTable::from_pairs("t", [('a', 'a')]).is_err());
        assert!(NormalizationTable::from_pairs("t", [('a', 'b'), ('b', 'c')]).is_err());
        assert!(NormalizationTable::from_pairs("t", [('a', 'b'), ('a', 'c')]).is_err());
    }

    #[test]
    fn rejects_split_family() {
        // ሐ -> ሀ but ሑ -> ሱ
        let r = NormalizationTable::from_pairs("t", [('ሐ', 'ሀ'), ('ሑ', 'ሱ')]);
        assert!(r.is_err());
        let r = NormalizationTable::from_pairs("t", [('ሐ', 'ሁ')]);
        assert!(r.is_err());
    }

    #[test]
    fn tsv_parse_errors_carry_line() {
        let err = NormalizationTable::from_tsv("x", "# c\nሐ\tሀ\nbad line\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
