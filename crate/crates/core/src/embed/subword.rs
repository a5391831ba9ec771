use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubwordConfig {
    pub ngram_len: usize,
    pub bucket_count: u32,
}

impl Default for SubwordConfig {
    fn default() -> Self {
        SubwordConfig {
            ngram_len: 5,
            bucket_count: 2_000_000,
        }
    }
}

/// 32-bit FNV-1a.
pub fn fnv1a32(bytes: &[u8]) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for &b in bytes {
        h ^= b as u32;
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

/// Character n-grams of length `n` of the word wrapped in `<` and `>`.
pub fn char_ngrams(word: &str, n: usize) -> Vec<String> {
    let padded: Vec<char> = std::iter::once('<')
        .chain(word.chars())
        .chain(std::iter::once('>'))
        .collect();
    if n == 0 || padded.len() < n {
        return Vec::new();
    }
    padded.windows(n).map(|w| w.iter().collect()).collect()
}

pub fn ngram_buckets(word: &str, cfg: &SubwordConfig) -> Vec<u32> {
    char_ngrams(word, cfg.ngram_len)
        .iter()
        .map(|g| fnv1a32(g.as_bytes()) % cfg.bucket_count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a32(b""), 0x811c9dc5);
        assert_eq!(fnv1a32(b"a"), 0xe40c292c);
        assert_eq!(fnv1a32(b"foobar"), 0xbf9cf968);
    }

    #[test]
    fn ngrams_of_short_and_long_words() {
        assert_eq!(char_ngrams("ab", 5), Vec::<String>::new());
        assert_eq!(char_ngrams("abc", 5), vec!["<abc>"]);
        assert_eq!(char_ngrams("ሰላምታ", 5), vec!["<ሰላምታ", "ሰላምታ>"]);
    }
}
