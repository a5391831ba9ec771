use amsem::text::{default_table, normalize, segment, tokenize, Boundary, TokenKind};
use proptest::prelude::*;

fn ethiopic_or_ascii() -> impl Strategy<Value = String> {
    let ch = prop_oneof![
        6 => (0x1200u32..=0x137F).prop_map(|c| char::from_u32(c).unwrap()),
        2 => (0x20u32..0x7F).prop_map(|c| char::from_u32(c).unwrap()),
        1 => prop::sample::select(vec![' ', '\n', '\u{1361}', '።', '፣', '፧', '?', '!', ',']),
    ];
    prop::collection::vec(ch, 0..64).prop_map(|v| v.into_iter().collect())
}

fn is_gap(c: char) -> bool {
    c.is_whitespace() || c == '\u{1361}'
}

proptest! {
    #[test]
    fn normalize_is_idempotent(s in ethiopic_or_ascii()) {
        let t = default_table();
        let once = normalize(&s, t);
        prop_assert_eq!(normalize(&once, t), once.clone());
        prop_assert_eq!(once.chars().count(), s.chars().count());
    }

    #[test]
    fn tokens_partition_the_text(s in ethiopic_or_ascii()) {
        let tokens = tokenize(&s);
        let mut rebuilt = String::new();
        let mut cursor = 0;
        for t in &tokens {
            prop_assert!(t.span.start >= cursor && t.span.start < t.span.end);
            let gap = &s[cursor..t.span.start];
            prop_assert!(gap.chars().all(is_gap));
            rebuilt.push_str(gap);
            prop_assert_eq!(&s[t.span.clone()], t.surface.as_str());
            rebuilt.push_str(&t.surface);
            cursor = t.span.end;
        }
        let tail = &s[cursor..];
        prop_assert!(tail.chars().all(is_gap));
        rebuilt.push_str(tail);
        prop_assert_eq!(rebuilt, s);
    }

    #[test]
    fn segmentation_keeps_every_token(s in ethiopic_or_ascii()) {
        let tokens = tokenize(&s);
        let flat: Vec<_> = segment(&tokens).into_iter().flat_map(|x| x.tokens).collect();
        prop_assert_eq!(flat, tokens);
    }
}

#[test]
fn homophone_pair_from_the_literature() {
    assert_eq!(normalize("ሠው", default_table()), "ሰው");
}

#[test]
fn wordspace_separates_and_full_stop_is_punctuation() {
    let t = tokenize("ሰው፡መጣ።");
    let got: Vec<_> = t.iter().map(|t| (t.surface.as_str(), t.kind)).collect();
    assert_eq!(
        got,
        [
            ("ሰው", TokenKind::Word),
            ("መጣ", TokenKind::Word),
            ("።", TokenKind::Punctuation)
        ]
    );
}

#[test]
fn double_latin_comma_ends_a_sentence() {
    let s = segment(&tokenize("መጣ,, ሄደ"));
    assert_eq!(s.len(), 2);
    assert_eq!(s[0].boundary, Boundary::CommaPair);
    assert_eq!(s[1].boundary, Boundary::Open);
}

#[test]
fn ethiopic_numerals_form_number_tokens() {
    let t = tokenize("፲፱ 2020ዓ.ም");
    assert_eq!(t[0].kind, TokenKind::Number);
    assert_eq!(t[1].surface, "2020");
    assert_eq!(t[1].kind, TokenKind::Number);
}
