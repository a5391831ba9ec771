mod common;

use amsem::embed::objective::{cbow_gradient, cbow_loss, ns_gradient, ns_loss};
use amsem::embed::{
    self, subsample_keep_probability, EmbedConfig, Mode, NoiseSampler, SubwordConfig, Trainer,
};
use common::{max_gradient_error, random_vector, rng};
use proptest::prelude::*;
use rand::Rng;

const DIM: usize = 6;

fn split(x: &[f64], parts: usize) -> Vec<&[f64]> {
    x.chunks(DIM).take(parts).collect()
}

#[test]
fn skipgram_gradient_matches_finite_differences() {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = r.gen_range(1..=5);
        // h, positive, then k negatives, flattened
        let x = random_vector(&mut r, DIM * (k + 2), 1.0);
        let loss = |x: &[f64]| {
            let v = split(x, k + 2);
            ns_loss(v[0], v[1], &v[2..])
        };
        let v = split(&x, k + 2);
        let g = ns_gradient(v[0], v[1], &v[2..]);
        let mut flat = g.input.clone();
        flat.extend(&g.positive);
        g.negatives.iter().for_each(|n| flat.extend(n));
        worst = worst.max(max_gradient_error(&loss, &x, &flat));
    }
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn cbow_gradient_matches_finite_differences() {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let c = r.gen_range(1..=4);
        let k = r.gen_range(1..=5);
        let x = random_vector(&mut r, DIM * (c + 1 + k), 1.0);
        let loss = |x: &[f64]| {
            let v = split(x, c + 1 + k);
            cbow_loss(&v[..c], v[c], &v[c + 1..])
        };
        let v = split(&x, c + 1 + k);
        let (ctx, g) = cbow_gradient(&v[..c], v[c], &v[c + 1..]);
        let mut flat: Vec<f64> = ctx.concat();
        flat.extend(&g.positive);
        g.negatives.iter().for_each(|n| flat.extend(n));
        worst = worst.max(max_gradient_error(&loss, &x, &flat));
    }
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn noise_draws_follow_smoothed_unigram() {
    let counts = [5u64, 4, 3, 2, 1];
    let sampler = NoiseSampler::new(&counts).unwrap();
    let z: f64 = counts.iter().map(|&c| (c as f64).powf(0.75)).sum();
    let mut r = rng(11);
    let draws = 1_000_000;
    let mut hist = [0u64; 5];
    for _ in 0..draws {
        hist[sampler.sample(&mut r)] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        let expected = (c as f64).powf(0.75) / z;
        let observed = hist[i] as f64 / draws as f64;
        assert!(
            (observed - expected).abs() / expected < 0.01,
            "word {i}: observed {observed}, expected {expected}"
        );
    }
}

fn fnv1a(bytes: &[u8]) -> u32 {
    bytes.iter().fold(2166136261u32, |h, &b| {
        (h ^ u32::from(b)).wrapping_mul(16777619)
    })
}

fn ngrams(word: &str, n: usize) -> Vec<String> {
    let chars: Vec<char> = format!("<{word}>").chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i + n <= chars.len() {
        out.push(chars[i..i + n].iter().collect());
        i += 1;
    }
    out
}

#[test]
fn subword_vectors_are_word_row_plus_ngram_rows() {
    let sentences: Vec<Vec<String>> = ["ሰላም ነው ወንድሜ", "ሰላም ነሽ እህቴ", "ወንድሜ ሰላም ነው", "እህቴ ደህና ነሽ"]
        .iter()
        .cycle()
        .take(40)
        .map(|s| s.split(' ').map(String::from).collect())
        .collect();
    let sw = SubwordConfig {
        ngram_len: 3,
        bucket_count: 5000,
    };
    let cfg = EmbedConfig {
        dim: 12,
        min_count: 1,
        epochs: 2,
        subword: Some(sw),
        ..EmbedConfig::default()
    };
    let model = embed::train(&sentences, &cfg).unwrap();
    let mut r = rng(3);
    let alphabet: Vec<char> = "ሰላምነውወንድሜሽእህቴደ".chars().collect();
    let mut words: Vec<String> = model.vocab().words().to_vec();
    while words.len() < 20 {
        let len = r.gen_range(1..=6);
        words.push(
            (0..len)
                .map(|_| alphabet[r.gen_range(0..alphabet.len())])
                .collect(),
        );
    }
    for w in &words {
        let mut expected = match model.vocab().id(w) {
            Some(id) => model.word_rows().row(id).to_vec(),
            None => vec![0.0; cfg.dim],
        };
        for g in ngrams(w, sw.ngram_len) {
            let b = fnv1a(g.as_bytes()) % sw.bucket_count;
            let v = model.bucket_vector(b).unwrap();
            expected.iter_mut().zip(v).for_each(|(e, x)| *e += x);
        }
        let got = model.vector(w).unwrap();
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{w}: {a} vs {b}");
        }
    }
}

fn toy_pairs() -> Vec<Vec<String>> {
    vec![vec!["a".to_string(), "b".to_string()]; 100]
}

#[test]
fn training_reduces_loss() {
    let cfg = EmbedConfig {
        dim: 8,
        min_count: 1,
        mode: Mode::Skipgram,
        subsample_t: 0.0,
        ..EmbedConfig::default()
    };
    let mut t = Trainer::new(&toy_pairs(), &cfg).unwrap();
    let before = t.mean_loss();
    for _ in 0..cfg.epochs {
        t.run_epoch();
    }
    assert!(t.mean_loss() < before);
}

#[test]
fn single_worker_training_is_bit_deterministic() {
    let cfg = EmbedConfig {
        dim: 8,
        min_count: 1,
        ..EmbedConfig::default()
    };
    let a = embed::train(&toy_pairs(), &cfg).unwrap();
    let b = embed::train(&toy_pairs(), &cfg).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn rare_words_are_never_subsampled(total in 1u64..10_000_000, t in 1e-6f64..1e-1, frac in 0.0f64..=1.0) {
        let count = ((t * total as f64) * frac).floor() as u64;
        prop_assume!(count >= 1);
        prop_assert!(subsample_keep_probability(count, total, t) >= 1.0);
    }
}
