//! Named-entity tagging with BIO labels, scored at the span level.

use amsem::tagger::{self, bio_spans, evaluate_spans, FeatureSet, TaggedSequence, TrainConfig};

fn seq(pairs: &[(&str, &str)]) -> TaggedSequence {
    let (t, l) = pairs
        .iter()
        .map(|(w, l)| (w.to_string(), l.to_string()))
        .unzip();
    TaggedSequence::new(t, l).unwrap()
}

fn main() -> amsem::Result<()> {
    let train = vec![
        seq(&[
            ("አበበ", "B-PER"),
            ("በቀለ", "I-PER"),
            ("ወደ", "O"),
            ("አዲስ", "B-LOC"),
            ("አበባ", "I-LOC"),
            ("ሄደ", "O"),
        ]),
        seq(&[("ከበደ", "B-PER"), ("ጎንደር", "B-LOC"), ("ደረሰ", "O")]),
        seq(&[
            ("አልማዝ", "B-PER"),
            ("በባህር", "O"),
            ("ዳር", "I-LOC"),
            ("ተቀመጠች", "O"),
        ]),
        seq(&[("ኢትዮጵያ", "B-LOC"), ("ውስጥ", "O"), ("ሰላም", "O"), ("አለ", "O")]),
        seq(&[
            ("ሙሉጌታ", "B-PER"),
            ("ተሰማ", "I-PER"),
            ("ከሐረር", "O"),
            ("መጣ", "O"),
        ]),
    ];
    // the third sentence has a stray I-LOC, which span decoding repairs
    let (spans, repaired) = bio_spans(train[2].labels());
    println!("sentence 3 spans: {spans:?} (repaired {repaired})");

    let model = tagger::train(&train, &TrainConfig::default(), FeatureSet::handcrafted())?;
    let test = [seq(&[("አበበ", "B-PER"), ("ጎንደር", "B-LOC"), ("ሄደ", "O")])];
    let pred: Vec<Vec<String>> = test
        .iter()
        .map(|s| model.tag(s.tokens()))
        .collect::<Result<_, _>>()?;
    let gold: Vec<Vec<String>> = test.iter().map(|s| s.labels().to_vec()).collect();
    println!("predicted: {:?}", pred[0]);
    let report = evaluate_spans(&pred, &gold)?;
    for (class, prf) in &report.per_class {
        println!(
            "{class}: P {:.2} R {:.2} F1 {:.2}",
            prf.precision, prf.recall, prf.f1
        );
    }
    println!("micro F1 {:.3}", report.micro.f1);
    Ok(())
}
