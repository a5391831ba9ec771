//! Sentiment classification with TF-IDF features and logistic regression,
//! compared against the label-distribution baselines.

use amsem::classify::{
    baseline, classification_report, parse_labeled, Averaging, Baseline, LogRegConfig,
    TextClassifier,
};

const TRAIN: &str = "\
pos\tበጣም ጥሩ ፊልም ነው
pos\tጥሩ ስራ ሰርተሃል
pos\tደስ የሚል ዜና ነው
pos\tበጣም ደስ ብሎኛል
neg\tመጥፎ ቀን ነበር
neg\tበጣም መጥፎ አገልግሎት
neg\tአልወደድኩትም
neu\tዛሬ ሰኞ ነው
neu\tስብሰባው ነገ ይካሄዳል
";

const TEST: &str = "\
pos\tጥሩ ዜና ነው
neg\tመጥፎ ስራ
neu\tነገ ማክሰኞ ነው
";

fn main() -> amsem::Result<()> {
    let train = parse_labeled(TRAIN.as_bytes(), "train", None)?;
    let test = parse_labeled(TEST.as_bytes(), "test", None)?;
    let clf = TextClassifier::fit(&train, &LogRegConfig::default())?;
    println!("vocabulary: {} terms", clf.tfidf.len());

    let gold: Vec<&str> = test.iter().map(|d| d.label.as_str()).collect();
    let pred: Vec<String> = test.iter().map(|d| clf.predict(&d.tokens)).collect();
    for (d, p) in test.iter().zip(&pred) {
        println!("{:<6} {:<6} {}", d.label, p, d.tokens.join(" "));
    }
    let pred: Vec<&str> = pred.iter().map(String::as_str).collect();
    let report = classification_report(&pred, &gold, Averaging::Macro)?;
    println!("logreg        macro F1 {:.3}", report.average.f1);

    let train_labels: Vec<&str> = train.iter().map(|d| d.label.as_str()).collect();
    for strategy in [
        Baseline::MostFrequent,
        Baseline::Stratified,
        Baseline::Uniform,
    ] {
        let b = baseline(strategy, &train_labels, gold.len(), 42)?;
        let b: Vec<&str> = b.iter().map(String::as_str).collect();
        let r = classification_report(&b, &gold, Averaging::Macro)?;
        println!(
            "{:<13} macro F1 {:.3}",
            format!("{strategy:?}"),
            r.average.f1
        );
    }
    Ok(())
}
