//! Train an averaged perceptron POS tagger on a tiny hand-tagged sample and
//! tag unseen sentences. Suffixes carry most of the signal.

use amsem::tagger::{self, evaluate_tokens, FeatureSet, TaggedSequence, TrainConfig};

const TRAIN: &[&str] = &[
    "ልጁ/N ውሃ/N ጠጣ/V",
    "ልጅቷ/N ቡና/N ጠጣች/V",
    "ገበሬው/N በሬውን/N ነዳ/V",
    "ሴቶቹ/N ገበያ/N ሄዱ/V",
    "ልጁ/N በፍጥነት/ADV ሮጠ/V",
    "መምህሩ/N ቀስ/ADV ብሎ/ADV ተናገረ/V",
    "እናቱ/N እና/CONJ አባቱ/N መጡ/V",
    "ተማሪዎቹ/N መጽሐፍ/N አነበቡ/V",
];

fn parse(line: &str) -> TaggedSequence {
    let (tokens, tags) = line
        .split(' ')
        .map(|p| {
            let (w, t) = p.split_once('/').unwrap();
            (w.to_string(), t.to_string())
        })
        .unzip();
    TaggedSequence::new(tokens, tags).unwrap()
}

fn main() -> amsem::Result<()> {
    let data: Vec<TaggedSequence> = TRAIN.iter().map(|l| parse(l)).collect();
    let model = tagger::train(&data, &TrainConfig::default(), FeatureSet::handcrafted())?;
    println!("tags: {:?}", model.tags);

    let test = parse("ወንድሙ/N ዳቦ/N በላ/V");
    let pred = model.tag(test.tokens())?;
    for (w, t) in test.tokens().iter().zip(&pred) {
        println!("{w}\t{t}");
    }
    let report = evaluate_tokens(&pred, test.labels())?;
    println!("accuracy {:.3}", report.accuracy);
    Ok(())
}
