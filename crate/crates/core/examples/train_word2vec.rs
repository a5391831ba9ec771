//! Train skip-gram vectors with and without character n-gram buckets, then
//! query an out-of-vocabulary word through its subwords.

use std::path::Path;

use amsem::corpus::read_corpus;
use amsem::embed::{train, EmbedConfig, Mode};

fn main() -> amsem::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_corpus.txt");
    let sentences = read_corpus(path, None)?;

    let plain = EmbedConfig {
        dim: 32,
        epochs: 20,
        min_count: 1,
        mode: Mode::Skipgram,
        ..EmbedConfig::word2vec()
    };
    let w2v = train(&sentences, &plain)?;
    println!("word2vec: {} words x {} dims", w2v.vocab().len(), w2v.dim());
    for (w, sim) in w2v.nearest("ልጁ", 3)? {
        println!("  ልጁ ~ {w} {sim:.3}");
    }

    let subword = EmbedConfig {
        dim: 32,
        epochs: 20,
        min_count: 1,
        ..EmbedConfig::fasttext()
    };
    let ft = train(&sentences, &subword)?;
    // never seen in the corpus; its vector comes from n-gram buckets alone
    let oov = "ልጆቻቸው";
    println!(
        "fasttext: vector for unseen {oov:?} has {} dims",
        ft.vector(oov)?.len()
    );
    let v = ft.vector(oov)?;
    for (w, sim) in ft.nearest_to_vector(&v, 3, None)? {
        println!("  {oov} ~ {w} {sim:.3}");
    }
    Ok(())
}
