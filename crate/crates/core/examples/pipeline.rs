//! Run the bundled end-to-end pipeline config into a temporary directory and
//! print the manifest.

use std::fs;
use std::path::Path;

use amsem::cli::{run_pipeline, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut cfg = PipelineConfig::from_file(data.join("pipeline.json"))?;
    let out = std::env::temp_dir().join("amsem-pipeline-example");
    cfg.corpus = data.join("toy_corpus.txt");
    cfg.output_dir = out.clone();

    let cfg_path = std::env::temp_dir().join("amsem-pipeline-example.json");
    fs::write(&cfg_path, serde_json::to_string_pretty(&cfg)?)?;
    let manifest = run_pipeline(&cfg_path, 42, 1)?;

    println!("output: {}", out.display());
    println!("config sha256 {}", manifest.config_sha256);
    for a in &manifest.artifacts {
        println!("{:<16} {:>8} bytes  {}", a.path, a.bytes, &a.sha256[..16]);
    }
    Ok(())
}
