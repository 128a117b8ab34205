//! End-to-end run with the default configuration, writing JSON, CSV and SVG
//! into a temporary directory.

use jetconj::config::ExperimentConfig;
use jetconj::pipeline::run_pipeline;
use jetconj::report::{emit, Emit};

fn main() -> jetconj::Result<()> {
    let cfg = ExperimentConfig::default();
    let mut run = run_pipeline(&cfg)?;
    for c in &run.outputs.report.checks {
        println!("{:<10} {}  {}", c.name, if c.passed { "ok  " } else { "FAIL" }, c.detail);
    }

    let dir = std::env::temp_dir().join("jetconj-pipeline");
    for path in emit(&mut run.outputs, &dir, "pipeline", &[Emit::Json, Emit::Csv, Emit::Svg])? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
