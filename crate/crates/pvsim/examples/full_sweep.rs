//! Runs the bundled Portuguese 2019 study (192 scenarios, 25 years) through
//! the library API and prints the best configuration per site.
//!
//! Same effect as:
//! `pvsim simulate --config config/portugal2019.json --out out`
//!
//! ```bash
//! cargo run -p pvsim --example full_sweep
//! ```

use std::path::Path;

use pvsim::runner::{run_sweep, SweepOptions};
use pvsim::RunConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("workspace root");
    let cfg = RunConfig::load(&root.join("config/portugal2019.json"))?;

    let outcome = run_sweep(
        &cfg,
        &SweepOptions {
            output_dir: Some(root.join("out")),
            ..SweepOptions::default()
        },
    )?;

    println!(
        "{} scenarios written to {}",
        outcome.scenario_count,
        outcome.output_dir.display()
    );
    if let Some(summary) = &outcome.summary_path {
        println!("\n{}", std::fs::read_to_string(summary)?);
    }
    Ok(())
}
