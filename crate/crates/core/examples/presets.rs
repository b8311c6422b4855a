//! Runs a named preset through the experiment driver.
//!
//! `cargo run --release --example presets -- ex1-pinn 16,32,64`

use greedy_pde::experiments::{run, ExperimentConfig, PRESETS};

fn main() -> greedy_pde::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "ex1-pinn".into());
    let mut config = ExperimentConfig::preset(&name).inspect_err(|_| eprintln!("presets: {}", PRESETS.join(", ")))?;
    if let Some(s) = args.next() {
        config.schedule = s.split(',').map(|v| v.parse().expect("schedule entries are integers")).collect();
    }
    let report = run(&config)?;
    print!("{}", report.to_text());
    print!("{}", report.to_csv());
    Ok(())
}
