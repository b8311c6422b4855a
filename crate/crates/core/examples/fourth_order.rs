//! Δ²u + u = f on (−1, 1)² with ReLU³ neurons (reduced quadrature).

use greedy_pde::experiments::{run, ExperimentConfig};

fn main() -> greedy_pde::Result<()> {
    let mut c = ExperimentConfig::preset("ex4-biharmonic")?;
    c.schedule = vec![8, 16, 32];
    c.quadrature.cells = 40;
    c.quadrature.fine_cells = 80;
    c.search.n_theta = 90;
    print!("{}", run(&c)?.to_text());
    Ok(())
}
