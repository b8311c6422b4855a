//! Adaptivity: kinks x = −b/ω of the neurons chosen for the three-peak solution.

use greedy_pde::experiments::{run, ExperimentConfig};

fn main() -> greedy_pde::Result<()> {
    let mut c = ExperimentConfig::preset("ex2-peaks")?;
    c.schedule = vec![32, 64];
    c.quadrature.cells = 8000;
    c.quadrature.fine_cells = 16000;
    let r = run(&c)?;
    print!("{}", r.to_text());
    let (n, bps) = r.breakpoints.last().expect("breakpoints");
    let near = bps.iter().filter(|x| [-0.5, 0.0, 0.5].iter().any(|c| (*x - c).abs() <= 0.15)).count();
    println!("n = {n}: {near} of {} breakpoints lie within 0.15 of a peak", bps.len());
    // Histogram on [−1, 1] in 20 bins.
    let mut bins = [0usize; 20];
    for x in bps {
        bins[(((x + 1.0) / 0.1) as usize).min(19)] += 1;
    }
    for (i, b) in bins.iter().enumerate() {
        println!("{:>5.2} {}", -1.0 + 0.1 * i as f64, "#".repeat(*b));
    }
    Ok(())
}
