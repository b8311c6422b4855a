//! Quadrature rules: composite Gauss-Legendre, Halton, Monte-Carlo, boundary rules.

use greedy_pde::quadrature::{
    boundary_monte_carlo, boundary_rule, disk_polar_gauss, gauss_grid, halton, monte_carlo, BoxDomain, SampleRegion,
};

fn main() -> greedy_pde::Result<()> {
    let line = BoxDomain::cube(1, -1.0, 1.0)?;
    let square = BoxDomain::cube(2, 0.0, 1.0)?;

    // Exact for piecewise polynomials aligned with the cells.
    let g = gauss_grid(&line, &[2], 2)?;
    let relu2 = g.integrate(|x| x[0].max(0.0).powi(2))?;
    println!("Gauss L=2 t=2: {} points, ∫ max(0,x)² = {relu2:.15} (1/3)", g.len());

    let g2 = gauss_grid(&square, &[20, 20], 2)?;
    let c = g2.integrate(|x| (2.0 * std::f64::consts::PI * x[0]).cos().powi(2) * x[1])?;
    println!("Gauss 20x20 t=2: ∫ cos²(2πx) y = {c:.12} (0.25)");

    let h = halton(&square, 3)?;
    println!("Halton: {:?}", h.points().iter().collect::<Vec<_>>());

    let mc = monte_carlo(&SampleRegion::Disk { radius: 2.0 }, 100_000, 7)?;
    println!("Monte-Carlo disk: ∫ r² ≈ {:.3} (8π = {:.3})", mc.integrate(|x| x[0] * x[0] + x[1] * x[1])?, 8.0 * std::f64::consts::PI);

    let polar = disk_polar_gauss(2.0, 20, 2, 64)?;
    println!("Polar Gauss disk: area {:.12} (4π = {:.12})", polar.weight_sum(), 4.0 * std::f64::consts::PI);

    let b = boundary_rule(&square, 10, 2)?;
    println!("Gauss boundary of the unit square: {} points, length {}", b.len(), b.weight_sum());
    let bmc = boundary_monte_carlo(&square, 2000, 1)?;
    println!("Random boundary samples: {} (first normal {:?})", bmc.len(), bmc.normals().point(0));
    Ok(())
}
