//! Relaxed greedy algorithm on the convex energy ∫ ½|∇u|² + cosh u − f u
//! over the disk of radius 2, sigmoid dictionary with (ω, b) ∈ [−20, 20]³.

use greedy_pde::argmax::{DictionarySpec, Parameterization, SearchConfig, Searcher};
use greedy_pde::dictionary::Activation;
use greedy_pde::experiments::solutions::radial_cosine;
use greedy_pde::greedy::{rga, RgaConfig, Snapshot};
use greedy_pde::metrics::relative_gap;
use greedy_pde::problem::{assemble_nonlinear, NonlinearEnergyProblem};
use greedy_pde::quadrature::{disk_polar_gauss, monte_carlo, Domain, SampleRegion};

fn main() -> greedy_pde::Result<()> {
    let m = radial_cosine(1.0);
    let p = NonlinearEnergyProblem { kappa: 1.0, source: m.source.clone(), domain: Domain::Disk { radius: 2.0 } };
    let train = assemble_nonlinear(&p, &monte_carlo(&SampleRegion::Disk { radius: 2.0 }, 4000, 1)?)?;
    let reference = assemble_nonlinear(&p, &disk_polar_gauss(2.0, 40, 2, 128)?)?;
    let dict = DictionarySpec {
        activation: Activation::Sigmoid,
        dim: 2,
        params: Parameterization::Box { lo: -20.0, hi: 20.0 },
        radius: 2.0,
    };
    let mut s = Searcher::new(dict, SearchConfig { n_box: 11, ..SearchConfig::default() })?;
    rga(&train, &mut s, &RgaConfig { m: 20.0, iterations: 64 }, |snap: &Snapshot| {
        if snap.n.is_power_of_two() && snap.n >= 4 {
            let gap = relative_gap(&reference, snap.expansion, &m.exact)?;
            println!("n = {:>3}  ℓ¹ = {:>6.3}  relative gap = {gap:.3e}", snap.n, snap.expansion.l1_norm());
        }
        Ok(())
    })?;
    Ok(())
}
