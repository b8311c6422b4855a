//! OGA on a PINN residual loss: −u'' + u = f on random collocation points,
//! u'(±1) = 0 on the boundary, ReLU^3 dictionary.

use greedy_pde::argmax::{DictionarySpec, SearchConfig, Searcher};
use greedy_pde::dictionary::MultiIndex;
use greedy_pde::experiments::solutions::cosine_1d;
use greedy_pde::greedy::{oga, OgaConfig, Snapshot};
use greedy_pde::problem::{assemble_pinn, BoundaryScaling, Field, PinnProblem};
use greedy_pde::quadrature::{boundary_rule, monte_carlo, BoxDomain, Domain, SampleRegion};

fn main() -> greedy_pde::Result<()> {
    let m = cosine_1d(std::f64::consts::PI);
    let dom = BoxDomain::cube(1, -1.0, 1.0)?;
    let p = PinnProblem {
        operator: vec![(MultiIndex::new(vec![2]), Field::Const(-1.0)), (MultiIndex::zero(1), Field::Const(1.0))],
        source: m.source.clone(),
        boundary_traces: vec![1],
        boundary_scaling: BoundaryScaling::Sum,
        domain: Domain::Box(dom.clone()),
    };
    let interior = monte_carlo(&SampleRegion::Box(dom.clone()), 10_000, 0)?;
    let ends = boundary_rule(&dom, 1, 0)?;
    let obj = assemble_pinn(&p, &interior, Some(&ends))?;
    let mut s = Searcher::new(DictionarySpec::relu(3, 1, 1.0), SearchConfig::default())?;
    oga(&obj, &mut s, &OgaConfig { iterations: 64, ..OgaConfig::default() }, |snap: &Snapshot| {
        if snap.n.is_power_of_two() {
            println!("n = {:>3}  PINN loss = {:.3e}", snap.n, snap.objective);
        }
        Ok(())
    })?;
    Ok(())
}
