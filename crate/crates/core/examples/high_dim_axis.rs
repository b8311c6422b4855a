//! Ten-dimensional variable-coefficient problem on Halton points with the
//! axis-restricted dictionary {ReLU²(±x_i + b)}, whose argmax is exact.

use greedy_pde::argmax::{DictionarySpec, Parameterization, SearchConfig, Searcher};
use greedy_pde::dictionary::{Activation, BiasRange, MultiIndex};
use greedy_pde::experiments::solutions::{cosine_sum, highdim_coefficient};
use greedy_pde::greedy::{oga, OgaConfig, Snapshot};
use greedy_pde::metrics::error_norms;
use greedy_pde::problem::{assemble_energy, BoundaryCondition, EllipticProblem, Field};
use greedy_pde::quadrature::{halton_with_offset, BoxDomain, Domain};

fn main() -> greedy_pde::Result<()> {
    let d = 10;
    let m = cosine_sum(d);
    let dom = BoxDomain::cube(d, 0.0, 1.0)?;
    let n_samples = 100_000;
    let p = EllipticProblem {
        order: 1,
        top: (0..d).map(|i| (MultiIndex::axis(d, i, 1), Field::from_fn(highdim_coefficient))).collect(),
        zero: Field::Const(1.0),
        source: m.source.clone(),
        domain: Domain::Box(dom.clone()),
        boundary: BoundaryCondition::NaturalNeumann,
    };
    let obj = assemble_energy(&p, &halton_with_offset(&dom, n_samples, 0)?)?;
    let test = halton_with_offset(&dom, n_samples, n_samples as u64)?;
    let dict = DictionarySpec {
        activation: Activation::ReluPower(2),
        dim: d,
        params: Parameterization::Axes { bias: BiasRange::new(-2.0, 2.0)? },
        radius: dom.radius(),
    };
    let mut s = Searcher::new(dict, SearchConfig::default())?;
    oga(&obj, &mut s, &OgaConfig { iterations: 32, ..OgaConfig::default() }, |snap: &Snapshot| {
        if snap.n.is_power_of_two() && snap.n >= 4 {
            let e = error_norms(snap.expansion, &m.exact, &test, 1, None, None)?;
            println!("n = {:>3}  L2 = {:.3e}  H1 = {:.3e}", snap.n, e.l2, e.h(1).unwrap());
        }
        Ok(())
    })?;
    Ok(())
}
