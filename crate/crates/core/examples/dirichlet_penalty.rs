//! Dirichlet conditions through the penalty δ⁻¹‖u‖²_{∂Ω} with δ = 0.1 n⁻².

use greedy_pde::argmax::{DictionarySpec, SearchConfig, Searcher};
use greedy_pde::dictionary::MultiIndex;
use greedy_pde::experiments::solutions::cosine_1d;
use greedy_pde::greedy::{oga, OgaConfig};
use greedy_pde::metrics::error_norms;
use greedy_pde::problem::{assemble_penalized, BoundaryCondition, EllipticProblem, Field};
use greedy_pde::quadrature::{boundary_rule, gauss_grid, BoxDomain, Domain};

fn main() -> greedy_pde::Result<()> {
    let m = cosine_1d(std::f64::consts::FRAC_PI_2);
    let dom = BoxDomain::cube(1, -1.0, 1.0)?;
    let rule = gauss_grid(&dom, &[20_000], 2)?;
    let fine = gauss_grid(&dom, &[40_000], 2)?;
    let ends = boundary_rule(&dom, 1, 2)?;
    println!("{:>4}  {:>10}  {:>10}  {:>10}", "n", "delta", "L2", "a,delta");
    for n in [8, 16, 32, 64] {
        let p = EllipticProblem {
            order: 1,
            top: vec![(MultiIndex::axis(1, 0, 1), Field::Const(1.0))],
            zero: Field::Const(1.0),
            source: m.source.clone(),
            domain: Domain::Box(dom.clone()),
            boundary: BoundaryCondition::DirichletPenalty { delta: 0.1 / (n * n) as f64 },
        };
        let obj = assemble_penalized(&p, &rule, &ends)?;
        let mut s = Searcher::new(DictionarySpec::relu(2, 1, 1.0), SearchConfig::default())?;
        let run = oga(&obj, &mut s, &OgaConfig { iterations: n, ..OgaConfig::default() }, |_| Ok(()))?;
        let e = error_norms(&run.expansion, &m.exact, &fine, 1, Some(&p), Some(&ends))?;
        println!("{n:>4}  {:>10.3e}  {:>10.3e}  {:>10.3e}", 0.1 / (n * n) as f64, e.l2, e.a_delta.unwrap());
    }
    Ok(())
}
