//! Orthogonal greedy algorithm for −u'' + u = f on (−1, 1) with natural
//! boundary conditions, built directly from the library pieces.

use greedy_pde::argmax::{DictionarySpec, SearchConfig, Searcher};
use greedy_pde::experiments::solutions::cosine_1d;
use greedy_pde::greedy::{oga, OgaConfig, Snapshot};
use greedy_pde::metrics::{error_norms, ConvergenceReport};
use greedy_pde::problem::{assemble_energy, BoundaryCondition, EllipticProblem, Field};
use greedy_pde::quadrature::{gauss_grid, BoxDomain, Domain};
use greedy_pde::dictionary::MultiIndex;

fn main() -> greedy_pde::Result<()> {
    let m = cosine_1d(std::f64::consts::PI);
    let dom = BoxDomain::cube(1, -1.0, 1.0)?;
    let p = EllipticProblem {
        order: 1,
        top: vec![(MultiIndex::axis(1, 0, 1), Field::Const(1.0))],
        zero: Field::Const(1.0),
        source: m.source.clone(),
        domain: Domain::Box(dom.clone()),
        boundary: BoundaryCondition::NaturalNeumann,
    };
    let obj = assemble_energy(&p, &gauss_grid(&dom, &[20_000], 2)?)?;
    let fine = gauss_grid(&dom, &[40_000], 2)?;
    let mut searcher = Searcher::new(DictionarySpec::relu(2, 1, 1.0), SearchConfig::default())?;

    let mut report = ConvergenceReport::new("OGA, ReLU^2, u = cos(πx)", vec!["l2".into(), "h1".into()]);
    let config = OgaConfig { iterations: 64, ..OgaConfig::default() };
    oga(&obj, &mut searcher, &config, |s: &Snapshot| {
        if s.n.is_power_of_two() && s.n >= 4 {
            let e = error_norms(s.expansion, &m.exact, &fine, 1, None, None)?;
            report.push_row(s.n, vec![Some(e.l2), e.h(1)])?;
        }
        Ok(())
    })?;
    print!("{}", report.to_text());
    Ok(())
}
