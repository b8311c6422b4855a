//! Dictionary search: the exact 1-D solver against grid sampling plus Newton refinement.

use greedy_pde::argmax::{exact_1d, DictionarySpec, SearchConfig, SearchMode, Searcher};
use greedy_pde::dictionary::{BiasRange, MultiIndex};
use greedy_pde::greedy::{oga, OgaConfig};
use greedy_pde::problem::{assemble_energy, BoundaryCondition, EllipticProblem, Field, Objective};
use greedy_pde::quadrature::{gauss_grid, BoxDomain, Domain};

fn main() -> greedy_pde::Result<()> {
    let dom = BoxDomain::cube(1, -1.0, 1.0)?;
    let p = EllipticProblem {
        order: 1,
        top: vec![(MultiIndex::axis(1, 0, 1), Field::Const(1.0))],
        zero: Field::Const(1.0),
        source: Field::from_fn(|x: &[f64]| (3.0 * x[0]).sin() + x[0] * x[0]),
        domain: Domain::Box(dom.clone()),
        boundary: BoundaryCondition::NaturalNeumann,
    };
    let obj = assemble_energy(&p, &gauss_grid(&dom, &[200], 2)?)?;
    // Residual functional g ↦ ⟨∇L(u_6), g⟩ after six OGA steps.
    let mut warmup = Searcher::new(DictionarySpec::relu(2, 1, 1.0), SearchConfig::default())?;
    let u6 = oga(&obj, &mut warmup, &OgaConfig { iterations: 6, ..OgaConfig::default() }, |_| Ok(()))?.expansion;
    let f = obj.gradient_functional(&obj.embed_expansion(&u6)?)?;

    let exact = exact_1d(&f, 2, BiasRange::new(-2.0, 2.0)?)?.expect("non-zero functional");
    println!("exact:       ω = {:?}, b = {:.9}, pairing = {:.12e}", exact.neuron.omega, exact.neuron.bias, exact.pairing);

    for (n_bias, refine_iters) in [(40, 0), (40, 50), (4000, 0)] {
        let cfg = SearchConfig { n_bias: Some(n_bias), refine_iters, mode: Some(SearchMode::GridRefine), ..SearchConfig::default() };
        let c = Searcher::new(DictionarySpec::relu(2, 1, 1.0), cfg)?.search(&f)?.expect("candidate");
        println!(
            "grid N_b={n_bias:<5} refine={refine_iters:<3} b = {:.9}, pairing = {:.12e}",
            c.neuron.bias, c.pairing
        );
    }
    Ok(())
}
