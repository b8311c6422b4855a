mod common;

use common::*;
use greedy_pde::argmax::{axis_restricted, DictionarySpec, SearchConfig, Searcher};
use greedy_pde::dictionary::{Activation, BiasRange, Expansion, MultiIndex, RidgeNeuron};
use greedy_pde::greedy::{oga, project, FiniteDictionary, OgaConfig, Snapshot};
use greedy_pde::metrics::{format_sci, order_table};
use greedy_pde::problem::{assemble_energy, BoundaryCondition, EllipticProblem, Field, Objective, QuadraticObjective};
use greedy_pde::quadrature::{gauss_grid, monte_carlo, BoxDomain, Domain, SampleRegion};
use proptest::prelude::*;

fn ok(c: Check) -> Result<(), TestCaseError> {
    c.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauss_grid_is_exact_on_polynomials(
        t in 0usize..4,
        cells in 1usize..6,
        coeffs in prop::collection::vec(-2.0f64..2.0, 8),
        dim in 1usize..3,
    ) {
        ok(quadrature_exactness(t, cells, &coeffs, dim))?;
    }

    #[test]
    fn derivatives_match_finite_differences(seed in any::<u64>()) {
        ok(derivative_fd(seed))?;
    }

    #[test]
    fn energy_form_matches_direct_quadrature(seed in any::<u64>(), dim in 1usize..3) {
        ok(energy_identity(seed, dim))?;
    }

    #[test]
    fn rga_respects_budget(m in 0.1f64..20.0, iterations in 2usize..30) {
        ok(rga_budget_and_steps(m, iterations))?;
    }

    #[test]
    fn nonlinear_pairing_matches_finite_differences(seed in any::<u64>()) {
        ok(nonlinear_pairing_fd(seed))?;
    }

    #[test]
    fn exact_search_matches_dense_grid(seed in any::<u64>()) {
        ok(exact_vs_dense_grid(seed))?;
    }

    #[test]
    fn monte_carlo_weights_and_domain(seed in any::<u64>(), count in 1usize..200, radius in 0.1f64..3.0) {
        let rule = monte_carlo(&SampleRegion::Disk { radius }, count, seed).unwrap();
        let area = std::f64::consts::PI * radius * radius;
        prop_assert!((rule.weight_sum() - area).abs() < 1e-12 * area);
        for p in rule.points().iter() {
            prop_assert!(p[0].hypot(p[1]) <= radius);
        }
    }

    #[test]
    fn neurons_stay_unit_after_search(seed in any::<u64>()) {
        let p = EllipticProblem {
            order: 1,
            top: (0..2).map(|i| (MultiIndex::axis(2, i, 1), Field::Const(1.0))).collect(),
            zero: Field::Const(1.0),
            source: Field::from_fn(move |x: &[f64]| ((seed % 7) as f64 * x[0]).cos() + x[1]),
            domain: Domain::Box(BoxDomain::cube(2, 0.0, 1.0).unwrap()),
            boundary: BoundaryCondition::NaturalNeumann,
        };
        let Domain::Box(dom) = &p.domain else { unreachable!() };
        let obj = assemble_energy(&p, &gauss_grid(dom, &[6, 6], 1).unwrap()).unwrap();
        let f = obj.gradient_functional(&obj.embed_expansion(&Expansion::new()).unwrap()).unwrap();
        let config = SearchConfig { n_theta: 24, top_k: 2, ..SearchConfig::default() };
        let c = Searcher::new(DictionarySpec::relu(2, 2, dom.radius()), config).unwrap().search(&f).unwrap().unwrap();
        let nrm = c.neuron.omega.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((nrm - 1.0).abs() < 1e-12);
        prop_assert!((c.pairing - f.eval(&c.neuron)).abs() <= 1e-12 * c.pairing.abs().max(1.0));
    }
}

#[test]
fn fixed_checks() {
    for (name, result) in all_fixed() {
        if let Err(e) = result {
            panic!("{name}: {e}");
        }
    }
}

#[test]
fn oga_is_monotone_and_orthogonal() {
    oga_monotone_orthogonal(40).unwrap();
}

#[test]
fn oga_recovers_sparse_target_from_finite_dictionary() {
    let act = Activation::ReluPower(2);
    let neurons: Vec<RidgeNeuron> = (0..21)
        .flat_map(|i| {
            let b = -1.0 + 0.1 * i as f64;
            [RidgeNeuron::new(vec![1.0], b, act), RidgeNeuron::new(vec![-1.0], b, act)]
        })
        .collect();
    // u* = 2 g_3 − g_17 + 0.5 g_30.
    let truth = Expansion::from_terms(vec![
        (2.0, neurons[3].clone()),
        (-1.0, neurons[17].clone()),
        (0.5, neurons[30].clone()),
    ])
    .unwrap();
    let p = EllipticProblem {
        order: 1,
        top: vec![(MultiIndex::axis(1, 0, 1), Field::Const(1.0))],
        zero: Field::Const(1.0),
        source: Field::Const(0.0),
        domain: Domain::Box(BoxDomain::cube(1, -1.0, 1.0).unwrap()),
        boundary: BoundaryCondition::NaturalNeumann,
    };
    let Domain::Box(dom) = &p.domain else { unreachable!() };
    let base = assemble_energy(&p, &gauss_grid(dom, &[20], 2).unwrap()).unwrap();
    // ½‖J(v) − J(u*)‖²_W, minimized exactly by the 3-sparse u*. The dictionary is
    // strongly correlated, so the support need not be found in three steps.
    let target = base.embed_expansion(&truth).unwrap();
    let obj = QuadraticObjective::new(base.embedding().clone(), base.weights().to_vec(), target, 0.0).unwrap();
    let r0 = obj.value(&Expansion::new()).unwrap();
    let mut dict = FiniteDictionary { neurons };
    let mut gaps = Vec::new();
    let run = oga(&obj, &mut dict, &OgaConfig { iterations: 42, ..OgaConfig::default() }, |s: &Snapshot| {
        gaps.push(s.objective / r0);
        Ok(())
    })
    .unwrap();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(run.iterations() <= 42);
    assert!(*gaps.last().unwrap() <= 1e-10, "final gap {:e} after {:?}", gaps.last().unwrap(), run.stop);
}

#[test]
fn projection_reproduces_columns() {
    let p = EllipticProblem {
        order: 1,
        top: vec![(MultiIndex::axis(1, 0, 1), Field::Const(1.0))],
        zero: Field::Const(1.0),
        source: Field::Const(1.0),
        domain: Domain::Box(BoxDomain::cube(1, -1.0, 1.0).unwrap()),
        boundary: BoundaryCondition::NaturalNeumann,
    };
    let Domain::Box(dom) = &p.domain else { unreachable!() };
    let obj = assemble_energy(&p, &gauss_grid(dom, &[8], 2).unwrap()).unwrap();
    let act = Activation::ReluPower(2);
    let cols: Vec<_> =
        [0.1, -0.4, 0.7].iter().map(|b| obj.embed(&RidgeNeuron::new(vec![1.0], *b, act)).unwrap()).collect();
    let mut y = cols[0].clone();
    y.scale(1.5);
    y.axpy(-0.25, &cols[2]);
    let c = project(&cols, &y, obj.weights(), 1e-12).unwrap();
    assert!((c[0] - 1.5).abs() < 1e-9 && c[1].abs() < 1e-9 && (c[2] + 0.25).abs() < 1e-9, "{c:?}");
}

#[test]
fn axis_search_picks_the_active_axis() {
    // Residual depends on x_2 only, so the best axis neuron must use ±e_2.
    let d = 4;
    let p = EllipticProblem {
        order: 1,
        top: (0..d).map(|i| (MultiIndex::axis(d, i, 1), Field::Const(1.0))).collect(),
        zero: Field::Const(1.0),
        source: Field::from_fn(|x: &[f64]| (3.0 * x[2]).cos()),
        domain: Domain::Box(BoxDomain::cube(d, 0.0, 1.0).unwrap()),
        boundary: BoundaryCondition::NaturalNeumann,
    };
    let Domain::Box(dom) = &p.domain else { unreachable!() };
    let obj = assemble_energy(&p, &gauss_grid(dom, &[3; 4], 1).unwrap()).unwrap();
    let f = obj.gradient_functional(&obj.embed_expansion(&Expansion::new()).unwrap()).unwrap();
    let c = axis_restricted(&f, 2, BiasRange::new(-2.0, 2.0).unwrap()).unwrap().unwrap();
    assert_eq!(c.neuron.omega.iter().filter(|v| **v != 0.0).count(), 1);
    assert_eq!(c.neuron.omega[2].abs(), 1.0);
}

#[test]
fn order_table_reproduces_printed_orders() {
    let rows = [(16, 7.86e-4), (32, 7.70e-5), (64, 8.45e-6), (128, 9.68e-7)];
    let o: Vec<String> = order_table(&rows).iter().map(|v| v.map(|x| format!("{x:.2}")).unwrap_or_default()).collect();
    assert_eq!(o, ["", "3.35", "3.19", "3.13"]);
    assert_eq!(format_sci(2.5e-10), "2.500000e-10");
}
