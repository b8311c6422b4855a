//! Deterministic checks shared by the property tests and the acceptance run.
//! Each returns `Err(message)` on the first violated bound.
#![allow(dead_code)]

use greedy_pde::argmax::{exact_1d, DictionarySpec, SearchConfig, SearchMode, Searcher};
use greedy_pde::dictionary::{Activation, BiasRange, Expansion, MultiIndex, RidgeNeuron};
use greedy_pde::greedy::{oga, rga, FiniteDictionary, OgaConfig, RgaConfig, Snapshot};
use greedy_pde::metrics::order;
use greedy_pde::problem::{
    assemble_energy, assemble_nonlinear, BoundaryCondition, EllipticProblem, Field, NonlinearEnergyProblem,
    Objective, QuadraticObjective,
};
use greedy_pde::quadrature::{gauss_grid, halton, monte_carlo, BoxDomain, Domain, SampleRegion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Tensor polynomial of per-variable degree `≤ 2t+1` integrated by `gauss_grid`.
pub fn quadrature_exactness(t: usize, cells: usize, coeffs: &[f64], dim: usize) -> Check {
    let deg = 2 * t + 1;
    let (lo, hi) = (-0.7, 1.3);
    let dom = BoxDomain::cube(dim, lo, hi).map_err(|e| e.to_string())?;
    let rule = gauss_grid(&dom, &vec![cells; dim], t).map_err(|e| e.to_string())?;
    // p(x) = Π_i Σ_j c_j x_i^j with the same 1-D factor in every coordinate.
    let c: Vec<f64> = coeffs.iter().take(deg + 1).copied().collect();
    let factor = |x: f64| c.iter().rev().fold(0.0, |acc, cj| acc * x + cj);
    let exact_1d: f64 = c
        .iter()
        .enumerate()
        .map(|(j, cj)| cj * (hi.powi(j as i32 + 1) - lo.powi(j as i32 + 1)) / (j + 1) as f64)
        .sum();
    let exact = exact_1d.powi(dim as i32);
    let got = rule.integrate(|x| x.iter().map(|v| factor(*v)).product()).map_err(|e| e.to_string())?;
    let scale = c.iter().map(|v| v.abs()).sum::<f64>().powi(dim as i32) * 2f64.powi(3 * dim as i32);
    ensure(rel_err(got, exact, scale.max(exact.abs())) < 1e-12, || {
        format!("t={t} L={cells} d={dim}: quadrature {got} vs exact {exact}")
    })
}

pub fn halton_oracle() -> Check {
    let rule = halton(&BoxDomain::cube(2, 0.0, 1.0).unwrap(), 3).map_err(|e| e.to_string())?;
    let want = [[0.5, 1.0 / 3.0], [0.25, 2.0 / 3.0], [0.75, 1.0 / 9.0]];
    for (i, w) in want.iter().enumerate() {
        let p = rule.points().point(i);
        ensure((p[0] - w[0]).abs() < 1e-15 && (p[1] - w[1]).abs() < 1e-15, || {
            format!("Halton point {i} is {p:?}, expected {w:?}")
        })?;
    }
    let one = halton(&BoxDomain::cube(1, 0.0, 1.0).unwrap(), 1).map_err(|e| e.to_string())?;
    ensure(one.points().point(0)[0] == 0.5, || "first 1-D Halton point is not 1/2".into())
}

/// Central differences of order `j` derivatives against order `j+1`.
pub fn derivative_fd(seed: u64) -> Check {
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for act in [Activation::ReluPower(2), Activation::ReluPower(3), Activation::ReluPower(4), Activation::Sigmoid] {
        let top = match act {
            Activation::ReluPower(k) => k as usize,
            _ => 4,
        };
        let mut tested = 0;
        while tested < 100 {
            let t: f64 = rng.random::<f64>() * 6.0 - 3.0;
            if t.abs() <= 10.0 * h {
                continue;
            }
            tested += 1;
            for j in 0..top {
                let up = act.derivative(t + h, j).unwrap();
                let down = act.derivative(t - h, j).unwrap();
                let fd = (up - down) / (2.0 * h);
                let exact = act.derivative(t, j + 1).unwrap();
                let scale = exact.abs().max(act.derivative(t, j).unwrap().abs()).max(1.0);
                ensure(rel_err(fd, exact, scale) < 1e-5, || {
                    format!("{act}: derivative {} at t={t}: fd {fd} vs {exact}", j + 1)
                })?;
            }
        }
    }
    Ok(())
}

fn random_expansion(rng: &mut ChaCha8Rng, dim: usize, n: usize, act: Activation) -> Expansion {
    let mut u = Expansion::new();
    for _ in 0..n {
        let mut w: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let nrm = w.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
        w.iter_mut().for_each(|v| *v /= nrm);
        u.push(rng.random::<f64>() * 2.0 - 1.0, RidgeNeuron::new(w, rng.random::<f64>() * 2.0 - 1.0, act));
    }
    u
}

fn helmholtz_problem(dim: usize, lo: f64, hi: f64) -> EllipticProblem {
    EllipticProblem {
        order: 1,
        top: (0..dim)
            .map(|i| (MultiIndex::axis(dim, i, 1), Field::from_fn(move |x: &[f64]| 1.0 + 0.5 * x[i] * x[i])))
            .collect(),
        zero: Field::from_fn(|x: &[f64]| 2.0 + x[0]),
        source: Field::from_fn(|x: &[f64]| x.iter().map(|v| v.sin()).sum::<f64>() + 1.0),
        domain: Domain::Box(BoxDomain::cube(dim, lo, hi).unwrap()),
        boundary: BoundaryCondition::NaturalNeumann,
    }
}

/// The quadratic form `½‖J(u) − y‖²_W + c` against a direct quadrature of the energy.
pub fn energy_identity(seed: u64, dim: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = helmholtz_problem(dim, -1.0, 1.0);
    let Domain::Box(dom) = &p.domain else { unreachable!() };
    let rule = gauss_grid(dom, &vec![7; dim], 2).unwrap();
    let obj = assemble_energy(&p, &rule).map_err(|e| e.to_string())?;
    let u = random_expansion(&mut rng, dim, 6, Activation::ReluPower(2));
    let quad = obj.value(&u).map_err(|e| e.to_string())?;
    let direct = rule
        .integrate(|x| {
            let mut e = p.zero.eval(x) * u.eval(x).unwrap().powi(2);
            for (a, c) in &p.top {
                e += c.eval(x) * u.partial(x, a).unwrap().powi(2);
            }
            0.5 * e - p.source.eval(x) * u.eval(x).unwrap()
        })
        .unwrap();
    ensure(rel_err(quad, direct, direct.abs().max(1.0)) < 1e-10, || {
        format!("energy identity: quadratic form {quad} vs direct {direct}")
    })
}

fn small_1d_objective(cells: usize) -> QuadraticObjective {
    let p = helmholtz_problem(1, -1.0, 1.0);
    let Domain::Box(dom) = &p.domain else { unreachable!() };
    assemble_energy(&p, &gauss_grid(dom, &[cells], 2).unwrap()).unwrap()
}

/// OGA objective is non-increasing and the residual is W-orthogonal to every selected column.
pub fn oga_monotone_orthogonal(iterations: usize) -> Check {
    let obj = small_1d_objective(40);
    let dict = DictionarySpec::relu(2, 1, 1.0);
    let mut searcher = Searcher::new(dict, SearchConfig::default()).map_err(|e| e.to_string())?;
    let mut prev = obj.value(&Expansion::new()).unwrap();
    let mut failure: Option<String> = None;
    let y_norm = obj.target_norm_sq().sqrt();
    let cfg = OgaConfig { iterations, ..OgaConfig::default() };
    oga(&obj, &mut searcher, &cfg, |s: &Snapshot| {
        if failure.is_some() {
            return Ok(());
        }
        if s.objective > prev + 1e-12 * prev.abs() {
            failure = Some(format!("n={}: objective rose from {prev} to {}", s.n, s.objective));
        }
        prev = s.objective;
        for (_, g) in &s.expansion.terms {
            let pairing = obj.gradient_pairing(s.expansion, g).unwrap();
            let jg = obj.embed(g).unwrap();
            let scale = y_norm * obj.norm_sq(&jg).sqrt();
            if pairing.abs() > 1e-8 * scale {
                failure = Some(format!("n={}: residual pairing {pairing:e} (scale {scale:e})", s.n));
            }
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    failure.map_or(Ok(()), Err)
}

/// RGA: `‖u_n‖_ℓ¹ ≤ M` and the first two iterates are `−M s_n g_n`.
pub fn rga_budget_and_steps(m: f64, iterations: usize) -> Check {
    let obj = small_1d_objective(30);
    let neurons: Vec<RidgeNeuron> = (0..41)
        .flat_map(|i| {
            let b = -2.0 + 0.1 * i as f64;
            [RidgeNeuron::new(vec![1.0], b, Activation::ReluPower(2)), RidgeNeuron::new(vec![-1.0], b, Activation::ReluPower(2))]
        })
        .collect();
    let mut dict = FiniteDictionary { neurons };
    let mut failure: Option<String> = None;
    let cfg = RgaConfig { m, iterations };
    let run = rga(&obj, &mut dict, &cfg, |s: &Snapshot| {
        let l1 = s.expansion.l1_norm();
        if l1 > m * (1.0 + 1e-14) && failure.is_none() {
            failure = Some(format!("n={}: ℓ¹ norm {l1} exceeds M = {m}", s.n));
        }
        if s.n <= 2 && s.expansion.terms.len() != 1 {
            failure = Some(format!("n={}: expected a single term, got {}", s.n, s.expansion.terms.len()));
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    if let Some(f) = failure {
        return Err(f);
    }
    // Replay the first two steps by hand.
    let mut u = Expansion::new();
    for step in 0..2.min(run.history.len()) {
        let f = obj.gradient_functional(&obj.embed_expansion(&u).unwrap()).unwrap();
        let mut best: Option<(f64, &RidgeNeuron)> = None;
        for g in &dict.neurons {
            let p = f.eval(g);
            if best.is_none_or(|(bp, _)| p.abs() > bp.abs()) {
                best = Some((p, g));
            }
        }
        let (p, g) = best.unwrap();
        u = Expansion::from_terms(vec![(-m * p.signum(), g.clone())]).unwrap();
        let rec = &run.history[step];
        ensure(rec.omega == g.omega && rec.bias == g.bias, || format!("step {}: different neuron", step + 1))?;
    }
    if run.history.len() >= 2 {
        let mut cfg2 = cfg.clone();
        cfg2.iterations = 2;
        let two = rga(&obj, &mut dict, &cfg2, |_: &Snapshot| Ok(())).unwrap();
        ensure(two.expansion == u, || format!("u₂ = {:?}, expected {:?}", two.expansion, u))?;
    }
    Ok(())
}

/// `⟨∇L(u), g⟩` of the nonlinear energy against central differences.
pub fn nonlinear_pairing_fd(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = NonlinearEnergyProblem {
        kappa: 1.0,
        source: Field::from_fn(|x: &[f64]| 1.0 + x[0] - 0.5 * x[1]),
        domain: Domain::Disk { radius: 2.0 },
    };
    let rule = monte_carlo(&SampleRegion::Disk { radius: 2.0 }, 500, seed).unwrap();
    let obj = assemble_nonlinear(&p, &rule).map_err(|e| e.to_string())?;
    let u = random_expansion(&mut rng, 2, 4, Activation::Sigmoid);
    let g = random_expansion(&mut rng, 2, 1, Activation::Sigmoid).terms[0].1.clone();
    let eps = 1e-5;
    let shifted = |s: f64| {
        let mut v = u.clone();
        v.push(s, g.clone());
        obj.value(&v).unwrap()
    };
    let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
    let exact = obj.gradient_pairing(&u, &g).map_err(|e| e.to_string())?;
    ensure(rel_err(fd, exact, exact.abs().max(1e-3)) < 1e-5, || format!("nonlinear pairing {exact} vs fd {fd}"))
}

/// Exact 1-D search against grid-refine with `N_b = 10⁴` on a small rule.
pub fn exact_vs_dense_grid(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = helmholtz_problem(1, -1.0, 1.0);
    let Domain::Box(dom) = &p.domain else { unreachable!() };
    let obj = assemble_energy(&p, &gauss_grid(dom, &[16], 2).unwrap()).unwrap();
    let u = random_expansion(&mut rng, 1, 3, Activation::ReluPower(2));
    let f = obj.gradient_functional(&obj.embed_expansion(&u).unwrap()).unwrap();
    let bias = BiasRange::new(-2.0, 2.0).unwrap();
    let exact = exact_1d(&f, 2, bias).map_err(|e| e.to_string())?.ok_or("no exact candidate")?;
    let dict = DictionarySpec::relu(2, 1, 1.0);
    let cfg = SearchConfig { n_bias: Some(10_000), mode: Some(SearchMode::GridRefine), ..SearchConfig::default() };
    let grid = Searcher::new(dict, cfg).unwrap().search(&f).map_err(|e| e.to_string())?.ok_or("no grid candidate")?;
    let (e, g) = (exact.pairing.abs(), grid.pairing.abs());
    ensure(g <= e * (1.0 + 1e-12), || format!("grid {g} beats exact {e}"))?;
    ensure(rel_err(g, e, e) < 1e-6, || format!("grid {g} vs exact {e}"))
}

pub fn table_order_example() -> Check {
    let o = order(16, 7.86e-4, 32, 7.70e-5).ok_or("order undefined")?;
    ensure(format!("{o:.2}") == "3.35", || format!("order {o} does not round to 3.35"))
}

/// Every check with fixed inputs; used by the acceptance run.
pub fn all_fixed() -> Vec<(&'static str, Check)> {
    let coeffs = [0.3, -1.2, 0.7, 2.0, -0.4, 1.1, 0.9, -0.6];
    vec![
        ("quadrature exactness 1-D", quadrature_exactness(2, 5, &coeffs, 1)),
        ("quadrature exactness 2-D", quadrature_exactness(1, 3, &coeffs, 2)),
        ("Halton oracle", halton_oracle()),
        ("derivatives vs finite differences", derivative_fd(7)),
        ("energy identity 1-D", energy_identity(1, 1)),
        ("energy identity 2-D", energy_identity(2, 2)),
        ("OGA monotone and orthogonal", oga_monotone_orthogonal(24)),
        ("RGA budget and first steps", rga_budget_and_steps(3.0, 40)),
        ("nonlinear pairing vs finite differences", nonlinear_pairing_fd(3)),
        ("exact 1-D vs dense grid", exact_vs_dense_grid(5)),
        ("order 16 -> 32", table_order_example()),
    ]
}
