//! Dictionary search `argmax_g |ℓ(g)|` for a linear functional `ℓ`.
//!
//! Three modes:
//! * `exact-1d`: piecewise-polynomial enumeration over biases for `ω = ±1`;
//! * `axis-restricted`: the same exact bias search along each signed axis;
//! * `grid-refine`: grid seeding in angle/bias (or box) coordinates followed
//!   by safeguarded Newton or gradient refinement of the best seeds.

mod exact;
mod refine;
pub mod sphere;

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::{Activation, BiasRange, RidgeNeuron};
use crate::error::{Error, Result};
use crate::problem::{Functional, Projected};

pub use refine::refine;

/// Search strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    GridRefine,
    Exact1d,
    AxisRestricted,
}

/// Local refinement method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefineMethod {
    Gradient,
    Newton,
}

/// How candidates are ranked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreMode {
    /// `−½ ℓ(g)²`.
    Oga,
    /// `−ℓ(g)` with the sign of `g` free.
    Rga,
}

/// Score of a candidate with pairing `pairing`; lower is better.
pub fn score(pairing: f64, mode: ScoreMode) -> f64 {
    match mode {
        ScoreMode::Oga => -0.5 * pairing * pairing,
        ScoreMode::Rga => -pairing,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Bias grid intervals; `None` means `200 · radius`.
    pub n_bias: Option<usize>,
    /// Angle grid size in 2-D; capped at 8 per angle for `d >= 3`.
    pub n_theta: usize,
    /// Grid points per parameter for box-parameterized dictionaries.
    pub n_box: usize,
    pub top_k: usize,
    pub refine: RefineMethod,
    pub refine_iters: usize,
    pub max_halvings: usize,
    /// Forced mode; `None` picks one from the dictionary.
    pub mode: Option<SearchMode>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_bias: None,
            n_theta: 360,
            n_box: 15,
            top_k: 5,
            refine: RefineMethod::Newton,
            refine_iters: 50,
            max_halvings: 50,
            mode: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bias == Some(0) || self.n_theta == 0 || self.n_box < 2 || self.top_k == 0 {
            return Err(Error::InvalidArgument("search grids and top_k must be positive".into()));
        }
        Ok(())
    }
}

/// Parameter set of a dictionary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameterization {
    /// `ω ∈ S^{d−1}`, `b ∈ [c₁, c₂]`.
    Sphere { bias: BiasRange },
    /// `ω ∈ {±e_i}`, `b ∈ [c₁, c₂]`.
    Axes { bias: BiasRange },
    /// Every component of `(ω, b)` in `[lo, hi]`.
    Box { lo: f64, hi: f64 },
}

/// A dictionary: activation, dimension, parameter set and domain radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DictionarySpec {
    pub activation: Activation,
    pub dim: usize,
    pub params: Parameterization,
    /// Largest `‖x‖` over the domain; sets the default bias grid.
    pub radius: f64,
}

impl DictionarySpec {
    /// `ReLU^k` ridge dictionary with the default bias interval for the radius.
    pub fn relu(k: u32, dim: usize, radius: f64) -> Self {
        DictionarySpec {
            activation: Activation::ReluPower(k),
            dim,
            params: Parameterization::Sphere { bias: BiasRange::for_radius(radius) },
            radius,
        }
    }

    pub fn contains(&self, g: &RidgeNeuron) -> bool {
        if g.dim() != self.dim || g.activation != self.activation {
            return false;
        }
        match &self.params {
            Parameterization::Sphere { bias } => {
                let n = g.omega.iter().map(|w| w * w).sum::<f64>().sqrt();
                (n - 1.0).abs() <= 1e-12 && bias.lo <= g.bias && g.bias <= bias.hi
            }
            Parameterization::Axes { bias } => {
                g.omega.iter().filter(|w| **w != 0.0).count() == 1
                    && g.omega.iter().all(|w| *w == 0.0 || w.abs() == 1.0)
                    && bias.lo <= g.bias
                    && g.bias <= bias.hi
            }
            Parameterization::Box { lo, hi } => {
                g.omega.iter().chain(std::iter::once(&g.bias)).all(|v| *lo <= *v && *v <= *hi)
            }
        }
    }

    fn bias_range(&self) -> BiasRange {
        match &self.params {
            Parameterization::Sphere { bias } | Parameterization::Axes { bias } => *bias,
            Parameterization::Box { lo, hi } => BiasRange { lo: *lo, hi: *hi },
        }
    }
}

/// Search result: a neuron and its signed pairing `ℓ(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub neuron: RidgeNeuron,
    pub pairing: f64,
    /// Refinement hit a non-finite value and the seed was kept.
    pub refine_fallback: bool,
}

/// One grid seed: chart parameters plus the decoded neuron.
#[derive(Clone, Debug, PartialEq)]
pub struct Seed {
    pub omega: Vec<f64>,
    pub bias: f64,
}

/// Grid seeds for the dictionary, in deterministic order.
///
/// 1-D: `ω ∈ {−1, +1}`; 2-D: `ω = (cos θ_j, sin θ_j)` with
/// `θ_j = 2πj/N_θ`; `d >= 3`: products of hyperspherical angle grids.
/// Biases are `b_i = c₁ + (c₂ − c₁) i / N_b`, `i = 0..=N_b`.
pub fn seed_candidates(dict: &DictionarySpec, config: &SearchConfig) -> Vec<Seed> {
    let biases = bias_grid(dict, config);
    let mut out = Vec::new();
    for omega in seed_directions(dict, config) {
        for &b in &biases {
            out.push(Seed { omega: omega.clone(), bias: b });
        }
    }
    out
}

fn bias_grid(dict: &DictionarySpec, config: &SearchConfig) -> Vec<f64> {
    let range = dict.bias_range();
    let n = match dict.params {
        Parameterization::Box { .. } => config.n_box - 1,
        _ => default_n_bias(dict, config),
    };
    (0..=n).map(|i| range.lo + range.width() * i as f64 / n as f64).collect()
}

fn default_n_bias(dict: &DictionarySpec, config: &SearchConfig) -> usize {
    config.n_bias.unwrap_or_else(|| ((200.0 * dict.radius).ceil() as usize).max(1))
}

fn seed_directions(dict: &DictionarySpec, config: &SearchConfig) -> Vec<Vec<f64>> {
    let d = dict.dim;
    match &dict.params {
        Parameterization::Axes { .. } => {
            let mut out = Vec::with_capacity(2 * d);
            for i in 0..d {
                for s in [1.0, -1.0] {
                    let mut w = vec![0.0; d];
                    w[i] = s;
                    out.push(w);
                }
            }
            out
        }
        Parameterization::Box { lo, hi } => {
            let n = config.n_box;
            let vals: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
            let mut out = Vec::new();
            let mut idx = vec![0usize; d];
            loop {
                out.push(idx.iter().map(|&i| vals[i]).collect());
                let mut a = d;
                loop {
                    if a == 0 {
                        return out;
                    }
                    a -= 1;
                    idx[a] += 1;
                    if idx[a] < n {
                        break;
                    }
                    idx[a] = 0;
                }
            }
        }
        Parameterization::Sphere { .. } => {
            if d == 1 {
                return vec![vec![1.0], vec![-1.0]];
            }
            if d == 2 {
                let n = config.n_theta;
                return (0..n)
                    .map(|j| {
                        let th = 2.0 * PI * j as f64 / n as f64;
                        vec![th.cos(), th.sin()]
                    })
                    .collect();
            }
            let n = config.n_theta.min(8);
            let polar: Vec<f64> = (0..n).map(|j| PI * (j as f64 + 0.5) / n as f64).collect();
            let azimuth: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
            let m = d - 1;
            let mut idx = vec![0usize; m];
            let mut out = Vec::new();
            loop {
                let theta: Vec<f64> =
                    (0..m).map(|a| if a + 1 == m { azimuth[idx[a]] } else { polar[idx[a]] }).collect();
                out.push(sphere::direction(&theta));
                let mut a = m;
                loop {
                    if a == 0 {
                        return out;
                    }
                    a -= 1;
                    idx[a] += 1;
                    if idx[a] < n {
                        break;
                    }
                    idx[a] = 0;
                }
            }
        }
    }
}

/// Cached sort orders keyed by direction and point layout.
type OrderKey = (Vec<u64>, Vec<(usize, usize)>);

/// Stateful searcher; caches sort permutations across calls.
#[derive(Debug)]
pub struct Searcher {
    dict: DictionarySpec,
    config: SearchConfig,
    mode: SearchMode,
    orders: HashMap<OrderKey, Vec<u32>>,
}

impl Searcher {
    pub fn new(dict: DictionarySpec, config: SearchConfig) -> Result<Self> {
        config.validate()?;
        if dict.dim == 0 {
            return Err(Error::InvalidArgument("dictionary dimension must be >= 1".into()));
        }
        let relu = matches!(dict.activation, Activation::ReluPower(_));
        let auto = match dict.params {
            Parameterization::Axes { .. } => SearchMode::AxisRestricted,
            Parameterization::Sphere { .. } if dict.dim == 1 && relu => SearchMode::Exact1d,
            _ => SearchMode::GridRefine,
        };
        let mode = config.mode.unwrap_or(auto);
        match (mode, &dict.params) {
            (SearchMode::Exact1d, Parameterization::Sphere { .. }) if dict.dim == 1 && relu => {}
            (SearchMode::Exact1d, _) => {
                return Err(Error::InvalidArgument("exact-1d needs a 1-D ReLU^k sphere dictionary".into()))
            }
            (SearchMode::AxisRestricted, Parameterization::Axes { .. }) => {}
            (SearchMode::AxisRestricted, _) => {
                return Err(Error::InvalidArgument("axis-restricted search needs an axis dictionary".into()))
            }
            (SearchMode::GridRefine, Parameterization::Axes { .. }) => {
                return Err(Error::InvalidArgument("axis dictionaries are searched in axis-restricted mode".into()))
            }
            _ => {}
        }
        Ok(Searcher { dict, config, mode, orders: HashMap::new() })
    }

    pub fn mode(&self) -> SearchMode {
        self.mode
    }

    pub fn dictionary(&self) -> &DictionarySpec {
        &self.dict
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    /// Best candidate, or `None` if the functional vanishes on the dictionary.
    pub fn search(&mut self, f: &Functional) -> Result<Option<Candidate>> {
        if f.dim() != self.dict.dim {
            return Err(Error::DimensionMismatch { expected: self.dict.dim, found: f.dim() });
        }
        if f.is_zero() {
            return Ok(None);
        }
        let best = match self.mode {
            SearchMode::Exact1d | SearchMode::AxisRestricted => self.exact_directions(f),
            SearchMode::GridRefine => self.grid_refine(f)?,
        };
        if !best.pairing.is_finite() {
            return Err(Error::Numeric { context: "non-finite pairing in dictionary search".into(), index: 0 });
        }
        Ok(if best.pairing == 0.0 { None } else { Some(best) })
    }

    fn order_for(&mut self, f: &Functional, omega: &[f64], proj: &Projected) -> &[u32] {
        let key: OrderKey = (
            omega.iter().map(|w| w.to_bits()).collect(),
            f.groups.iter().map(|g| (std::sync::Arc::as_ptr(&g.points) as usize, g.points.len())).collect(),
        );
        self.orders.entry(key).or_insert_with(|| exact::descending_order(&proj.t))
    }

    /// Exact bias search along each seeded direction (`±1` or `±e_i`).
    fn exact_directions(&mut self, f: &Functional) -> Candidate {
        let act = self.dict.activation;
        let range = self.dict.bias_range();
        let dirs = seed_directions(&self.dict, &self.config);
        let mut best = Candidate {
            neuron: RidgeNeuron::new(dirs[0].clone(), range.lo, act),
            pairing: 0.0,
            refine_fallback: false,
        };
        let mut proj = Projected::default();
        for omega in dirs {
            f.project(&omega, &mut proj);
            let (b, v) = match act {
                Activation::ReluPower(k) => {
                    let order = self.order_for(f, &omega, &proj).to_vec();
                    exact::exact_bias_search(&proj, k, &order, range)
                }
                _ => self.bias_grid_then_refine(f, &proj, &omega),
            };
            if v.abs() > best.pairing.abs() {
                best = Candidate { neuron: RidgeNeuron::new(omega, b, act), pairing: v, refine_fallback: false };
            }
        }
        best
    }

    /// Fallback for smooth activations on fixed directions.
    fn bias_grid_then_refine(&self, f: &Functional, proj: &Projected, omega: &[f64]) -> (f64, f64) {
        let act = self.dict.activation;
        let mut best = (self.dict.bias_range().lo, 0.0_f64);
        for b in bias_grid(&self.dict, &self.config) {
            let v = proj.eval(act, b);
            if v.abs() > best.1.abs() {
                best = (b, v);
            }
        }
        let seed = Candidate {
            neuron: RidgeNeuron::new(omega.to_vec(), best.0, act),
            pairing: best.1,
            refine_fallback: false,
        };
        let r = refine::refine_fixed_direction(f, seed, &self.dict, &self.config);
        (r.neuron.bias, r.pairing)
    }

    fn grid_refine(&self, f: &Functional) -> Result<Candidate> {
        let act = self.dict.activation;
        let dirs = seed_directions(&self.dict, &self.config);
        let biases = bias_grid(&self.dict, &self.config);
        let k = self.config.top_k;
        let (lo, hi) = (biases[0], *biases.last().unwrap_or(&biases[0]));
        let step = if biases.len() > 1 { (hi - lo) / (biases.len() - 1) as f64 } else { 1.0 };
        // Per direction: the k best bias indices, merged afterwards in index order.
        let per_dir: Vec<Vec<(f64, usize, usize)>> = dirs
            .par_iter()
            .enumerate()
            .map_init(Projected::default, |proj, (di, omega)| {
                f.project(omega, proj);
                let vals = match act {
                    Activation::ReluPower(kk) => exact::grid_values(proj, kk, lo, step, biases.len()),
                    _ => biases.iter().map(|&b| proj.eval(act, b)).collect(),
                };
                top_k_indices(&vals, k).into_iter().map(|bi| (vals[bi], di, bi)).collect()
            })
            .collect();
        let mut all: Vec<(f64, usize, usize)> = per_dir.into_iter().flatten().collect();
        all.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        all.truncate(k);
        if all.is_empty() {
            return Err(Error::DegenerateDictionary);
        }
        let seeds: Vec<Candidate> = all
            .iter()
            .map(|&(_, di, bi)| {
                let neuron = RidgeNeuron::new(dirs[di].clone(), biases[bi], act);
                let pairing = f.eval(&neuron);
                Candidate { neuron, pairing, refine_fallback: false }
            })
            .collect();
        let refined: Vec<Candidate> =
            seeds.par_iter().map(|s| refine::refine(f, s.clone(), &self.dict, &self.config)).collect();
        let mut best = seeds[0].clone();
        for c in seeds.iter().chain(refined.iter()) {
            if c.pairing.abs() > best.pairing.abs() {
                best = c.clone();
            }
        }
        Ok(best)
    }
}

/// Indices of the `k` largest `|v|`, ties by first occurrence.
fn top_k_indices(vals: &[f64], k: usize) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::with_capacity(k + 1);
    for (i, v) in vals.iter().enumerate() {
        let pos = best.iter().position(|&j| v.abs() > vals[j].abs()).unwrap_or(best.len());
        if pos < k {
            best.insert(pos, i);
            best.truncate(k);
        }
    }
    best
}

/// Exact 1-D search over `ω ∈ {±1}`, `b ∈ [c₁, c₂]` for `ReLU^k`.
pub fn exact_1d(f: &Functional, k: u32, bias: BiasRange) -> Result<Option<Candidate>> {
    let dict = DictionarySpec {
        activation: Activation::ReluPower(k),
        dim: 1,
        params: Parameterization::Sphere { bias },
        radius: 1.0,
    };
    let config = SearchConfig { mode: Some(SearchMode::Exact1d), ..SearchConfig::default() };
    Searcher::new(dict, config)?.search(f)
}

/// Exact search over the signed axis dictionary `{σ(±x_i + b)}`.
pub fn axis_restricted(f: &Functional, k: u32, bias: BiasRange) -> Result<Option<Candidate>> {
    let dict = DictionarySpec {
        activation: Activation::ReluPower(k),
        dim: f.dim(),
        params: Parameterization::Axes { bias },
        radius: 1.0,
    };
    Searcher::new(dict, SearchConfig::default())?.search(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_seeds() {
        let dict = DictionarySpec::relu(2, 1, 1.0);
        let config = SearchConfig { n_bias: Some(4), ..SearchConfig::default() };
        let seeds = seed_candidates(&dict, &config);
        assert_eq!(seeds.len(), 10);
        let biases: Vec<f64> = seeds[..5].iter().map(|s| s.bias).collect();
        assert_eq!(biases, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn two_dimensional_angles() {
        let dict = DictionarySpec::relu(2, 2, 1.0);
        let config = SearchConfig { n_theta: 4, n_bias: Some(1), ..SearchConfig::default() };
        let dirs = seed_directions(&dict, &config);
        let expected = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (d, e) in dirs.iter().zip(expected) {
            assert!((d[0] - e[0]).abs() < 1e-15 && (d[1] - e[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn seeded_directions_are_unit() {
        for d in 1..5 {
            let dict = DictionarySpec::relu(2, d, 1.0);
            let config = SearchConfig { n_bias: Some(2), n_theta: 6, ..SearchConfig::default() };
            for s in seed_candidates(&dict, &config) {
                let n = s.omega.iter().map(|w| w * w).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn score_examples() {
        assert_eq!(score(0.0, ScoreMode::Oga), 0.0);
        assert_eq!(score(2.0, ScoreMode::Oga), score(-2.0, ScoreMode::Oga));
        assert!(score(1.0, ScoreMode::Oga) < score(0.0, ScoreMode::Oga));
        assert_eq!(score(3.0, ScoreMode::Rga), -3.0);
    }

    #[test]
    fn top_k_prefers_first_on_ties() {
        assert_eq!(top_k_indices(&[1.0, -3.0, 3.0, 0.5], 2), vec![1, 2]);
    }
}
