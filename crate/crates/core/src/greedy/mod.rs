//! Greedy drivers: OGA for quadratic objectives, RGA for convex ones.

mod oga;
mod rga;

use serde::Serialize;

use crate::argmax::{Candidate, Searcher};
use crate::dictionary::{Expansion, RidgeNeuron};
use crate::error::Result;
use crate::problem::Functional;

pub use oga::{oga, project, GramFactor, OgaConfig};
pub use rga::{rga, step_size, RgaConfig};

/// Anything that can pick a dictionary element for a functional.
pub trait Selector {
    /// Element maximizing `|ℓ(g)|` with its signed pairing, or `None` if `ℓ`
    /// vanishes on the dictionary.
    fn select(&mut self, f: &Functional) -> Result<Option<Candidate>>;
}

impl Selector for Searcher {
    fn select(&mut self, f: &Functional) -> Result<Option<Candidate>> {
        self.search(f)
    }
}

/// Exhaustive search over an explicit list of neurons; ties go to the first.
#[derive(Clone, Debug)]
pub struct FiniteDictionary {
    pub neurons: Vec<RidgeNeuron>,
}

impl Selector for FiniteDictionary {
    fn select(&mut self, f: &Functional) -> Result<Option<Candidate>> {
        let mut best: Option<Candidate> = None;
        for g in &self.neurons {
            let p = f.eval(g);
            if p != 0.0 && best.as_ref().is_none_or(|b| p.abs() > b.pairing.abs()) {
                best = Some(Candidate { neuron: g.clone(), pairing: p, refine_fallback: false });
            }
        }
        Ok(best)
    }
}

/// One greedy iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub n: usize,
    pub objective: f64,
    pub omega: Vec<f64>,
    pub bias: f64,
    /// `|⟨g_n, ∇L(u_{n−1})⟩|`.
    pub pairing: f64,
    pub l1_norm: f64,
    pub refine_fallback: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Completed,
    /// The best pairing fell below the stop threshold.
    Converged,
    /// The Gram system could not absorb the selected element.
    RankDeficient,
}

/// State passed to observers after every iteration.
#[derive(Clone, Debug)]
pub struct Snapshot<'a> {
    pub n: usize,
    pub expansion: &'a Expansion,
    pub objective: f64,
}

#[derive(Clone, Debug)]
pub struct GreedyRun {
    pub expansion: Expansion,
    pub history: Vec<IterationRecord>,
    pub stop: StopReason,
}

impl GreedyRun {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }
}

fn record(n: usize, objective: f64, c: &Candidate, u: &Expansion) -> IterationRecord {
    IterationRecord {
        n,
        objective,
        omega: c.neuron.omega.clone(),
        bias: c.neuron.bias,
        pairing: c.pairing.abs(),
        l1_norm: u.l1_norm(),
        refine_fallback: c.refine_fallback,
    }
}
