use std::sync::Arc;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use super::{record, GreedyRun, Selector, Snapshot, StopReason};
use crate::dictionary::Expansion;
use crate::error::{Error, Result};
use crate::problem::{Embedded, Objective, QuadraticObjective};

/// Full refactorization period of the incremental Cholesky factor.
const REFACTOR_EVERY: usize = 64;
/// A new column whose squared distance to the current span is below this
/// fraction of its squared norm is treated as numerically dependent.
const DEPENDENCE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OgaConfig {
    pub iterations: usize,
    /// Relative Tikhonov shift `ε · trace(G) / n` used once `G` turns singular.
    pub eps_gram: f64,
    /// Stop when `|pairing| <= stop_rel · ‖y‖²_W`.
    pub stop_rel: f64,
}

impl Default for OgaConfig {
    fn default() -> Self {
        OgaConfig { iterations: 64, eps_gram: 1e-12, stop_rel: 1e-14 }
    }
}

impl OgaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_gram >= 0.0 && self.eps_gram.is_finite()) {
            return Err(Error::InvalidArgument(format!("eps_gram = {} must be >= 0", self.eps_gram)));
        }
        if !(self.stop_rel >= 0.0) {
            return Err(Error::InvalidArgument("stop_rel must be >= 0".into()));
        }
        Ok(())
    }
}

/// Cholesky factor of a growing Gram matrix `G + s I`.
#[derive(Clone, Debug, Default)]
pub struct GramFactor {
    /// Lower triangle of `G`, row `i` has `i + 1` entries.
    gram: Vec<Vec<f64>>,
    chol: Vec<Vec<f64>>,
    shift: f64,
    eps: f64,
    since_refactor: usize,
}

impl GramFactor {
    pub fn new(eps_gram: f64) -> Self {
        GramFactor { eps: eps_gram, ..Default::default() }
    }

    pub fn len(&self) -> usize {
        self.gram.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gram.is_empty()
    }

    /// Diagonal shift currently applied.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    fn g(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.gram[i][j]
        } else {
            self.gram[j][i]
        }
    }

    /// Appends a column with cross products `row` and squared norm `diag`.
    pub fn push(&mut self, row: &[f64], diag: f64) -> Result<()> {
        let n = self.len();
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        if !(diag > 0.0 && diag.is_finite()) {
            return Err(Error::RankDeficient(format!("column {n} has W-norm² {diag:e}")));
        }
        let mut g = row.to_vec();
        g.push(diag);
        self.gram.push(g);
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            return self.refactor().inspect_err(|_| {
                self.gram.pop();
            });
        }
        let l = forward(&self.chol, row);
        let rest = diag + self.shift - l.iter().map(|v| v * v).sum::<f64>();
        if rest > DEPENDENCE_TOL * diag {
            let mut l = l;
            l.push(rest.sqrt());
            self.chol.push(l);
            return Ok(());
        }
        if self.shift == 0.0 && self.eps > 0.0 {
            let trace: f64 = (0..=n).map(|i| self.gram[i][i]).sum();
            self.shift = self.eps * trace / (n + 1) as f64;
            debug!("Gram matrix singular at column {n}; shift {:e}", self.shift);
        }
        self.refactor().inspect_err(|_| {
            self.gram.pop();
        })
    }

    /// Recomputes the factor of `G + s I` from scratch.
    pub fn refactor(&mut self) -> Result<()> {
        self.since_refactor = 0;
        let n = self.len();
        let mut chol: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = vec![0.0; i + 1];
            for j in 0..=i {
                let mut s = self.gram[i][j] + if i == j { self.shift } else { 0.0 };
                for k in 0..j {
                    s -= row[k] * if j == i { row[k] } else { chol[j][k] };
                }
                if i == j {
                    let floor = if self.shift > 0.0 { 0.0 } else { DEPENDENCE_TOL * self.gram[i][i] };
                    if !(s > floor) {
                        return Err(Error::RankDeficient(format!("Gram pivot {i} is {s:e}")));
                    }
                    row[i] = s.sqrt();
                } else {
                    row[j] = s / chol[j][j];
                }
            }
            chol.push(row);
        }
        self.chol = chol;
        Ok(())
    }

    /// Solves `G c = b` with the shifted factor plus one refinement step
    /// against the unshifted `G`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = backward(&self.chol, &forward(&self.chol, b));
        let r: Vec<f64> = (0..n).map(|i| b[i] - (0..n).map(|j| self.g(i, j) * c[j]).sum::<f64>()).collect();
        let dc = backward(&self.chol, &forward(&self.chol, &r));
        c.iter_mut().zip(dc).for_each(|(x, d)| *x += d);
        c
    }
}

fn forward(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i][i];
    }
    y
}

fn backward(l: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    x
}

/// W-least-squares coefficients of `y` on `columns`.
pub fn project(columns: &[Embedded], y: &Embedded, weights: &[Arc<Vec<f64>>], eps_gram: f64) -> Result<Vec<f64>> {
    if columns.is_empty() {
        return Err(Error::InvalidArgument("projection onto an empty selection".into()));
    }
    let mut factor = GramFactor::new(eps_gram);
    for (i, c) in columns.iter().enumerate() {
        let row: Vec<f64> = columns[..i].iter().map(|p| p.weighted_dot(c, weights)).collect();
        factor.push(&row, c.weighted_dot(c, weights))?;
    }
    let b: Vec<f64> = columns.iter().map(|c| c.weighted_dot(y, weights)).collect();
    Ok(factor.solve(&b))
}

fn combine(template: &Embedded, columns: &[Embedded], coeffs: &[f64]) -> Embedded {
    let mut out = Embedded { blocks: vec![None; template.blocks.len()] };
    for (c, a) in columns.iter().zip(coeffs) {
        out.axpy(*a, c);
    }
    out
}

/// Orthogonal greedy algorithm.
///
/// `observer` runs after every iteration with the current expansion.
pub fn oga<S, F>(obj: &QuadraticObjective, selector: &mut S, config: &OgaConfig, mut observer: F) -> Result<GreedyRun>
where
    S: Selector,
    F: FnMut(&Snapshot) -> Result<()>,
{
    config.validate()?;
    let weights = obj.weights();
    let y = obj.target();
    let threshold = config.stop_rel * obj.target_norm_sq();
    let mut factor = GramFactor::new(config.eps_gram);
    let mut columns: Vec<Embedded> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut u = Expansion::new();
    let mut ju = Embedded::zeros(obj.embedding());
    let mut history = Vec::new();
    let mut stop = StopReason::Completed;
    for n in 1..=config.iterations {
        let f = obj.gradient_functional(&ju)?;
        let Some(cand) = selector.select(&f)? else {
            stop = StopReason::Converged;
            break;
        };
        if cand.pairing.abs() <= threshold {
            stop = StopReason::Converged;
            break;
        }
        let col = obj.embed(&cand.neuron)?;
        let row: Vec<f64> = columns.iter().map(|c| c.weighted_dot(&col, weights)).collect();
        if let Err(e) = factor.push(&row, col.weighted_dot(&col, weights)) {
            warn!("iteration {n}: rejected ω = {:?}, b = {}: {e}", cand.neuron.omega, cand.neuron.bias);
            stop = StopReason::RankDeficient;
            break;
        }
        rhs.push(col.weighted_dot(y, weights));
        columns.push(col);
        let coeffs = factor.solve(&rhs);
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Numeric { context: format!("OGA coefficients at iteration {n}"), index: i });
        }
        ju = combine(&ju, &columns, &coeffs);
        let mut neurons: Vec<_> = u.terms.drain(..).map(|(_, g)| g).collect();
        neurons.push(cand.neuron.clone());
        u = Expansion { terms: coeffs.iter().copied().zip(neurons).collect() };
        let value = obj.value_embedded(&ju)?;
        history.push(record(n, value, &cand, &u));
        observer(&Snapshot { n, expansion: &u, objective: value })?;
    }
    Ok(GreedyRun { expansion: u, history, stop })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_factor_solves_and_shifts() {
        let mut f = GramFactor::new(1e-12);
        f.push(&[], 4.0).unwrap();
        f.push(&[2.0], 5.0).unwrap();
        let c = f.solve(&[6.0, 7.0]);
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[1] - 1.0).abs() < 1e-14);
        f.push(&[2.0, 5.0], 5.0).unwrap();
        assert!(f.shift() > 0.0);
        assert!(matches!(f.push(&[0.0, 0.0, 0.0], 0.0), Err(Error::RankDeficient(_))));
    }
}
