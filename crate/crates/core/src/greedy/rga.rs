use serde::{Deserialize, Serialize};

use super::{record, GreedyRun, Selector, Snapshot, StopReason};
use crate::dictionary::Expansion;
use crate::error::{Error, Result};
use crate::problem::{Embedded, Objective};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RgaConfig {
    /// ℓ¹ budget `M`.
    pub m: f64,
    pub iterations: usize,
}

impl Default for RgaConfig {
    fn default() -> Self {
        RgaConfig { m: 1.0, iterations: 64 }
    }
}

impl RgaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::InvalidArgument(format!("M = {} must be positive", self.m)));
        }
        Ok(())
    }
}

/// `α_n = min(1, 2/n)`.
pub fn step_size(n: usize) -> f64 {
    (2.0 / n as f64).min(1.0)
}

/// Relaxed greedy algorithm `u_n = (1 − α_n) u_{n−1} − M α_n s_n g_n`, where
/// `s_n g_n` maximizes the signed pairing with `∇L(u_{n−1})`.
pub fn rga<O, S, F>(obj: &O, selector: &mut S, config: &RgaConfig, mut observer: F) -> Result<GreedyRun>
where
    O: Objective + ?Sized,
    S: Selector,
    F: FnMut(&Snapshot) -> Result<()>,
{
    config.validate()?;
    let mut u = Expansion::new();
    let mut ju = Embedded::zeros(obj.embedding());
    let mut history = Vec::new();
    let mut stop = StopReason::Completed;
    for n in 1..=config.iterations {
        let f = obj.gradient_functional(&ju).map_err(|e| at_iteration(e, n))?;
        let Some(cand) = selector.select(&f)? else {
            stop = StopReason::Converged;
            break;
        };
        let alpha = step_size(n);
        let coef = -config.m * alpha * cand.pairing.signum();
        let jg = obj.embed(&cand.neuron)?;
        ju.scale(1.0 - alpha);
        ju.axpy(coef, &jg);
        u.scale(1.0 - alpha);
        if alpha == 1.0 {
            u.terms.clear();
        }
        u.push(coef, cand.neuron.clone());
        let value = obj.value_embedded(&ju).map_err(|e| at_iteration(e, n))?;
        history.push(record(n, value, &cand, &u));
        observer(&Snapshot { n, expansion: &u, objective: value })?;
    }
    Ok(GreedyRun { expansion: u, history, stop })
}

fn at_iteration(e: Error, n: usize) -> Error {
    match e {
        Error::Numeric { context, index } => Error::Numeric { context: format!("{context} (iteration {n})"), index },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_sizes() {
        assert_eq!(step_size(1), 1.0);
        assert_eq!(step_size(2), 1.0);
        assert!((step_size(3) - 2.0 / 3.0).abs() < 1e-16);
    }
}
