//! Convex energy `∫ ½|∇u|² + κ cosh(u) − f u` (Poisson–Boltzmann type).

use std::sync::Arc;

use crate::dictionary::MultiIndex;
use crate::error::{Error, Result};
use crate::quadrature::{Domain, QuadratureRule};

use super::embedding::{Block, Embedded, Embedding, Term};
use super::{Field, Objective};

/// Largest argument for which `cosh` stays finite.
const COSH_LIMIT: f64 = 710.0;

#[derive(Clone, Debug)]
pub struct NonlinearEnergyProblem {
    pub kappa: f64,
    pub source: Field,
    pub domain: Domain,
}

/// Discrete energy `Σ w_i (½|∇u|² + κ cosh u − f u)(x_i)`.
#[derive(Clone, Debug)]
pub struct NonlinearObjective {
    embedding: Embedding,
    weights: Vec<f64>,
    source: Vec<f64>,
    kappa: f64,
    /// Smoothness constant of the loss, if known; reporting only.
    pub smoothness_hint: Option<f64>,
}

impl NonlinearObjective {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn check_range(&self, u: &[f64]) -> Result<()> {
        if let Some(i) = u.iter().position(|v| !(v.abs() < COSH_LIMIT)) {
            let max = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            return Err(Error::Numeric { context: format!("cosh overflow, max |u| = {max:e}"), index: i });
        }
        Ok(())
    }
}

pub fn assemble_nonlinear(p: &NonlinearEnergyProblem, rule: &QuadratureRule) -> Result<NonlinearObjective> {
    if !(p.kappa > 0.0 && p.kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("κ = {} must be positive", p.kappa)));
    }
    let d = p.domain.dim();
    if rule.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rule.dim() });
    }
    let pts = rule.shared_points();
    let mut blocks = vec![Block::new("value", Arc::clone(&pts), vec![Term::unit(MultiIndex::zero(d))])?];
    for i in 0..d {
        blocks.push(Block::new(format!("d{i}"), Arc::clone(&pts), vec![Term::unit(MultiIndex::axis(d, i, 1))])?);
    }
    let source = p.source.sample(&pts);
    if let Some(i) = source.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric { context: "source term".into(), index: i });
    }
    Ok(NonlinearObjective {
        embedding: Embedding::new(d, blocks)?,
        weights: rule.weights().to_vec(),
        source,
        kappa: p.kappa,
        smoothness_hint: None,
    })
}

impl Objective for NonlinearObjective {
    fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    fn value_embedded(&self, ju: &Embedded) -> Result<f64> {
        let n = self.len();
        let zeros = vec![0.0; n];
        let u = ju.block(0).unwrap_or(&zeros);
        self.check_range(u)?;
        let mut acc = 0.0;
        for i in 0..n {
            let mut grad_sq = 0.0;
            for b in 1..ju.blocks.len() {
                if let Some(g) = ju.block(b) {
                    grad_sq += g[i] * g[i];
                }
            }
            acc += self.weights[i] * (0.5 * grad_sq + self.kappa * u[i].cosh() - self.source[i] * u[i]);
        }
        Ok(acc)
    }

    fn dual_embedded(&self, ju: &Embedded) -> Result<Embedded> {
        let n = self.len();
        let zeros = vec![0.0; n];
        let u = ju.block(0).unwrap_or(&zeros);
        self.check_range(u)?;
        let mut blocks = Vec::with_capacity(ju.blocks.len());
        blocks.push(Some(
            (0..n).map(|i| self.weights[i] * (self.kappa * u[i].sinh() - self.source[i])).collect(),
        ));
        for b in 1..ju.blocks.len() {
            blocks.push(ju.block(b).map(|g| g.iter().zip(&self.weights).map(|(gi, w)| gi * w).collect()));
        }
        Ok(Embedded { blocks })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{Activation, Expansion, RidgeNeuron};
    use crate::quadrature::{monte_carlo, SampleRegion};

    fn objective(source: Field) -> NonlinearObjective {
        let rule = monte_carlo(&SampleRegion::Disk { radius: 2.0 }, 400, 1).unwrap();
        let p = NonlinearEnergyProblem { kappa: 1.0, source, domain: Domain::Disk { radius: 2.0 } };
        assemble_nonlinear(&p, &rule).unwrap()
    }

    #[test]
    fn value_at_zero_is_kappa_times_area() {
        let obj = objective(Field::Const(0.0));
        let v = obj.value(&Expansion::new()).unwrap();
        assert!((v - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let g = RidgeNeuron::new(vec![0.3, -1.2], 0.5, Activation::Sigmoid);
        assert_eq!(obj.gradient_pairing(&Expansion::new(), &g).unwrap(), 0.0);
    }

    #[test]
    fn cosh_overflow_is_reported() {
        let obj = objective(Field::Const(0.0));
        let g = RidgeNeuron::new(vec![1.0, 0.0], 20.0, Activation::Sigmoid);
        let u = Expansion::from_terms(vec![(1000.0, g)]).unwrap();
        assert!(matches!(obj.value(&u), Err(Error::Numeric { .. })));
    }
}
