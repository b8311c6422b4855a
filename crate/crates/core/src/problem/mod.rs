//! PDE problem descriptions and the discrete objectives assembled from them.

mod embedding;
mod nonlinear;
mod quadratic;

use std::fmt;
use std::sync::Arc;

pub use embedding::{Block, Coefficient, Embedded, Embedding, Functional, FunctionalGroup, LocalModel, Projected, Term};
pub use nonlinear::{assemble_nonlinear, NonlinearEnergyProblem, NonlinearObjective};
pub use quadratic::{
    assemble_energy, assemble_penalized, assemble_pinn, BoundaryCondition, BoundaryScaling, EllipticProblem,
    PinnProblem, QuadraticObjective,
};

use crate::dictionary::{Expansion, RidgeNeuron};
use crate::error::{Error, Result};
use crate::quadrature::PointSet;

/// Scalar field on `R^d`, either constant or given by a closure.
#[derive(Clone)]
pub enum Field {
    Const(f64),
    Fn(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl Field {
    pub fn constant(c: f64) -> Self {
        Field::Const(c)
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Field::Fn(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Field::Const(c) => *c,
            Field::Fn(f) => f(x),
        }
    }

    pub fn sample(&self, points: &PointSet) -> Vec<f64> {
        points.iter().map(|x| self.eval(x)).collect()
    }

    /// Samples the field and checks it is strictly positive and finite.
    pub fn sample_positive(&self, name: &str, points: &PointSet) -> Result<Vec<f64>> {
        let v = self.sample(points);
        if let Some((i, &value)) = v.iter().enumerate().find(|(_, a)| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::CoefficientViolation { name: name.to_string(), index: i, value });
        }
        Ok(v)
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Const(c) => write!(f, "Field::Const({c})"),
            Field::Fn(_) => write!(f, "Field::Fn(..)"),
        }
    }
}

/// A discrete loss that factors through an [`Embedding`]: its value and
/// gradient depend on `v` only through `J(v)`.
pub trait Objective: Send + Sync {
    fn embedding(&self) -> &Embedding;

    /// Loss value as a function of the embedded coordinates.
    fn value_embedded(&self, ju: &Embedded) -> Result<f64>;

    /// Gradient of the loss with respect to the embedded coordinates, so that
    /// `⟨∇L(u), g⟩ = dual · J(g)`.
    fn dual_embedded(&self, ju: &Embedded) -> Result<Embedded>;

    fn embed(&self, g: &RidgeNeuron) -> Result<Embedded> {
        self.embedding().embed(g)
    }

    fn embed_expansion(&self, u: &Expansion) -> Result<Embedded> {
        let mut out = Embedded::zeros(self.embedding());
        for (a, g) in &u.terms {
            out.axpy(*a, &self.embed(g)?);
        }
        Ok(out)
    }

    fn value(&self, u: &Expansion) -> Result<f64> {
        self.value_embedded(&self.embed_expansion(u)?)
    }

    /// `⟨∇L(u), g⟩`.
    fn gradient_pairing(&self, u: &Expansion, g: &RidgeNeuron) -> Result<f64> {
        let dual = self.dual_embedded(&self.embed_expansion(u)?)?;
        Ok(dual.dot(&self.embed(g)?))
    }

    /// The linear functional `g ↦ ⟨∇L(u), g⟩` given `J(u)`.
    fn gradient_functional(&self, ju: &Embedded) -> Result<Functional> {
        Ok(self.embedding().functional(&self.dual_embedded(ju)?))
    }
}
