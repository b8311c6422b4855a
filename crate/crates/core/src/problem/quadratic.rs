//! Quadratic objectives `½‖J(v) − y‖²_W + offset` for linear problems.

use std::sync::Arc;

use crate::dictionary::{Expansion, MultiIndex, RidgeNeuron};
use crate::error::{Error, Result};
use crate::quadrature::{BoundaryRule, Domain, PointSet, QuadratureRule};

use super::embedding::{Block, Coefficient, Embedded, Embedding, Term};
use super::{Field, Objective};

/// Boundary treatment for the energy formulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryCondition {
    /// Natural (Neumann) conditions; no boundary terms.
    NaturalNeumann,
    /// Dirichlet data `0` imposed by the penalty `δ⁻¹ Σ_k ‖∂_ν^k v‖²` for `k < m`.
    DirichletPenalty { delta: f64 },
}

/// `Lu = Σ_{|α|=m} (−1)^m ∂^α (a_α ∂^α u) + a₀ u = f`.
#[derive(Clone, Debug)]
pub struct EllipticProblem {
    pub order: usize,
    pub top: Vec<(MultiIndex, Field)>,
    pub zero: Field,
    pub source: Field,
    pub domain: Domain,
    pub boundary: BoundaryCondition,
}

impl EllipticProblem {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidArgument("elliptic problems need order m >= 1".into()));
        }
        if self.top.is_empty() {
            return Err(Error::InvalidArgument("no top-order coefficients".into()));
        }
        for (alpha, _) in &self.top {
            if alpha.dim() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), found: alpha.dim() });
            }
            if alpha.order() != self.order {
                return Err(Error::InvalidArgument(format!(
                    "multi-index {alpha} has order {} but m = {}",
                    alpha.order(),
                    self.order
                )));
            }
        }
        Ok(())
    }
}

/// How boundary rows of a PINN loss are normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryScaling {
    /// `(1/N_bc) Σ |B v|²`.
    Mean,
    /// `Σ |B v|²`.
    Sum,
}

/// Residual least-squares problem `‖Lv − f‖² + ‖∂_ν^k v‖²`.
#[derive(Clone, Debug)]
pub struct PinnProblem {
    pub operator: Vec<(MultiIndex, Field)>,
    pub source: Field,
    /// Normal-derivative orders imposed (homogeneously) on the boundary.
    pub boundary_traces: Vec<usize>,
    pub boundary_scaling: BoundaryScaling,
    pub domain: Domain,
}

/// Assembled quadratic objective.
#[derive(Clone, Debug)]
pub struct QuadraticObjective {
    embedding: Embedding,
    weights: Vec<Arc<Vec<f64>>>,
    target: Embedded,
    offset: f64,
}

impl QuadraticObjective {
    pub fn new(embedding: Embedding, weights: Vec<Arc<Vec<f64>>>, target: Embedded, offset: f64) -> Result<Self> {
        if weights.len() != embedding.blocks.len() || target.blocks.len() != embedding.blocks.len() {
            return Err(Error::InvalidArgument("one weight and target entry per block required".into()));
        }
        for (i, (b, w)) in embedding.blocks.iter().zip(&weights).enumerate() {
            if w.len() != b.len() {
                return Err(Error::InvalidArgument(format!("block {i}: weight count mismatch")));
            }
            if let Some(p) = w.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidArgument(format!("block {i}: metric weight {p} is not positive")));
            }
            if let Some(y) = target.block(i) {
                if y.len() != b.len() {
                    return Err(Error::InvalidArgument(format!("block {i}: target length mismatch")));
                }
            }
        }
        Ok(QuadraticObjective { embedding, weights, target, offset })
    }

    pub fn weights(&self) -> &[Arc<Vec<f64>>] {
        &self.weights
    }

    pub fn target(&self) -> &Embedded {
        &self.target
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `‖y‖²_W`.
    pub fn target_norm_sq(&self) -> f64 {
        self.target.weighted_dot(&self.target, &self.weights)
    }

    /// `J(v) − y`.
    pub fn residual(&self, ju: &Embedded) -> Embedded {
        let mut r = ju.clone();
        r.axpy(-1.0, &self.target);
        r
    }

    /// `‖x‖²_W`.
    pub fn norm_sq(&self, x: &Embedded) -> f64 {
        x.weighted_dot(x, &self.weights)
    }

    pub fn objective_value(&self, u: &Expansion) -> Result<f64> {
        self.value(u)
    }

    /// `⟨J(g), J(u) − y⟩_W`.
    pub fn residual_pairing(&self, u: &Expansion, g: &RidgeNeuron) -> Result<f64> {
        self.gradient_pairing(u, g)
    }

    /// Index of the block called `name`.
    pub fn block_index(&self, name: &str) -> Option<usize> {
        self.embedding.blocks.iter().position(|b| b.name == name)
    }
}

impl Objective for QuadraticObjective {
    fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    fn value_embedded(&self, ju: &Embedded) -> Result<f64> {
        let r = self.residual(ju);
        Ok(0.5 * self.norm_sq(&r) + self.offset)
    }

    fn dual_embedded(&self, ju: &Embedded) -> Result<Embedded> {
        let mut r = self.residual(ju);
        for (blk, w) in r.blocks.iter_mut().zip(&self.weights) {
            if let Some(v) = blk {
                v.iter_mut().zip(w.iter()).for_each(|(x, wi)| *x *= wi);
            }
        }
        Ok(r)
    }
}

fn check_rule_dim(rule_dim: usize, domain: &Domain) -> Result<()> {
    if rule_dim != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), found: rule_dim });
    }
    Ok(())
}

fn energy_blocks(
    p: &EllipticProblem,
    rule: &QuadratureRule,
) -> Result<(Vec<Block>, Vec<Arc<Vec<f64>>>, Vec<Option<Vec<f64>>>, f64)> {
    p.validate()?;
    check_rule_dim(rule.dim(), &p.domain)?;
    let pts = rule.shared_points();
    let w = rule.weights();
    let a0 = p.zero.sample_positive("a0", &pts)?;
    let f = p.source.sample(&pts);
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric { context: "source term".into(), index: i });
    }
    let d = p.dim();
    let mut blocks = vec![Block::new("value", Arc::clone(&pts), vec![Term::unit(MultiIndex::zero(d))])?];
    let mut weights = vec![Arc::new(w.iter().zip(&a0).map(|(wi, a)| wi * a).collect::<Vec<_>>())];
    let target0: Vec<f64> = f.iter().zip(&a0).map(|(fi, a)| fi / a).collect();
    let offset = -0.5 * w.iter().zip(&f).zip(&a0).map(|((wi, fi), a)| wi * fi * fi / a).sum::<f64>();
    let mut targets = vec![Some(target0)];
    for (alpha, coef) in &p.top {
        let a = coef.sample_positive(&format!("a{alpha}"), &pts)?;
        blocks.push(Block::new(format!("d{alpha}"), Arc::clone(&pts), vec![Term::unit(alpha.clone())])?);
        weights.push(Arc::new(w.iter().zip(&a).map(|(wi, ai)| wi * ai).collect()));
        targets.push(None);
    }
    Ok((blocks, weights, targets, offset))
}

/// Energy `½ a_N(v, v) − (f, v)_N` with natural boundary conditions, written
/// as `½‖J(v) − y‖²_W + offset`.
pub fn assemble_energy(p: &EllipticProblem, rule: &QuadratureRule) -> Result<QuadraticObjective> {
    let (blocks, weights, targets, offset) = energy_blocks(p, rule)?;
    let embedding = Embedding::new(p.dim(), blocks)?;
    QuadraticObjective::new(embedding, weights, Embedded { blocks: targets }, offset)
}

/// Normal-derivative trace `∂_ν^k` as embedding terms; orders 0 and 1 only.
fn trace_terms(order: usize, normals: &PointSet) -> Result<Vec<Term>> {
    let d = normals.dim();
    match order {
        0 => Ok(vec![Term::unit(MultiIndex::zero(d))]),
        1 => Ok((0..d)
            .map(|i| {
                let c: Vec<f64> = normals.iter().map(|n| n[i]).collect();
                Term::new(MultiIndex::axis(d, i, 1), Coefficient::PerPoint(Arc::new(c)))
            })
            .collect()),
        k => Err(Error::InvalidArgument(format!("normal-derivative trace of order {k} is not supported"))),
    }
}

/// Penalized energy: the energy plus `δ⁻¹ Σ_{k<m} Σ_j w̃_j (∂_ν^k v(x̃_j))²`.
pub fn assemble_penalized(
    p: &EllipticProblem,
    rule: &QuadratureRule,
    brule: &BoundaryRule,
) -> Result<QuadraticObjective> {
    let BoundaryCondition::DirichletPenalty { delta } = p.boundary else {
        return Err(Error::InvalidArgument("penalized assembly needs a Dirichlet penalty".into()));
    };
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("penalty parameter δ = {delta} must be positive")));
    }
    check_rule_dim(brule.points().dim(), &p.domain)?;
    let (mut blocks, mut weights, mut targets, offset) = energy_blocks(p, rule)?;
    let bpts = brule.shared_points();
    for k in 0..p.order {
        blocks.push(Block::new(format!("trace{k}"), Arc::clone(&bpts), trace_terms(k, brule.normals())?)?);
        weights.push(Arc::new(brule.weights().iter().map(|w| w / delta).collect()));
        targets.push(None);
    }
    let embedding = Embedding::new(p.dim(), blocks)?;
    QuadraticObjective::new(embedding, weights, Embedded { blocks: targets }, offset)
}

/// PINN loss `MSE_f + MSE_bc` as a quadratic objective.
///
/// Interior rows carry weight `2/N_f`, so that `½‖J(v) − y‖²_W` is exactly
/// the mean squared residual; boundary rows carry `2/N_bc` or `2` according
/// to [`BoundaryScaling`].
pub fn assemble_pinn(
    p: &PinnProblem,
    interior: &QuadratureRule,
    boundary: Option<&BoundaryRule>,
) -> Result<QuadraticObjective> {
    if p.operator.is_empty() {
        return Err(Error::InvalidArgument("PINN operator has no terms".into()));
    }
    check_rule_dim(interior.dim(), &p.domain)?;
    if interior.is_empty() {
        return Err(Error::InvalidArgument("PINN loss needs collocation points".into()));
    }
    let d = p.domain.dim();
    let pts = interior.shared_points();
    let mut terms = Vec::with_capacity(p.operator.len());
    for (alpha, coef) in &p.operator {
        if alpha.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: alpha.dim() });
        }
        let c = match coef {
            Field::Const(c) => Coefficient::Const(*c),
            f => Coefficient::PerPoint(Arc::new(f.sample(&pts))),
        };
        terms.push(Term::new(alpha.clone(), c));
    }
    let n_f = interior.len() as f64;
    let mut blocks = vec![Block::new("residual", Arc::clone(&pts), terms)?];
    let mut weights = vec![Arc::new(vec![2.0 / n_f; interior.len()])];
    let f = p.source.sample(&pts);
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric { context: "source term".into(), index: i });
    }
    let mut targets = vec![Some(f)];
    if !p.boundary_traces.is_empty() {
        let brule = match boundary {
            Some(b) if !b.is_empty() => b,
            _ => return Err(Error::InvalidArgument("boundary operator configured but no boundary points".into())),
        };
        check_rule_dim(brule.points().dim(), &p.domain)?;
        let bpts = brule.shared_points();
        let scale = match p.boundary_scaling {
            BoundaryScaling::Mean => 2.0 / brule.len() as f64,
            BoundaryScaling::Sum => 2.0,
        };
        for &k in &p.boundary_traces {
            blocks.push(Block::new(format!("trace{k}"), Arc::clone(&bpts), trace_terms(k, brule.normals())?)?);
            weights.push(Arc::new(vec![scale; brule.len()]));
            targets.push(None);
        }
    }
    let embedding = Embedding::new(d, blocks)?;
    QuadraticObjective::new(embedding, weights, Embedded { blocks: targets }, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::Activation;
    use crate::quadrature::{boundary_rule, gauss_grid, BoxDomain};

    fn interval() -> BoxDomain {
        BoxDomain::new(vec![-1.0], vec![1.0]).unwrap()
    }

    fn problem(source: Field, boundary: BoundaryCondition) -> EllipticProblem {
        EllipticProblem {
            order: 1,
            top: vec![(MultiIndex::axis(1, 0, 1), Field::Const(1.0))],
            zero: Field::Const(1.0),
            source,
            domain: Domain::Box(interval()),
            boundary,
        }
    }

    #[test]
    fn zero_source_gives_zero_target_and_value() {
        let rule = gauss_grid(&interval(), &[4], 2).unwrap();
        let obj = assemble_energy(&problem(Field::Const(0.0), BoundaryCondition::NaturalNeumann), &rule).unwrap();
        assert_eq!(obj.value(&Expansion::new()).unwrap(), 0.0);
        assert!(obj.target().block(0).unwrap().iter().all(|v| *v == 0.0));
        assert!(obj.target().block(1).is_none());
    }

    #[test]
    fn zero_order_target_is_source_over_a0() {
        let rule = gauss_grid(&interval(), &[4], 2).unwrap();
        let obj = assemble_energy(&problem(Field::Const(2.0), BoundaryCondition::NaturalNeumann), &rule).unwrap();
        assert!(obj.target().block(0).unwrap().iter().all(|v| *v == 2.0));
    }

    #[test]
    fn nonpositive_coefficient_is_reported() {
        let rule = gauss_grid(&interval(), &[4], 1).unwrap();
        let mut p = problem(Field::Const(1.0), BoundaryCondition::NaturalNeumann);
        p.zero = Field::from_fn(|x| x[0]);
        let err = assemble_energy(&p, &rule).unwrap_err();
        assert!(matches!(err, Error::CoefficientViolation { index: 0, .. }));
    }

    #[test]
    fn penalized_boundary_block() {
        let rule = gauss_grid(&interval(), &[4], 2).unwrap();
        let brule = boundary_rule(&interval(), 1, 2).unwrap();
        let delta = 0.1 / 256.0;
        let p = problem(Field::Const(1.0), BoundaryCondition::DirichletPenalty { delta });
        let obj = assemble_penalized(&p, &rule, &brule).unwrap();
        let i = obj.block_index("trace0").unwrap();
        assert_eq!(obj.embedding().blocks[i].len(), 2);
        for w in obj.weights()[i].iter() {
            assert!((w - 256.0 / 0.1).abs() < 1e-9);
        }
        let bad = problem(Field::Const(1.0), BoundaryCondition::DirichletPenalty { delta: 0.0 });
        assert!(assemble_penalized(&bad, &rule, &brule).is_err());
    }

    #[test]
    fn penalized_equals_energy_for_vanishing_trace() {
        let rule = gauss_grid(&interval(), &[8], 2).unwrap();
        let brule = boundary_rule(&interval(), 1, 2).unwrap();
        let src = Field::from_fn(|x| (3.0 * x[0]).sin());
        let plain = assemble_energy(&problem(src.clone(), BoundaryCondition::NaturalNeumann), &rule).unwrap();
        let pen =
            assemble_penalized(&problem(src, BoundaryCondition::DirichletPenalty { delta: 1e-3 }), &rule, &brule)
                .unwrap();
        // Vanishes at x = −1 (both inactive) and at x = 1 (2.25 − 9 · 0.25).
        let g1 = RidgeNeuron::new(vec![1.0], 0.5, Activation::ReluPower(2));
        let g2 = RidgeNeuron::new(vec![1.0], -0.5, Activation::ReluPower(2));
        let u = Expansion::from_terms(vec![(1.0, g1), (-9.0, g2)]).unwrap();
        let a = plain.value(&u).unwrap();
        let b = pen.value(&u).unwrap();
        assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
    }

    #[test]
    fn pinn_mse_for_zero_function() {
        let rule = gauss_grid(&interval(), &[50], 1).unwrap();
        let brule = boundary_rule(&interval(), 1, 1).unwrap();
        let p = PinnProblem {
            operator: vec![
                (MultiIndex::axis(1, 0, 2), Field::Const(-1.0)),
                (MultiIndex::zero(1), Field::Const(1.0)),
            ],
            source: Field::from_fn(|x| (std::f64::consts::PI * x[0]).cos()),
            boundary_traces: vec![1],
            boundary_scaling: BoundaryScaling::Sum,
            domain: Domain::Box(interval()),
        };
        let obj = assemble_pinn(&p, &rule, Some(&brule)).unwrap();
        let expected = rule
            .points()
            .iter()
            .map(|x| (std::f64::consts::PI * x[0]).cos().powi(2))
            .sum::<f64>()
            / rule.len() as f64;
        let v = obj.value(&Expansion::new()).unwrap();
        assert!((v - expected).abs() < 1e-14);
        assert!(assemble_pinn(&p, &rule, None).is_err());
    }
}
