//! Hyperspherical coordinates `θ ∈ R^{d−1} ↦ ω ∈ S^{d−1}`.
//!
//! `ω_i = sin θ_0 ⋯ sin θ_{i−1} cos θ_i` for `i < d − 1` and
//! `ω_{d−1} = sin θ_0 ⋯ sin θ_{d−2}`; in 2-D this is `(cos θ, sin θ)`.

#[derive(Clone, Copy, PartialEq, Eq)]
enum Factor {
    One,
    Sin,
    Cos,
}

fn factor(i: usize, l: usize, d: usize) -> Factor {
    if l < i {
        Factor::Sin
    } else if l == i && i < d - 1 {
        Factor::Cos
    } else {
        Factor::One
    }
}

/// `order`-th derivative of a factor at `theta`.
fn factor_value(f: Factor, theta: f64, order: usize) -> f64 {
    match (f, order % 4) {
        (Factor::One, 0) => 1.0,
        (Factor::One, _) => 0.0,
        (Factor::Sin, 0) => theta.sin(),
        (Factor::Sin, 1) => theta.cos(),
        (Factor::Sin, 2) => -theta.sin(),
        (Factor::Sin, _) => -theta.cos(),
        (Factor::Cos, 0) => theta.cos(),
        (Factor::Cos, 1) => -theta.sin(),
        (Factor::Cos, 2) => -theta.cos(),
        (Factor::Cos, _) => theta.sin(),
    }
}

pub fn direction(theta: &[f64]) -> Vec<f64> {
    let d = theta.len() + 1;
    (0..d)
        .map(|i| (0..d - 1).map(|l| factor_value(factor(i, l, d), theta[l], 0)).product())
        .collect()
}

/// `∂ω_i/∂θ_a`, row-major `d × (d−1)`.
pub fn jacobian(theta: &[f64]) -> Vec<f64> {
    let m = theta.len();
    let d = m + 1;
    let mut out = vec![0.0; d * m];
    for i in 0..d {
        for a in 0..m {
            out[i * m + a] = (0..m)
                .map(|l| factor_value(factor(i, l, d), theta[l], usize::from(l == a)))
                .product();
        }
    }
    out
}

/// `∂²ω_i/∂θ_a∂θ_b`, indexed `[i][a * (d−1) + b]`.
pub fn second_derivatives(theta: &[f64]) -> Vec<Vec<f64>> {
    let m = theta.len();
    let d = m + 1;
    (0..d)
        .map(|i| {
            let mut h = vec![0.0; m * m];
            for a in 0..m {
                for b in 0..m {
                    h[a * m + b] = (0..m)
                        .map(|l| {
                            let order = usize::from(l == a) + usize::from(l == b);
                            factor_value(factor(i, l, d), theta[l], order)
                        })
                        .product();
                }
            }
            h
        })
        .collect()
}

/// Inverse map for a unit vector.
pub fn angles(omega: &[f64]) -> Vec<f64> {
    let d = omega.len();
    if d < 2 {
        return Vec::new();
    }
    let mut theta = vec![0.0; d - 1];
    for l in 0..d - 2 {
        let tail = omega[l + 1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        theta[l] = tail.atan2(omega[l]);
    }
    theta[d - 2] = omega[d - 1].atan2(omega[d - 2]);
    theta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dimensional_is_polar() {
        let w = direction(&[0.3]);
        assert!((w[0] - 0.3f64.cos()).abs() < 1e-15 && (w[1] - 0.3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn round_trip_and_unit_norm() {
        let theta = [0.4, 2.0, -1.1];
        let w = direction(&theta);
        assert!((w.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
        let back = direction(&angles(&w));
        for (a, b) in w.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let theta = [0.7, 1.9, 0.4];
        let m = theta.len();
        let jac = jacobian(&theta);
        let hess = second_derivatives(&theta);
        let h = 1e-6;
        for a in 0..m {
            let mut p = theta;
            let mut q = theta;
            p[a] += h;
            q[a] -= h;
            let (wp, wq) = (direction(&p), direction(&q));
            let (jp, jq) = (jacobian(&p), jacobian(&q));
            for i in 0..=m {
                assert!(((wp[i] - wq[i]) / (2.0 * h) - jac[i * m + a]).abs() < 1e-9);
                for b in 0..m {
                    let fd = (jp[i * m + b] - jq[i * m + b]) / (2.0 * h);
                    assert!((fd - hess[i][a * m + b]).abs() < 1e-8);
                }
            }
        }
    }
}
