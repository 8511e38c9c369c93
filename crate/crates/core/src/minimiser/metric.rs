use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::profile_geometry::{hermite_basis, Grid};
use crate::quadrature::UnitRule;

/// Gram matrix of `int u'' v'' + (1 + eps) u' v' + u v` on the free
/// Hermite degrees of freedom, factored once per grid.
///
/// The solver uses it as the initial inverse-Hessian scaling and measures
/// gradients in the dual norm `sqrt(g^T P^-1 g)`, which does not blow up
/// under mesh refinement the way the Euclidean norm does.
#[derive(Debug, Clone)]
pub struct H2Metric {
    chol: Cholesky<f64, Dyn>,
}

impl H2Metric {
    pub fn new(grid: &Grid, epsilon: f64) -> Self {
        let n = grid.n_elements();
        let m = 2 * n - 1;
        let rule = UnitRule::new(4);
        let stiff = 1.0 + epsilon.max(0.0);
        let mut p = DMatrix::<f64>::zeros(m, m);
        for e in 0..n {
            let h = grid.width(e);
            let idx = [
                (e < n).then_some(e),
                (e >= 1).then(|| n + e - 1),
                (e + 1 < n).then_some(e + 1),
                (e + 1 < n).then(|| n + e),
            ];
            for (&t, &w) in rule.points.iter().zip(&rule.weights) {
                let (nb, db, ddb) = hermite_basis(t, h);
                for a in 0..4 {
                    let Some(i) = idx[a] else { continue };
                    for b in 0..4 {
                        let Some(j) = idx[b] else { continue };
                        p[(i, j)] += w
                            * h
                            * (ddb[a] * ddb[b] + stiff * db[a] * db[b] + nb[a] * nb[b]);
                    }
                }
            }
        }
        let chol = Cholesky::new(p).expect("H2 Gram matrix is positive definite");
        Self { chol }
    }

    /// `P^-1 g`
    pub fn apply_inverse(&self, g: &[f64]) -> Vec<f64> {
        let v = self.chol.solve(&DVector::from_column_slice(g));
        v.as_slice().to_vec()
    }

    pub fn dual_norm(&self, g: &[f64]) -> f64 {
        dot(g, &self.apply_inverse(g)).max(0.0).sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
