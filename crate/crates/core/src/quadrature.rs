//! Gauss-Legendre rules mapped to the unit interval.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn new(order: usize) -> Self {
        let order = NonZeroUsize::new(order.max(1)).unwrap();
        let rule = GaussLegendre::new(order);
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            points: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = b - a;
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(a + h * t))
            .sum::<f64>()
            * h
    }

    /// Composite rule over `panels` equal panels of `[a, b]`.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let rule = UnitRule::new(5);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 1..8 {
            let rule = UnitRule::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
            assert!(rule.points.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn composite_transcendental() {
        let rule = UnitRule::new(6);
        let v = rule.integrate_composite(0.0, 1.0, 8, |x| x.exp());
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }
}
