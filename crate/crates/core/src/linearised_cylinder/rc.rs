use std::f64::consts::SQRT_2;

use serde::Serialize;

/// Closed-form rate of change `rc_alpha`, the solution of
/// `rc'''' + rc / alpha^4 = -2 / alpha` with clamped ends at `x = +-1`.
///
/// The coefficients multiplying `cosh(beta x)` and `sinh(beta x)` are stored
/// divided by `cosh(beta) sinh(beta)` so that small `alpha` (large `beta`)
/// does not lose digits to cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOfChange {
    alpha: f64,
    beta: f64,
    /// `2 alpha^3 / D` with `D = d_alpha / (cosh beta sinh beta)`.
    scale: f64,
    cb: f64,
    sb: f64,
    /// `exp(-2 beta)` and `-expm1(-2 beta)`
    e2: f64,
    m2: f64,
}

impl RateOfChange {
    pub fn new(alpha: f64) -> Self {
        assert!(alpha > 0.0, "alpha must be positive");
        let beta = 1.0 / (alpha * SQRT_2);
        let (sb, cb) = beta.sin_cos();
        let d_ratio = 1.0 + 2.0 * cb * sb / (2.0 * beta).sinh();
        Self {
            alpha,
            beta,
            scale: 2.0 * alpha.powi(3) / d_ratio,
            cb,
            sb,
            e2: (-2.0 * beta).exp(),
            m2: -(-2.0 * beta).exp_m1(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `a_alpha` as printed in closed form.
    pub fn a_coeff(&self) -> f64 {
        let b = self.beta;
        2.0 * self.alpha.powi(3) / self.d_coeff() * (b.sinh() * self.cb + b.cosh() * self.sb)
    }

    /// `b_alpha` as printed in closed form.
    pub fn b_coeff(&self) -> f64 {
        let b = self.beta;
        -2.0 * self.alpha.powi(3) / self.d_coeff() * (b.sinh() * self.cb - b.cosh() * self.sb)
    }

    /// `d_alpha = sinh(2 beta)/2 + sin(2 beta)/2`.
    pub fn d_coeff(&self) -> f64 {
        0.5 * (2.0 * self.beta).sinh() + 0.5 * (2.0 * self.beta).sin()
    }

    /// `rc`, `rc'`, `rc''`, `rc'''`, `rc''''` at `x`.
    pub fn jet(&self, x: f64) -> [f64; 5] {
        let b = self.beta;
        let ax = x.abs();
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        // ratios of hyperbolic functions at beta x to those at beta
        let g = (b * (ax - 1.0)).exp();
        let ex = (-2.0 * b * ax).exp();
        let mx = -(-2.0 * b * ax).exp_m1();
        let cx_c = g * (1.0 + ex) / (1.0 + self.e2);
        let cx_s = g * (1.0 + ex) / self.m2;
        let sx_c = sign * g * mx / (1.0 + self.e2);
        let sx_s = sign * g * mx / self.m2;
        let k = self.scale;
        let a_c = k * (self.cb * cx_c + self.sb * cx_s);
        let a_s = k * (self.cb * sx_c + self.sb * sx_s);
        let b_c = -k * (self.cb * cx_c - self.sb * cx_s);
        let b_s = -k * (self.cb * sx_c - self.sb * sx_s);
        let (s, c) = (b * x).sin_cos();
        let b2 = b * b;
        let rc = -2.0 * self.alpha.powi(3) + a_c * c + b_s * s;
        let d1 = b * (a_s * c - a_c * s + b_c * s + b_s * c);
        let d2 = 2.0 * b2 * (b_c * c - a_s * s);
        let d3 = 2.0 * b2 * b * (b_s * c - b_c * s - a_c * s - a_s * c);
        let d4 = -4.0 * b2 * b2 * (a_c * c + b_s * s);
        [rc, d1, d2, d3, d4]
    }

    /// `|rc'''' + rc / alpha^4 + 2 / alpha|` at `x`.
    pub fn ode_residual(&self, x: f64) -> f64 {
        let j = self.jet(x);
        (j[4] + j[0] / self.alpha.powi(4) + 2.0 / self.alpha).abs()
    }
}

/// `rc_alpha` and its first four derivatives at `x`.
pub fn rc_closed_form(alpha: f64, x: f64) -> [f64; 5] {
    RateOfChange::new(alpha).jet(x)
}

/// Maximum ODE residual over 2000 uniform points of `[-1, 1]`.
pub fn rc_bvp_residual(alpha: f64) -> f64 {
    let rc = RateOfChange::new(alpha);
    let n = 2000;
    (0..n)
        .map(|i| rc.ode_residual(-1.0 + 2.0 * i as f64 / (n - 1) as f64))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RcProfile {
    pub alpha: f64,
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub d_coeff: f64,
    /// `(x, rc, rc')`
    pub samples: Vec<(f64, f64, f64)>,
    pub bvp_residual: f64,
}

pub fn rc_profile(alpha: f64, n_samples: usize) -> RcProfile {
    let rc = RateOfChange::new(alpha);
    let n = n_samples.max(2);
    let samples = (0..n)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let j = rc.jet(x);
            (x, j[0], j[1])
        })
        .collect();
    RcProfile {
        alpha,
        a_coeff: rc.a_coeff(),
        b_coeff: rc.b_coeff(),
        d_coeff: rc.d_coeff(),
        samples,
        bvp_residual: rc_bvp_residual(alpha),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum RcVerdict {
    Monotone,
    /// Approximate locations in `(0, 1)` where `rc'` changes sign; `0` marks
    /// a sign change at the origin (`rc''(0) < 0`).
    Oscillatory { sign_changes: Vec<f64> },
}

impl RcVerdict {
    pub fn is_monotone(&self) -> bool {
        matches!(self, RcVerdict::Monotone)
    }
}

fn verdict_on(rc: &RateOfChange, n: usize) -> RcVerdict {
    let mut changes = Vec::new();
    // rc'(0) = 0, so the sign just right of the origin is that of rc''(0)
    let mut prev = rc.jet(0.0)[2];
    if prev < 0.0 {
        changes.push(0.0);
    }
    let mut negative = prev < 0.0;
    for i in 1..=n {
        let x = i as f64 / (n + 1) as f64;
        let d = rc.jet(x)[1];
        if d <= 0.0 {
            negative = true;
        }
        if (d <= 0.0) != (prev <= 0.0) && i > 1 {
            changes.push(x);
        }
        prev = d;
    }
    if negative {
        RcVerdict::Oscillatory { sign_changes: changes }
    } else {
        RcVerdict::Monotone
    }
}

/// Whether `rc'` is positive on `(0, 1)`. Sampling starts with 5000 points
/// and doubles until two successive refinements agree.
pub fn rc_monotonicity_verdict(alpha: f64) -> RcVerdict {
    let rc = RateOfChange::new(alpha);
    let mut n = 5000;
    let mut last = verdict_on(&rc, n);
    let mut stable = 0;
    while stable < 2 && n < 5000 << 6 {
        n *= 2;
        let v = verdict_on(&rc, n);
        if v.is_monotone() == last.is_monotone() {
            stable += 1;
        } else {
            stable = 0;
        }
        last = v;
    }
    last
}

/// `phi_1..phi_4 = (C c, S s, C s, S c)` at argument `x / (alpha sqrt 2)`.
pub fn fundamental_system(alpha: f64, x: f64) -> [f64; 4] {
    let z = x / (alpha * SQRT_2);
    let (s, c) = z.sin_cos();
    let (sh, ch) = (z.sinh(), z.cosh());
    [ch * c, sh * s, ch * s, sh * c]
}

/// `2 (y^3/3! + y^7/7! + ...) = sinh y - sin y`, summed directly for small `y`.
fn sinh_minus_sin(y: f64) -> f64 {
    if y.abs() > 1.0 {
        return y.sinh() - y.sin();
    }
    let y4 = y.powi(4);
    let mut term = y.powi(3) / 6.0;
    let mut sum = 0.0f64;
    let mut k = 3.0;
    while term.abs() > 1e-18 * sum.abs() || sum == 0.0 {
        sum += term;
        term *= y4 / ((k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0));
        k += 4.0;
        if term == 0.0 {
            break;
        }
    }
    2.0 * sum
}

/// `det M = -4 sinh^2 b cosh^2 b + 4 sin^2 b cos^2 b`, factored as
/// `-(sinh 2b - sin 2b)(sinh 2b + sin 2b)` to keep relative accuracy for small `b`.
pub fn boundary_determinant(beta: f64) -> f64 {
    let y = 2.0 * beta;
    -sinh_minus_sin(y) * (y.sinh() + y.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: solve the 4x4 clamped boundary system for the
    /// coefficients of `-2 alpha^3 + sum b_j phi_j`.
    fn oracle_rc(alpha: f64, x: f64) -> f64 {
        let h = 1e-6;
        let phi = |t: f64| fundamental_system(alpha, t);
        let dphi = |t: f64| {
            let (p, m) = (phi(t + h), phi(t - h));
            [0, 1, 2, 3].map(|j| (p[j] - m[j]) / (2.0 * h))
        };
        let (p1, pm1, d1, dm1) = (phi(1.0), phi(-1.0), dphi(1.0), dphi(-1.0));
        let rows = [p1, pm1, d1, dm1];
        let rhs = [2.0 * alpha.powi(3), 2.0 * alpha.powi(3), 0.0, 0.0];
        let m = nalgebra::Matrix4::from_fn(|i, j| rows[i][j]);
        let b = nalgebra::Vector4::from_row_slice(&rhs);
        let coef = m.lu().solve(&b).unwrap();
        let p = phi(x);
        -2.0 * alpha.powi(3) + (0..4).map(|j| coef[j] * p[j]).sum::<f64>()
    }

    #[test]
    fn matches_linear_system_oracle() {
        for &alpha in &[0.3, 0.5, 1.0, 2.0] {
            for &x in &[-0.9, -0.2, 0.0, 0.4, 0.77] {
                let a = rc_closed_form(alpha, x)[0];
                let b = oracle_rc(alpha, x);
                assert!((a - b).abs() < 1e-7 * alpha.powi(3), "alpha {alpha} x {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn printed_coefficients_agree_with_stable_form() {
        for &alpha in &[0.2, 1.0, 3.0] {
            let rc = RateOfChange::new(alpha);
            let b = rc.beta();
            for &x in &[0.0, 0.3, -0.8] {
                let (s, c) = (b * x).sin_cos();
                let naive = -2.0 * alpha.powi(3)
                    + rc.a_coeff() * (b * x).cosh() * c
                    + rc.b_coeff() * (b * x).sinh() * s;
                assert!((naive - rc.jet(x)[0]).abs() < 1e-12);
            }
            assert!((rc.jet(0.0)[0] - (-2.0 * alpha.powi(3) + rc.a_coeff())).abs() < 1e-12);
            assert!(rc.d_coeff() > 0.0);
            let d = 0.5 * (SQRT_2 / alpha).sinh() + 0.5 * (SQRT_2 / alpha).sin();
            assert!((rc.d_coeff() - d).abs() < 1e-12 * d);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let rc = RateOfChange::new(0.7);
        let h = 1e-5;
        for &x in &[-0.6, 0.1, 0.5] {
            let (jp, jm, j) = (rc.jet(x + h), rc.jet(x - h), rc.jet(x));
            for k in 0..4 {
                let fd = (jp[k] - jm[k]) / (2.0 * h);
                assert!((fd - j[k + 1]).abs() < 1e-6 * j[k + 1].abs().max(1.0), "order {k}");
            }
        }
    }

    #[test]
    fn boundary_conditions_and_symmetry() {
        for &alpha in &[0.05, 0.1, 0.5, 1.0, 10.0] {
            let rc = RateOfChange::new(alpha);
            for x in [-1.0, 1.0] {
                let j = rc.jet(x);
                assert!(j[0].abs() < 1e-13 * alpha.powi(3).max(1.0), "alpha {alpha}: {}", j[0]);
                assert!(j[1].abs() < 1e-12 * alpha.powi(2).max(1.0), "alpha {alpha}: {}", j[1]);
            }
            for &x in &[0.13, 0.5, 0.99] {
                assert_eq!(rc.jet(x)[0], rc.jet(-x)[0]);
                assert_eq!(rc.jet(x)[1], -rc.jet(-x)[1]);
            }
        }
    }

    #[test]
    fn ode_residuals() {
        assert!(rc_bvp_residual(1.0) <= 1e-9 * 2.0);
        assert!(rc_bvp_residual(0.1) <= 1e-6 * 20.0);
        assert!(rc_bvp_residual(10.0) <= 1e-9 * 0.2);
        assert!(rc_bvp_residual(0.05) <= 1e-6 * 40.0);
    }

    #[test]
    fn negative_inside() {
        for &alpha in &[0.1, 0.17, 0.19, 0.5, 1.0, 2.0] {
            let rc = RateOfChange::new(alpha);
            for i in 1..=1000 {
                let x = -1.0 + 2.0 * i as f64 / 1001.0;
                assert!(rc.jet(x)[0] < 0.0, "alpha {alpha} x {x}");
            }
        }
    }

    #[test]
    fn verdicts() {
        assert!(rc_monotonicity_verdict(0.19).is_monotone());
        assert!(rc_monotonicity_verdict(1.0).is_monotone());
        assert!(rc_monotonicity_verdict(0.5).is_monotone());
        assert!(!rc_monotonicity_verdict(0.17).is_monotone());
        assert!(!rc_monotonicity_verdict(0.10).is_monotone());
        let flags: Vec<bool> = [0.17, 0.175, 0.18, 0.185, 0.19]
            .iter()
            .map(|&a| rc_monotonicity_verdict(a).is_monotone())
            .collect();
        assert_eq!(flags, vec![false, false, false, true, true]);
    }

    #[test]
    fn fundamental_system_solves_ode() {
        assert_eq!(fundamental_system(1.0, 0.0), [1.0, 0.0, 0.0, 0.0]);
        let alpha = 1.0;
        let h = 1e-2;
        let x = 0.5;
        // sixth-order central stencil for the fourth derivative
        let c = [-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0];
        for j in 0..4 {
            let d4: f64 = (0..7)
                .map(|k| c[k] * fundamental_system(alpha, x + (k as f64 - 3.0) * h)[j])
                .sum::<f64>()
                / h.powi(4);
            let target = -fundamental_system(alpha, x)[j] / alpha.powi(4);
            assert!((d4 - target).abs() <= 1e-6 * target.abs().max(1.0), "phi_{} {d4} {target}", j + 1);
        }
    }

    fn determinant_oracle(beta: f64) -> f64 {
        // boundary matrix of (phi_j(1), phi_j(-1), phi_j'(1), phi_j'(-1)) in units of beta
        let (s, c) = beta.sin_cos();
        let (sh, ch) = (beta.sinh(), beta.cosh());
        let phi = [ch * c, sh * s, ch * s, sh * c];
        let parity = [1.0, 1.0, -1.0, -1.0];
        let dphi = [sh * c - ch * s, ch * s + sh * c, sh * s + ch * c, ch * c - sh * s];
        let m = nalgebra::Matrix4::from_fn(|i, j| match i {
            0 => phi[j],
            1 => parity[j] * phi[j],
            2 => dphi[j],
            _ => -parity[j] * dphi[j],
        });
        m.determinant()
    }

    #[test]
    fn determinant_values() {
        let d = boundary_determinant(1.0);
        let direct = -4.0 * (1f64.sinh() * 1f64.cosh()).powi(2) + 4.0 * (1f64.sin() * 1f64.cos()).powi(2);
        assert!((d - direct).abs() < 1e-13 * direct.abs());
        assert!((d + 12.33).abs() < 0.01);
        let small = boundary_determinant(0.01);
        assert!(small < 0.0 && (small / (-32.0 / 3.0 * 1e-8) - 1.0).abs() < 1e-3);
        for &b in &[0.3, 1.0, 2.5] {
            let o = determinant_oracle(b);
            assert!((o.abs() - d_abs(b)).abs() < 1e-9 * o.abs(), "beta {b}: {o}");
        }
        fn d_abs(b: f64) -> f64 {
            boundary_determinant(b).abs()
        }
    }
}
