//! Euler-Lagrange and first-integral checks on a C3 quintic re-fit of the
//! nodal data. The Hermite interpolant used by the optimiser has jumps in
//! `u''`, so `H'` and `(u H' / s)'` are taken from the re-fit instead.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile_geometry::ProfileCurve;

/// Anything that can report `(u, u', u'', u''', u'''')` on `[0, 1]`.
pub trait SmoothProfile {
    fn jet(&self, x: f64) -> [f64; 5];
}

/// `u = alpha`
#[derive(Debug, Clone, Copy)]
pub struct ExactCylinder {
    pub alpha: f64,
}

impl SmoothProfile for ExactCylinder {
    fn jet(&self, _x: f64) -> [f64; 5] {
        [self.alpha, 0.0, 0.0, 0.0, 0.0]
    }
}

/// `u = c cosh(x / c)`
#[derive(Debug, Clone, Copy)]
pub struct ExactCatenary {
    pub c: f64,
}

impl SmoothProfile for ExactCatenary {
    fn jet(&self, x: f64) -> [f64; 5] {
        let c = self.c;
        let (ch, sh) = ((x / c).cosh(), (x / c).sinh());
        [c * ch, sh, ch / c, sh / (c * c), ch / (c * c * c)]
    }
}

/// Piecewise quintic with the curve's nodal values and slopes, `u''` chosen
/// so that `u'''` is continuous. End conditions: `u'''(0) = 0` (evenness) and
/// `u''''` continuous at the last interior node.
#[derive(Debug, Clone)]
pub struct QuinticRefit {
    nodes: Vec<f64>,
    /// per element, coefficients in the local coordinate `t`
    coeffs: Vec<[f64; 6]>,
}

fn element_coeffs(h: f64, u0: f64, m0: f64, k0: f64, u1: f64, m1: f64, k1: f64) -> [f64; 6] {
    let a0 = u0;
    let a1 = h * m0;
    let a2 = 0.5 * h * h * k0;
    let r0 = u1 - a0 - a1 - a2;
    let r1 = h * m1 - a1 - 2.0 * a2;
    let r2 = h * h * k1 - 2.0 * a2;
    [
        a0,
        a1,
        a2,
        10.0 * r0 - 4.0 * r1 + 0.5 * r2,
        -15.0 * r0 + 7.0 * r1 - r2,
        6.0 * r0 - 3.0 * r1 + 0.5 * r2,
    ]
}

impl QuinticRefit {
    pub fn new(curve: &ProfileCurve) -> Result<Self> {
        let grid = curve.grid();
        let n = grid.n_elements();
        if n < 2 {
            return Err(Error::BadGrid("quintic re-fit needs at least two elements".into()));
        }
        let nodes = grid.nodes().to_vec();
        let (u, m) = (curve.values(), curve.derivatives());
        let build = |k: &[f64]| -> Vec<[f64; 6]> {
            (0..n)
                .map(|e| {
                    let h = nodes[e + 1] - nodes[e];
                    element_coeffs(h, u[e], m[e], k[e], u[e + 1], m[e + 1], k[e + 1])
                })
                .collect()
        };
        let conditions = |c: &[[f64; 6]]| -> Vec<f64> {
            let h = |e: usize| nodes[e + 1] - nodes[e];
            let d3 = |e: usize, t: f64| {
                (6.0 * c[e][3] + 24.0 * c[e][4] * t + 60.0 * c[e][5] * t * t) / h(e).powi(3)
            };
            let d4 = |e: usize, t: f64| (24.0 * c[e][4] + 120.0 * c[e][5] * t) / h(e).powi(4);
            let mut out = Vec::with_capacity(n + 1);
            out.push(d3(0, 0.0));
            for i in 1..n {
                out.push(d3(i - 1, 1.0) - d3(i, 0.0));
            }
            out.push(d4(n - 2, 1.0) - d4(n - 1, 0.0));
            out
        };
        // the conditions are affine in the nodal second derivatives
        let zero = vec![0.0; n + 1];
        let base = conditions(&build(&zero));
        let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
        let mut unit = zero.clone();
        for j in 0..=n {
            unit[j] = 1.0;
            let col = conditions(&build(&unit));
            unit[j] = 0.0;
            for i in 0..=n {
                a[(i, j)] = col[i] - base[i];
            }
        }
        let rhs = DVector::from_iterator(n + 1, base.iter().map(|b| -b));
        let k = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::BadGrid("quintic re-fit system is singular".into()))?;
        Ok(Self { coeffs: build(k.as_slice()), nodes })
    }

    fn element_of(&self, y: f64) -> usize {
        let n = self.coeffs.len();
        match self.nodes.binary_search_by(|x| x.total_cmp(&y)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }
}

impl SmoothProfile for QuinticRefit {
    fn jet(&self, x: f64) -> [f64; 5] {
        let e = self.element_of(x);
        let h = self.nodes[e + 1] - self.nodes[e];
        let t = (x - self.nodes[e]) / h;
        let a = &self.coeffs[e];
        let p0 = a[0] + t * (a[1] + t * (a[2] + t * (a[3] + t * (a[4] + t * a[5]))));
        let p1 = a[1] + t * (2.0 * a[2] + t * (3.0 * a[3] + t * (4.0 * a[4] + t * 5.0 * a[5])));
        let p2 = 2.0 * a[2] + t * (6.0 * a[3] + t * (12.0 * a[4] + t * 20.0 * a[5]));
        let p3 = 6.0 * a[3] + t * (24.0 * a[4] + t * 60.0 * a[5]);
        let p4 = 24.0 * a[4] + t * 120.0 * a[5];
        [p0, p1 / h, p2 / (h * h), p3 / (h * h * h), p4 / (h * h * h * h)]
    }
}

/// Second-order jet: value and first two derivatives.
#[derive(Debug, Clone, Copy)]
struct Jet(f64, f64, f64);

impl Jet {
    fn mul(self, o: Jet) -> Jet {
        Jet(self.0 * o.0, self.1 * o.0 + self.0 * o.1, self.2 * o.0 + 2.0 * self.1 * o.1 + self.0 * o.2)
    }
    fn recip(self) -> Jet {
        let v = 1.0 / self.0;
        let d = -self.1 * v * v;
        let dd = (2.0 * self.1 * self.1 / self.0 - self.2) * v * v;
        Jet(v, d, dd)
    }
    fn sqrt(self) -> Jet {
        let v = self.0.sqrt();
        let d = 0.5 * self.1 / v;
        let dd = 0.5 * self.2 / v - 0.25 * self.1 * self.1 / (v * v * v);
        Jet(v, d, dd)
    }
    fn sub(self, o: Jet) -> Jet {
        Jet(self.0 - o.0, self.1 - o.1, self.2 - o.2)
    }
    fn scale(self, k: f64) -> Jet {
        Jet(k * self.0, k * self.1, k * self.2)
    }
}

/// Pointwise quantities entering the Euler-Lagrange equation.
#[derive(Debug, Clone, Copy)]
struct Local {
    u: f64,
    p: f64,
    s: f64,
    q: f64,
    h: Jet,
    /// `(u / s)'`
    u_over_s_d: f64,
}

fn local(j: [f64; 5]) -> Local {
    let [u, p, q, r, w] = j;
    let uj = Jet(u, p, q);
    let pj = Jet(p, q, r);
    let qj = Jet(q, r, w);
    let s2 = pj.mul(pj);
    let s = Jet(1.0 + s2.0, s2.1, s2.2).sqrt();
    let s3 = s.mul(s).mul(s);
    let first = uj.mul(s).recip();
    let second = qj.mul(s3.recip());
    let h = first.sub(second).scale(0.5);
    let u_over_s = uj.mul(s.recip());
    Local { u, p, s: s.0, q, h, u_over_s_d: u_over_s.1 }
}

/// Left-hand side of the Euler-Lagrange equation at `x`.
pub fn el_lhs<S: SmoothProfile + ?Sized>(profile: &S, epsilon: f64, x: f64) -> f64 {
    let l = local(profile.jet(x));
    let (hv, hd, hdd) = (l.h.0, l.h.1, l.h.2);
    // (u H' / s)' = (u/s)' H' + (u/s) H''
    let g_prime = l.u_over_s_d * hd + l.u / l.s * hdd;
    let bracket = l.q / (l.s * l.s * l.s) + 1.0 / (l.u * l.s);
    g_prime / (l.u * l.s) + 0.5 * hv * bracket * bracket - 2.0 * epsilon * hv
}

/// First integral `M[u]` at `x`.
pub fn first_integral_at<S: SmoothProfile + ?Sized>(profile: &S, epsilon: f64, x: f64) -> f64 {
    let l = local(profile.jet(x));
    let (hv, hd) = (l.h.0, l.h.1);
    let s2 = 1.0 + l.p * l.p;
    l.u * l.p * hd / s2 + l.u * hv * hv / l.s - hv / s2 - epsilon * l.u / l.s
}

/// Points per element used by the Euler-Lagrange check.
pub const VALIDATION_POINTS_PER_ELEMENT: usize = 8;

/// Number of trailing elements left out of the validators: the free end
/// condition of the re-fit pollutes them.
const BOUNDARY_BAND: usize = 2;

fn interior_elements(nodes: &[f64]) -> usize {
    (nodes.len() - 1).saturating_sub(BOUNDARY_BAND).max(1)
}

/// Dense sample of the interior `[0, x_{n-2}]`.
pub fn validation_points(nodes: &[f64]) -> Vec<f64> {
    let keep = interior_elements(nodes);
    let mut xs = Vec::with_capacity(keep * VALIDATION_POINTS_PER_ELEMENT + 1);
    for e in 0..keep {
        for k in 0..VALIDATION_POINTS_PER_ELEMENT {
            let t = k as f64 / VALIDATION_POINTS_PER_ELEMENT as f64;
            xs.push(nodes[e] + t * (nodes[e + 1] - nodes[e]));
        }
    }
    xs.push(nodes[keep]);
    xs
}

/// Two-point Gauss points of every interior element. On a discrete
/// minimiser the re-fit's third derivative carries an O(h^2) ripple shaped
/// like the second Legendre polynomial in each element, which vanishes at
/// these points; sampling there measures the drift of the solution rather
/// than the ripple.
pub fn first_integral_points(nodes: &[f64]) -> Vec<f64> {
    let g = 0.5 / 3f64.sqrt();
    nodes[..=interior_elements(nodes)]
        .windows(2)
        .flat_map(|w| {
            let h = w[1] - w[0];
            [w[0] + (0.5 - g) * h, w[0] + (0.5 + g) * h]
        })
        .collect()
}

pub fn el_residual_of<S: SmoothProfile + ?Sized>(profile: &S, epsilon: f64, xs: &[f64]) -> f64 {
    xs.iter()
        .map(|&x| el_lhs(profile, epsilon, x).abs())
        .fold(0.0, f64::max)
}

/// Maximum of `|EL|` over the validation points of a re-fit of `curve`.
pub fn el_residual(curve: &ProfileCurve, epsilon: f64) -> Result<f64> {
    let fit = QuinticRefit::new(curve)?;
    Ok(el_residual_of(&fit, epsilon, &validation_points(curve.grid().nodes())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstIntegral {
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub drift: f64,
    pub mean: f64,
}

pub fn first_integral_of<S: SmoothProfile + ?Sized>(
    profile: &S,
    epsilon: f64,
    xs: &[f64],
) -> FirstIntegral {
    let m: Vec<f64> = xs.iter().map(|&x| first_integral_at(profile, epsilon, x)).collect();
    let lo = m.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = m.iter().sum::<f64>() / m.len() as f64;
    FirstIntegral { x: xs.to_vec(), m, drift: hi - lo, mean }
}

pub fn first_integral(curve: &ProfileCurve, epsilon: f64) -> Result<FirstIntegral> {
    let fit = QuinticRefit::new(curve)?;
    Ok(first_integral_of(&fit, epsilon, &first_integral_points(curve.grid().nodes())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile_geometry::Grid;

    fn dense() -> Vec<f64> {
        (0..=400).map(|i| i as f64 / 400.0).collect()
    }

    #[test]
    fn exact_cylinder() {
        for alpha in [0.5, 1.0, 2.0] {
            let eps = 0.25 / (alpha * alpha);
            let cyl = ExactCylinder { alpha };
            assert!(el_residual_of(&cyl, eps, &dense()) <= 1e-12);
            let fi = first_integral_of(&cyl, 0.7, &dense());
            assert!(fi.drift <= 1e-14);
            assert!((fi.mean - (-0.25 / alpha - 0.7 * alpha)).abs() <= 1e-13);
        }
    }

    #[test]
    fn exact_catenary() {
        for c in [0.9, 1.7] {
            let w = ExactCatenary { c };
            for eps in [0.0, 1.0, 50.0] {
                assert!(el_residual_of(&w, eps, &dense()) <= 1e-12);
                let fi = first_integral_of(&w, eps, &dense());
                assert!(fi.drift <= 1e-10, "{}", fi.drift);
                assert!((fi.mean + eps * c).abs() <= 1e-10 * (1.0 + eps * c));
            }
        }
    }

    #[test]
    fn refit_reproduces_cylinder() {
        let curve = ProfileCurve::cylinder(1.0, Grid::uniform(16, 5).unwrap()).unwrap();
        assert!(el_residual(&curve, 0.25).unwrap() <= 1e-10);
        let fi = first_integral(&curve, 0.25).unwrap();
        assert!(fi.drift <= 1e-12);
    }

    #[test]
    fn refit_converges_on_smooth_data() {
        let f = |x: f64| (1.0 + 0.3 * (3.0 * x).cos(), -0.9 * (3.0 * x).sin());
        let err = |n: usize| {
            let c = ProfileCurve::sample(Grid::uniform(n, 5).unwrap(), f).unwrap();
            let fit = QuinticRefit::new(&c).unwrap();
            (1..40)
                .map(|i| {
                    let x = i as f64 / 50.0;
                    let j = fit.jet(x);
                    let exact = -0.3 * 9.0 * (3.0 * x).cos();
                    (j[2] - exact).abs()
                })
                .fold(0.0, f64::max)
        };
        let (a, b) = (err(16), err(32));
        assert!(b < a / 4.0, "{a} {b}");
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let c = ProfileCurve::sample(Grid::uniform(12, 5).unwrap(), |x| {
            (2.0 + x * x * x * x, 4.0 * x * x * x)
        })
        .unwrap();
        let fit = QuinticRefit::new(&c).unwrap();
        let x = 0.37;
        let d = 1e-5;
        let (jp, jm, j) = (fit.jet(x + d), fit.jet(x - d), fit.jet(x));
        for k in 0..4 {
            let fd = (jp[k] - jm[k]) / (2.0 * d);
            assert!((fd - j[k + 1]).abs() <= 1e-5 * (1.0 + j[k + 1].abs()), "{k}");
        }
    }

    struct Wavy;

    impl SmoothProfile for Wavy {
        fn jet(&self, x: f64) -> [f64; 5] {
            let (c, s) = ((2.0 * x).cos(), (2.0 * x).sin());
            [1.5 + 0.2 * c, -0.4 * s, -0.8 * c, 1.6 * s, 3.2 * c]
        }
    }

    #[test]
    fn first_integral_derivative_is_u_du_times_el() {
        // d/dx M = u u' EL, checked by a fourth-order difference of M
        let eps = 0.6;
        let d = 1e-3;
        for x in [0.2, 0.45, 0.8] {
            let m = |y: f64| first_integral_at(&Wavy, eps, y);
            let fd = (m(x - 2.0 * d) - 8.0 * m(x - d) + 8.0 * m(x + d) - m(x + 2.0 * d)) / (12.0 * d);
            let j = Wavy.jet(x);
            let rhs = j[0] * j[1] * el_lhs(&Wavy, eps, x);
            assert!((fd - rhs).abs() <= 1e-9, "x = {x}: {fd} vs {rhs}");
        }
    }
}
