use serde::{Deserialize, Serialize};

use super::grid::{Grid, DEFAULT_QUADRATURE_ORDER};
use crate::error::{Error, Result};

/// Cubic Hermite shape functions on an element of width `h` at local
/// coordinate `t`, ordered (u0, u0', u1, u1'). Returns values, first and
/// second derivatives with respect to `x`.
#[inline]
pub fn hermite_basis(t: f64, h: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    let n = [
        2.0 * t3 - 3.0 * t2 + 1.0,
        h * (t3 - 2.0 * t2 + t),
        -2.0 * t3 + 3.0 * t2,
        h * (t3 - t2),
    ];
    let d = [
        (6.0 * t2 - 6.0 * t) / h,
        3.0 * t2 - 4.0 * t + 1.0,
        (-6.0 * t2 + 6.0 * t) / h,
        3.0 * t2 - 2.0 * t,
    ];
    let dd = [
        (12.0 * t - 6.0) / (h * h),
        (6.0 * t - 4.0) / h,
        (-12.0 * t + 6.0) / (h * h),
        (6.0 * t - 2.0) / h,
    ];
    (n, d, dd)
}

/// Even profile on `[-1, 1]` stored as nodal values and slopes on `[0, 1]`.
///
/// Curves built with [`build_profile`] lie in the admissible class: they
/// satisfy `u(1) = alpha`, `u'(1) = 0`, `u'(0) = 0` and `u > 0` at every
/// node. Curves built with [`ProfileCurve::from_samples`] only need positive
/// values; this is how exact catenary and sphere data with nonzero end slope
/// are represented.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    grid: Grid,
    values: Vec<f64>,
    derivatives: Vec<f64>,
    alpha: f64,
}

/// Applies the boundary and symmetry data to `values`/`derivatives` and
/// rejects nonpositive profiles.
pub fn build_profile(
    alpha: f64,
    grid: Grid,
    mut values: Vec<f64>,
    mut derivatives: Vec<f64>,
) -> Result<ProfileCurve> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let n = grid.nodes().len();
    if values.len() != n || derivatives.len() != n {
        return Err(Error::BadGrid(format!(
            "expected {n} nodal values and slopes, got {} and {}",
            values.len(),
            derivatives.len()
        )));
    }
    if values.iter().chain(&derivatives).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("nodal data must be finite".into()));
    }
    values[n - 1] = alpha;
    derivatives[n - 1] = 0.0;
    derivatives[0] = 0.0;
    check_positive(&values)?;
    Ok(ProfileCurve { grid, values, derivatives, alpha })
}

fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().position(|&v| !(v > 0.0)) {
        Some(node) => Err(Error::NonPositiveProfile { node, value: values[node] }),
        None => Ok(()),
    }
}

impl ProfileCurve {
    /// Curve through the given nodal data without imposing boundary slopes.
    /// `alpha` is taken as the value at `x = 1`.
    pub fn from_samples(grid: Grid, values: Vec<f64>, derivatives: Vec<f64>) -> Result<Self> {
        let n = grid.nodes().len();
        if values.len() != n || derivatives.len() != n {
            return Err(Error::BadGrid("nodal data length does not match grid".into()));
        }
        if values.iter().chain(&derivatives).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("nodal data must be finite".into()));
        }
        check_positive(&values)?;
        let alpha = values[n - 1];
        Ok(Self { grid, values, derivatives, alpha })
    }

    /// Samples `f(x) -> (u, u')` at the nodes.
    pub fn sample<F: Fn(f64) -> (f64, f64)>(grid: Grid, f: F) -> Result<Self> {
        let (values, derivatives) = grid.nodes().iter().map(|&x| f(x)).unzip();
        Self::from_samples(grid, values, derivatives)
    }

    /// Like [`ProfileCurve::sample`] but with the admissibility data imposed.
    pub fn sample_admissible<F: Fn(f64) -> (f64, f64)>(
        alpha: f64,
        grid: Grid,
        f: F,
    ) -> Result<Self> {
        let (values, derivatives) = grid.nodes().iter().map(|&x| f(x)).unzip();
        build_profile(alpha, grid, values, derivatives)
    }

    pub fn cylinder(alpha: f64, grid: Grid) -> Result<Self> {
        let n = grid.nodes().len();
        build_profile(alpha, grid, vec![alpha; n], vec![0.0; n])
    }

    /// Exact nodal data of the catenary `c cosh(x / c)`.
    pub fn catenary(c: f64, grid: Grid) -> Result<Self> {
        Self::sample(grid, |x| (c * (x / c).cosh(), (x / c).sinh()))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.derivatives
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// True when the clamped boundary data and evenness condition hold exactly.
    pub fn is_admissible(&self) -> bool {
        let n = self.values.len();
        self.derivatives[0] == 0.0
            && self.derivatives[n - 1] == 0.0
            && self.values[n - 1] == self.alpha
    }

    /// Value, slope and curvature of the interpolant at local coordinate `t`
    /// of `element`.
    #[inline]
    pub fn element_jet(&self, element: usize, t: f64) -> (f64, f64, f64) {
        let h = self.grid.width(element);
        let (u0, m0) = (self.values[element], self.derivatives[element]);
        let (u1, m1) = (self.values[element + 1], self.derivatives[element + 1]);
        // written in terms of u1 - u0 so that nearly flat elements do not
        // lose u'' to cancellation between large nodal values
        let du = u1 - u0;
        let t2 = t * t;
        let u = u0 + du * (3.0 * t2 - 2.0 * t * t2) + h * (m0 * (t * t2 - 2.0 * t2 + t) + m1 * (t * t2 - t2));
        let p = du * (6.0 * t - 6.0 * t2) / h + m0 * (3.0 * t2 - 4.0 * t + 1.0) + m1 * (3.0 * t2 - 2.0 * t);
        let q = (du * (6.0 - 12.0 * t) / h + m0 * (6.0 * t - 4.0) + m1 * (6.0 * t - 2.0)) / h;
        (u, p, q)
    }

    /// Interpolant on the half interval, `y` in `[0, 1]`.
    pub fn eval_half(&self, y: f64) -> (f64, f64, f64) {
        let e = self.grid.element_of(y);
        let x0 = self.grid.nodes()[e];
        self.element_jet(e, (y - x0) / self.grid.width(e))
    }

    /// Interpolant on `[-1, 1]` with even mirroring.
    pub fn eval(&self, x: f64) -> Result<(f64, f64, f64)> {
        if !(x.abs() <= 1.0) {
            return Err(Error::OutOfDomain { x });
        }
        let (u, du, ddu) = self.eval_half(x.abs());
        let du = if x < 0.0 { -du } else { du };
        Ok((u, du, ddu))
    }

    /// Number of free degrees of freedom: values at all nodes but the last,
    /// slopes at the interior nodes.
    pub fn n_free(&self) -> usize {
        2 * self.grid.n_elements() - 1
    }

    /// Free degrees of freedom, values first.
    pub fn free_dofs(&self) -> Vec<f64> {
        let n = self.grid.n_elements();
        let mut out = Vec::with_capacity(2 * n - 1);
        out.extend_from_slice(&self.values[..n]);
        out.extend_from_slice(&self.derivatives[1..n]);
        out
    }

    /// Admissible curve on the same grid with the given free data.
    pub fn with_free_dofs(&self, theta: &[f64]) -> Result<Self> {
        let n = self.grid.n_elements();
        assert_eq!(theta.len(), 2 * n - 1, "free dof vector has wrong length");
        let mut values = self.values.clone();
        let mut derivatives = self.derivatives.clone();
        values[..n].copy_from_slice(&theta[..n]);
        derivatives[1..n].copy_from_slice(&theta[n..]);
        build_profile(self.alpha, self.grid.clone(), values, derivatives)
    }

    /// Position of nodal value / slope `node` in the free vector.
    pub fn value_index(&self, node: usize) -> Option<usize> {
        (node < self.grid.n_elements()).then_some(node)
    }

    pub fn slope_index(&self, node: usize) -> Option<usize> {
        let n = self.grid.n_elements();
        (node >= 1 && node < n).then(|| n + node - 1)
    }

    /// Interpolant of this curve on another grid (nodal values and slopes
    /// are sampled from the current interpolant).
    pub fn resample(&self, grid: Grid) -> Result<Self> {
        let (values, derivatives): (Vec<f64>, Vec<f64>) = grid
            .nodes()
            .iter()
            .map(|&x| {
                let (u, du, _) = self.eval_half(x);
                (u, du)
            })
            .unzip();
        if self.is_admissible() {
            build_profile(self.alpha, grid, values, derivatives)
        } else {
            Self::from_samples(grid, values, derivatives)
        }
    }

    /// Coefficients of the element cubic in the local coordinate `t`.
    pub fn element_poly(&self, element: usize) -> [f64; 4] {
        let h = self.grid.width(element);
        let (u0, m0) = (self.values[element], h * self.derivatives[element]);
        let (u1, m1) = (self.values[element + 1], h * self.derivatives[element + 1]);
        [
            u0,
            m0,
            -3.0 * u0 - 2.0 * m0 + 3.0 * u1 - m1,
            2.0 * u0 + m0 - 2.0 * u1 + m1,
        ]
    }

    /// Zeros of `u'` strictly inside `element`, in local coordinates.
    pub fn slope_zeros(&self, element: usize) -> Vec<f64> {
        let c = self.element_poly(element);
        quadratic_roots(3.0 * c[3], 2.0 * c[2], c[1])
            .into_iter()
            .filter(|&t| t > 0.0 && t < 1.0)
            .collect()
    }

    /// Exact maximum of `|u'|` over the interpolant.
    pub fn max_abs_slope(&self) -> f64 {
        let mut best = 0.0f64;
        for e in 0..self.grid.n_elements() {
            let c = self.element_poly(e);
            let h = self.grid.width(e);
            let slope = |t: f64| (c[1] + 2.0 * c[2] * t + 3.0 * c[3] * t * t) / h;
            best = best.max(slope(0.0).abs()).max(slope(1.0).abs());
            if c[3] != 0.0 {
                let t = -c[2] / (3.0 * c[3]);
                if t > 0.0 && t < 1.0 {
                    best = best.max(slope(t).abs());
                }
            }
        }
        best
    }

    /// Exact minimum and maximum of the interpolant.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for e in 0..self.grid.n_elements() {
            let c = self.element_poly(e);
            let mut ts = vec![0.0, 1.0];
            ts.extend(self.slope_zeros(e));
            for t in ts {
                let v = c[0] + t * (c[1] + t * (c[2] + t * c[3]));
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Real roots of `a t^2 + b t + c`, ascending.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = if q == 0.0 {
        vec![0.0]
    } else {
        vec![q / a, c / q]
    };
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

#[derive(Serialize, Deserialize)]
struct ProfileData {
    alpha: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    derivatives: Vec<f64>,
    #[serde(default = "default_order")]
    quadrature_order: usize,
}

fn default_order() -> usize {
    DEFAULT_QUADRATURE_ORDER
}

impl Serialize for ProfileCurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileData {
            alpha: self.alpha,
            nodes: self.grid.nodes().to_vec(),
            values: self.values.clone(),
            derivatives: self.derivatives.clone(),
            quadrature_order: self.grid.quadrature_order(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProfileCurve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let data = ProfileData::deserialize(d)?;
        let grid = Grid::new(data.nodes, data.quadrature_order).map_err(D::Error::custom)?;
        let n = data.values.len();
        let admissible = n > 0
            && data.values[n - 1] == data.alpha
            && data.derivatives.first() == Some(&0.0)
            && data.derivatives.last() == Some(&0.0);
        let curve = if admissible {
            build_profile(data.alpha, grid, data.values, data.derivatives)
        } else {
            ProfileCurve::from_samples(grid, data.values, data.derivatives)
        };
        curve.map_err(D::Error::custom)
    }
}
