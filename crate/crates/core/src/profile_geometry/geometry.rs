use serde::Serialize;

use super::curve::ProfileCurve;
use crate::error::Result;

/// Pointwise geometry of the surface of revolution generated by a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometrySample {
    pub x: f64,
    pub u: f64,
    pub du: f64,
    pub ddu: f64,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    #[serde(rename = "K")]
    pub gauss_curvature: f64,
    pub area_element: f64,
}

impl GeometrySample {
    pub fn from_jet(x: f64, u: f64, du: f64, ddu: f64) -> Self {
        let s2 = 1.0 + du * du;
        let s = s2.sqrt();
        Self {
            x,
            u,
            du,
            ddu,
            mean_curvature: mean_curvature(u, du, ddu),
            gauss_curvature: -ddu / (u * s2 * s2),
            area_element: u * s,
        }
    }
}

/// `H = (1/(u s) - u''/s^3) / 2` with `s = sqrt(1 + u'^2)`.
#[inline]
pub fn mean_curvature(u: f64, du: f64, ddu: f64) -> f64 {
    let s = (1.0 + du * du).sqrt();
    0.5 * (1.0 / (u * s) - ddu / (s * s * s))
}

pub fn evaluate_geometry(curve: &ProfileCurve, x: f64) -> Result<GeometrySample> {
    let (u, du, ddu) = curve.eval(x)?;
    Ok(GeometrySample::from_jet(x, u, du, ddu))
}

/// Compares the geometry at `x` and `-x`: values and curvatures must agree,
/// slopes must be opposite, all to round-off.
pub fn mirror_consistency_check(curve: &ProfileCurve, x: f64) -> bool {
    let (Ok(a), Ok(b)) = (evaluate_geometry(curve, x), evaluate_geometry(curve, -x)) else {
        return false;
    };
    let close = |p: f64, q: f64| (p - q).abs() <= 4.0 * f64::EPSILON * p.abs().max(q.abs()).max(1.0);
    close(a.u, b.u)
        && close(a.du, -b.du)
        && close(a.mean_curvature, b.mean_curvature)
        && close(a.gauss_curvature, b.gauss_curvature)
}

/// Geometry on `points_per_element` equispaced points per element over
/// `[-1, 1]`, ordered by `x`.
pub fn geometry_table(curve: &ProfileCurve, points_per_element: usize) -> Vec<GeometrySample> {
    let k = points_per_element.max(1);
    let nodes = curve.grid().nodes();
    let mut half = Vec::new();
    for w in nodes.windows(2) {
        for j in 0..k {
            half.push(w[0] + (w[1] - w[0]) * j as f64 / k as f64);
        }
    }
    half.push(1.0);
    let mut xs: Vec<f64> = half.iter().rev().filter(|&&x| x > 0.0).map(|x| -x).collect();
    xs.extend_from_slice(&half);
    xs.into_iter()
        .map(|x| evaluate_geometry(curve, x).expect("sample points lie in [-1, 1]"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::profile_geometry::Grid;

    #[test]
    fn cylinder_curvatures() {
        let c = ProfileCurve::cylinder(2.0, Grid::default()).unwrap();
        for &x in &[-1.0, -0.3, 0.0, 0.37, 1.0] {
            let g = evaluate_geometry(&c, x).unwrap();
            assert_eq!(g.mean_curvature, 0.25);
            assert_eq!(g.gauss_curvature, 0.0);
            assert_eq!(g.area_element, 2.0);
        }
        assert!(mirror_consistency_check(&c, 0.37));
    }

    #[test]
    fn sphere_closed_form_jet() {
        // exact jet of sqrt(c^2 - x^2)
        let c = 2.0_f64;
        for &x in &[0.0, 0.3, 0.9] {
            let u = (c * c - x * x).sqrt();
            let du = -x / u;
            let ddu = -c * c / (u * u * u);
            let g = GeometrySample::from_jet(x, u, du, ddu);
            assert!((g.mean_curvature - 1.0 / c).abs() < 1e-15);
            assert!((g.gauss_curvature - 1.0 / (c * c)).abs() < 1e-15);
        }
    }

    #[test]
    fn catenary_nearly_minimal() {
        let grid = Grid::uniform(256, 5).unwrap();
        let w = ProfileCurve::catenary(1.0, grid).unwrap();
        for k in 0..=40 {
            let x = -1.0 + k as f64 * 0.05;
            let g = evaluate_geometry(&w, x).unwrap();
            assert!(g.mean_curvature.abs() < 1e-4, "H = {} at {x}", g.mean_curvature);
        }
        assert!(mirror_consistency_check(&w, 0.8));
    }

    #[test]
    fn out_of_domain() {
        let c = ProfileCurve::cylinder(1.0, Grid::default()).unwrap();
        assert!(matches!(evaluate_geometry(&c, 1.5), Err(Error::OutOfDomain { .. })));
        assert!(!mirror_consistency_check(&c, 1.5));
    }

    #[test]
    fn table_is_ordered_and_symmetric() {
        let c = ProfileCurve::catenary(1.2, Grid::uniform(4, 5).unwrap()).unwrap();
        let t = geometry_table(&c, 3);
        assert_eq!(t.len(), 2 * 12 + 1);
        assert!(t.windows(2).all(|w| w[0].x < w[1].x));
        assert_eq!(t[0].x, -1.0);
        assert_eq!(t[t.len() - 1].x, 1.0);
    }
}
