//! Area, Willmore and Helfrich functionals on discrete profiles, their
//! gradients, the a priori bounds and the comparison constructions.

mod bounds;
mod comparison;
mod functional;
mod regime;

pub use bounds::{bound_suite, BoundCheck, BoundReport};
pub use comparison::{
    build_comparison_surface, comparison_bound, comparison_point, comparison_profile,
    cylinder_energy, gluing_function, ComparisonSurface,
};
pub use functional::{
    area, helfrich, helfrich_gradient, helfrich_value, report_from_parts, willmore,
    willmore_identity_check, EnergyReport, IdentityCheck,
};
#[cfg(test)]
use functional::area_and_willmore;
pub use regime::{
    classify_regime, comparison_threshold, cylinder_weight, RegimeLabel, REGIME_CSV_HEADER,
};

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::classical_solutions::{catenary_area, ConstantsTable};
    use crate::profile_geometry::{Grid, ProfileCurve};

    fn random_curve(rng: &mut ChaCha8Rng, alpha: f64, grid: Grid) -> ProfileCurve {
        let modes: Vec<f64> = (1..=4).map(|_| rng.random_range(-0.08..0.08) * alpha).collect();
        ProfileCurve::sample_admissible(alpha, grid, |x| {
            let mut u = alpha;
            let mut du = 0.0;
            for (k, c) in modes.iter().enumerate() {
                let w = (k + 1) as f64 * PI;
                u += c * ((w * x).cos() - (w).cos());
                du -= c * w * (w * x).sin();
            }
            (u, du)
        })
        .unwrap()
    }

    #[test]
    fn cylinder_energies() {
        let c = ProfileCurve::cylinder(1.0, Grid::default()).unwrap();
        let r = helfrich(&c, 0.0);
        assert!((r.area - 4.0 * PI).abs() < 1e-13);
        assert!((r.willmore - PI).abs() < 1e-13);
        assert!(r.product_bound_slack.abs() < 1e-12);
        let r = helfrich(&c, 0.25);
        assert!((r.helfrich - 2.0 * PI).abs() < 1e-13);
        assert_eq!(r.helfrich, r.willmore + r.epsilon * r.area);
        for &(a, e) in &[(0.3, 2.0), (2.5, 0.01), (7.0, 11.0)] {
            let c = ProfileCurve::cylinder(a, Grid::default()).unwrap();
            let h = helfrich(&c, e).helfrich;
            assert!((h - cylinder_energy(a, e)).abs() <= 1e-12 * h);
        }
    }

    #[test]
    fn catenary_area_matches_closed_form() {
        for &c in &[0.5, 1.0, 2.0, 5.0] {
            let w = ProfileCurve::catenary(c, Grid::default()).unwrap();
            let exact = catenary_area(c);
            assert!((area(&w) - exact).abs() <= 1e-10 * exact, "c = {c}");
            assert!(willmore(&w) < 1e-8, "c = {c}: W = {}", willmore(&w));
        }
        assert!((catenary_area(1.0) - 17.6773).abs() < 1e-4);
    }

    #[test]
    fn catenary_area_converges_with_refinement() {
        let c = 0.5;
        let exact = catenary_area(c);
        let err = |n| (area(&ProfileCurve::catenary(c, Grid::uniform(n, 5).unwrap()).unwrap()) - exact).abs();
        let (e1, e2) = (err(4), err(8));
        assert!(e2 < e1 / 12.0, "{e1} -> {e2}");
    }

    #[test]
    fn sphere_willmore() {
        let c = 2.0f64;
        let curve = ProfileCurve::sample(Grid::default(), |x| {
            let u = (c * c - x * x).sqrt();
            (u, -x / u)
        })
        .unwrap();
        assert!((willmore(&curve) - 2.0 * PI).abs() < 1e-6);
        // independent oracle: zone area over c^2
        let zone = 2.0 * PI * c * 2.0;
        assert!((area(&curve) - zone).abs() < 1e-6);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let alpha = rng.random_range(0.5..3.0);
            let eps = rng.random_range(0.0..2.0);
            let curve = random_curve(&mut rng, alpha, Grid::uniform(16, 5).unwrap());
            let g = helfrich_gradient(&curve, eps);
            let theta = curve.free_dofs();
            let mut dir: Vec<f64> = (0..theta.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            dir.iter_mut().for_each(|d| *d /= norm);
            let step = 1e-5;
            let shifted = |s: f64| {
                let t: Vec<f64> = theta.iter().zip(&dir).map(|(a, d)| a + s * d).collect();
                helfrich_value(&curve.with_free_dofs(&t).unwrap(), eps)
            };
            // fourth-order central stencil
            let fd = (8.0 * (shifted(step) - shifted(-step)) - (shifted(2.0 * step) - shifted(-2.0 * step)))
                / (12.0 * step);
            let an: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "trial {trial}: {fd} vs {an}");
        }
    }

    #[test]
    fn helfrich_cylinder_is_discretely_stationary() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let c = ProfileCurve::cylinder(alpha, Grid::default()).unwrap();
            let g = helfrich_gradient(&c, cylinder_weight(alpha));
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm <= 1e-8, "alpha = {alpha}: {norm}");
        }
    }

    #[test]
    fn catenary_gradient_vanishes_under_refinement() {
        // Euclidean norm of the discrete gradient at interpolated catenary data;
        // round-off in u'' grows like h^-2, so compare moderate grids only
        let norm = |n: usize| {
            let w = ProfileCurve::catenary(1.2, Grid::uniform(n, 5).unwrap()).unwrap();
            helfrich_gradient(&w, 0.0).iter().map(|x| x * x).sum::<f64>().sqrt()
        };
        let (coarse, fine) = (norm(32), norm(128));
        assert!(fine < coarse / 8.0, "{coarse} -> {fine}");
        assert!(fine < 1e-5);
    }

    #[test]
    fn identity_chain() {
        let c = ProfileCurve::cylinder(2.0, Grid::default()).unwrap();
        let r = willmore_identity_check(&c, -1.0, 1.0);
        for v in [r.first, r.second, r.third] {
            assert!((v - 1.0).abs() < 1e-13);
        }
        let w = ProfileCurve::catenary(1.0, Grid::default()).unwrap();
        let r = willmore_identity_check(&w, -1.0, 1.0);
        assert!(r.first.abs() < 1e-8);
        assert!((r.third + 4.0 * r.boundary - 4.0 * r.boundary).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = random_curve(&mut rng, 1.3, Grid::default());
            let r = willmore_identity_check(&u, -1.0, 1.0);
            assert!(r.boundary == 0.0);
            assert!((r.first - r.second).abs() <= 1e-8 * r.first);
            assert!((r.first - r.third).abs() <= 1e-8 * r.first);
            let inner = willmore_identity_check(&u, -0.37, 0.81);
            assert!((inner.first - inner.second).abs() <= 1e-8 * inner.first.abs().max(1.0));
            assert!((inner.first - inner.third).abs() <= 1e-8 * inner.first.abs().max(1.0));
        }
    }

    #[test]
    fn bounds_on_cylinder_and_catenary() {
        let c = ProfileCurve::cylinder(1.0, Grid::default()).unwrap();
        let b = bound_suite(&c, 0.25);
        assert!(b.all_satisfied());
        let g = b.gradient.unwrap();
        assert_eq!(g.lhs, 0.0);
        assert!((g.rhs - PI / (15.0 * PI * PI).sqrt()).abs() < 1e-14);
        let w = ProfileCurve::catenary(1.0, Grid::default()).unwrap();
        let b = bound_suite(&w, 0.0);
        assert!(b.gradient.is_none() && b.product.is_none());
        assert!((w.max_abs_slope() - 1f64.sinh()).abs() < 1e-8);
    }

    #[test]
    fn bounds_on_random_curves() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let alpha = rng.random_range(0.3..4.0);
            let u = random_curve(&mut rng, alpha, Grid::uniform(32, 5).unwrap());
            let b = bound_suite(&u, rng.random_range(0.0..3.0));
            assert!(b.all_satisfied(), "{b:?}");
        }
    }

    #[test]
    fn comparison_surface_at_one() {
        let s = build_comparison_surface(1.0, &Grid::default()).unwrap();
        assert!((s.x0 - 0.535).abs() < 5e-3, "x0 = {}", s.x0);
        assert!(gluing_function(1.0, s.x0).abs() < 1e-14);
        let r = (s.x0 * s.x0 + ((s.x0 - 1.0).cosh()).powi(2)).sqrt();
        assert!((s.r - r).abs() < 1e-15);
        assert!(s.gluing_defect() < 1e-12);
        assert!(s.profile.is_admissible());
    }

    #[test]
    fn comparison_energy_below_bound() {
        for &alpha in &[0.1, 0.3, 1.0, 2.0, 5.0] {
            let s = build_comparison_surface(alpha, &Grid::uniform(128, 5).unwrap()).unwrap();
            assert!(s.r <= (1.0 + alpha * alpha).sqrt());
            let (a, w) = area_and_willmore(&s.profile);
            assert!((w - s.willmore_exact()).abs() < 1e-5 * s.willmore_exact(), "alpha {alpha}");
            assert!((a - s.area_exact()).abs() < 1e-8 * s.area_exact(), "alpha {alpha}");
            for &eps in &[0.0, 0.1, 1.0, 10.0] {
                let h = helfrich_value(&s.profile, eps);
                assert!(h < comparison_bound(alpha, eps), "alpha {alpha} eps {eps}");
            }
        }
    }

    #[test]
    fn regime_examples() {
        let k = ConstantsTable::shared();
        let r = classify_regime(1.0, 0.5, k);
        assert!(r.via_cylinder && !r.via_gluing);
        let r = classify_regime(2.0, 1.0, k);
        assert!(r.via_gluing);
        assert!(classify_regime(1.0, 0.25, k).on_cylinder_curve);
        assert!(!classify_regime(1.0, 0.26, k).on_cylinder_curve);
        assert!(!classify_regime(0.2, 0.1, k).via_cylinder);
        assert!(classify_regime(0.2, 0.0, k).via_comparison);
    }
}
