//! Energy-non-increasing surgery on admissible profiles for `alpha >= alpha_m`:
//! attaching a catenary arc in the middle, and flattening dips into cylinders.

use serde::Serialize;

use crate::classical_solutions::{catenary, solve_catenary_branches, ConstantsTable};
use crate::energetics::helfrich_value;
use crate::error::{Error, Result};
use crate::profile_geometry::{build_profile, ProfileCurve};

const SCAN_PER_ELEMENT: usize = 32;

/// Relative energy slack allowed for a repair, absorbing quadrature changes
/// from the inserted nodes.
pub const GLUING_ENERGY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatenaryGluing {
    pub profile: ProfileCurve,
    pub x0: f64,
    pub x1: f64,
    pub c_hat: f64,
    pub energy_before: f64,
    pub energy_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderInsertion {
    pub profile: ProfileCurve,
    pub passes: usize,
    /// energy before the first pass and after each pass
    pub energies: Vec<f64>,
}

fn scan_points(curve: &ProfileCurve, from: f64) -> Vec<f64> {
    let nodes = curve.grid().nodes();
    let mut xs = vec![from];
    for w in nodes.windows(2) {
        for k in 0..SCAN_PER_ELEMENT {
            let x = w[0] + (w[1] - w[0]) * k as f64 / SCAN_PER_ELEMENT as f64;
            if x > from {
                xs.push(x);
            }
        }
    }
    xs.push(1.0);
    xs
}

fn bisect_sign<F: Fn(f64) -> f64>(f: F, mut neg: f64, mut pos: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (neg + pos);
        if mid == neg || mid == pos {
            break;
        }
        if f(mid) <= 0.0 {
            neg = mid;
        } else {
            pos = mid;
        }
    }
    0.5 * (neg + pos)
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha < ConstantsTable::shared().alpham {
        return Err(Error::NotApplicable("gluing needs alpha >= alpha_m"));
    }
    Ok(solve_catenary_branches(alpha)?.c1)
}

/// Largest `x0 < 1` with `u'(x0) >= v_alpha'(x0)`; `None` if the slope
/// bound holds on all of `(0, 1]`.
pub fn slope_bound_point(curve: &ProfileCurve, c_alpha: f64) -> Option<f64> {
    let gap = |x: f64| (x / c_alpha).sinh() - curve.eval_half(x).1;
    let xs = scan_points(curve, 0.0);
    let mut prev = 1.0;
    for &x in xs.iter().rev().skip(1) {
        if x <= 0.0 {
            break;
        }
        if gap(x) <= 0.0 {
            return Some(bisect_sign(gap, x, prev));
        }
        prev = x;
    }
    None
}

/// Minimum of `w_c - u` on `[x0, 1]` and where it is attained.
fn catenary_clearance(curve: &ProfileCurve, c: f64, xs: &[f64]) -> (f64, f64) {
    let diff = |x: f64| catenary(c, x).0 - curve.eval_half(x).0;
    let slope = |x: f64| catenary(c, x).1 - curve.eval_half(x).1;
    let (mut best, mut arg) = (f64::INFINITY, 0);
    for (i, &x) in xs.iter().enumerate() {
        let d = diff(x);
        if d < best {
            best = d;
            arg = i;
        }
    }
    let mut x_min = xs[arg];
    // refine on the derivative inside the neighbouring samples
    if arg > 0 && slope(xs[arg - 1]) < 0.0 && slope(x_min) >= 0.0 {
        x_min = bisect_sign(slope, xs[arg - 1], x_min);
    } else if arg + 1 < xs.len() && slope(x_min) < 0.0 && slope(xs[arg + 1]) >= 0.0 {
        x_min = bisect_sign(slope, x_min, xs[arg + 1]);
    }
    let refined = diff(x_min);
    if refined < best {
        (refined, x_min)
    } else {
        (best, xs[arg])
    }
}

/// Replaces the middle of `curve` by the catenary `w_c_hat` touching it
/// from above, so that the result obeys `v' < v_alpha'` on `(0, 1]`.
pub fn catenary_gluing(curve: &ProfileCurve, epsilon: f64) -> Result<CatenaryGluing> {
    if !curve.is_admissible() {
        return Err(Error::InvalidInput("gluing needs an admissible profile".into()));
    }
    let alpha = curve.alpha();
    let c_alpha = check_alpha(alpha)?;
    let Some(x0) = slope_bound_point(curve, c_alpha) else {
        return Err(Error::NotApplicable("slope bound already holds (x0 = 0)"));
    };
    let xs = scan_points(curve, x0);
    let clear = |c: f64| catenary_clearance(curve, c, &xs).0;
    let mut lo = c_alpha;
    let mut hi = c_alpha * 1.1;
    while clear(hi) <= 0.0 {
        lo = hi;
        hi *= 1.1;
        if hi > 1e6 * c_alpha {
            return Err(Error::NotApplicable("no catenary clears the profile"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if clear(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c_hat = hi;
    let (_, x1) = catenary_clearance(curve, c_hat, &xs);

    let grid = curve.grid().with_nodes(&[x1], 1e-9)?;
    let k1 = grid.node_index(x1, 1e-9).unwrap_or(0);
    let (values, derivatives): (Vec<f64>, Vec<f64>) = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if i <= k1 {
                catenary(c_hat, x)
            } else {
                let (u, du, _) = curve.eval_half(x);
                (u, du)
            }
        })
        .unzip();
    let profile = build_profile(alpha, grid, values, derivatives)?;
    Ok(CatenaryGluing {
        energy_before: helfrich_value(curve, epsilon),
        energy_after: helfrich_value(&profile, epsilon),
        profile,
        x0,
        x1,
        c_hat,
    })
}

/// Catenary gluing returning just the profile. Falls back to the input if
/// discretisation error would make the glued profile more expensive.
pub fn glue_catenary(curve: &ProfileCurve, epsilon: f64) -> Result<ProfileCurve> {
    let g = catenary_gluing(curve, epsilon)?;
    if g.energy_after <= g.energy_before * (1.0 + GLUING_ENERGY_SLACK) {
        Ok(g.profile)
    } else {
        Ok(curve.clone())
    }
}

/// Zeros of `u'` in `(0, 1)` together with the endpoints, ascending.
fn critical_points(curve: &ProfileCurve) -> Vec<f64> {
    let grid = curve.grid();
    let nodes = grid.nodes();
    let mut zs = vec![0.0];
    for e in 0..grid.n_elements() {
        if e > 0 && curve.derivatives()[e] == 0.0 {
            zs.push(nodes[e]);
        }
        // zeros hugging a node are round-off images of the node itself
        for t in curve.slope_zeros(e).into_iter().filter(|t| *t > 1e-10 && *t < 1.0 - 1e-10) {
            zs.push(nodes[e] + t * grid.width(e));
        }
    }
    zs.push(1.0);
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    zs
}

/// Slopes above `-DIP_SLOPE` count as flat.
const DIP_SLOPE: f64 = 1e-12;

/// Rightmost maximal interval `(a, b)` on which `u' < 0`.
fn last_dip(curve: &ProfileCurve) -> Option<(f64, f64)> {
    let zs = critical_points(curve);
    zs.windows(2)
        .rev()
        .find(|w| curve.eval_half(0.5 * (w[0] + w[1])).1 < -DIP_SLOPE)
        .map(|w| (w[0], w[1]))
}

fn flatten_dip(curve: &ProfileCurve, a: f64, b: f64) -> Result<ProfileCurve> {
    let snap = 1e-12;
    let grid = curve.grid().with_nodes(&[a, b], snap)?;
    let ua = curve.eval_half(a).0;
    let ub = curve.eval_half(b).0;
    let ia = grid.node_index(a, snap).unwrap_or(0);
    let ib = grid.node_index(b, snap).expect("b is a node");
    let (values, derivatives): (Vec<f64>, Vec<f64>) = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let (u, du, _) = curve.eval_half(x);
            if i < ia {
                (u - (ua - ub), du)
            } else if i <= ib {
                (ub, 0.0)
            } else {
                (u, du)
            }
        })
        .unzip();
    build_profile(curve.alpha(), grid, values, derivatives)
}

/// Repeatedly replaces the outermost dip `(a, b)` by the level `u(b)` and
/// lowers the inner part to match, until `u' >= 0` on `[0, 1]`.
pub fn cylinder_insertion(curve: &ProfileCurve, epsilon: f64) -> Result<CylinderInsertion> {
    if !curve.is_admissible() {
        return Err(Error::InvalidInput("cylinder insertion needs an admissible profile".into()));
    }
    let alpha = curve.alpha();
    let c_alpha = check_alpha(alpha)?;
    if epsilon < 0.25 / (c_alpha * c_alpha) {
        return Err(Error::NotApplicable("cylinder insertion needs epsilon >= eps_hat"));
    }
    let violation = scan_points(curve, 0.0)
        .into_iter()
        .filter(|&x| x > 0.0)
        .any(|x| curve.eval_half(x).1 - (x / c_alpha).sinh() > 1e-9);
    if violation {
        return Err(Error::NotApplicable("slope bound u' < v_alpha' fails; glue first"));
    }
    let mut current = curve.clone();
    let mut energies = vec![helfrich_value(curve, epsilon)];
    let mut passes = 0;
    while let Some((a, b)) = last_dip(&current) {
        current = flatten_dip(&current, a, b)?;
        energies.push(helfrich_value(&current, epsilon));
        passes += 1;
        if passes > 10_000 {
            break;
        }
    }
    if passes == 0 {
        return Err(Error::NotApplicable("profile is already monotone"));
    }
    Ok(CylinderInsertion { profile: current, passes, energies })
}

pub fn insert_cylinder(curve: &ProfileCurve, epsilon: f64) -> Result<ProfileCurve> {
    Ok(cylinder_insertion(curve, epsilon)?.profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile_geometry::Grid;

    fn bumped(alpha: f64, amp: f64) -> ProfileCurve {
        // dip in the middle plus a bulge that violates the slope bound
        ProfileCurve::sample_admissible(alpha, Grid::uniform(64, 5).unwrap(), |x| {
            let pi = std::f64::consts::PI;
            let u = alpha - amp * (1.0 + (pi * x).cos()) + 0.3 * amp * (1.0 + (3.0 * pi * x).cos());
            let du = amp * pi * (pi * x).sin() - 0.9 * amp * pi * (3.0 * pi * x).sin();
            (u, du)
        })
        .unwrap()
    }

    #[test]
    fn monotone_input_untouched() {
        let curve = ProfileCurve::cylinder(2.0, Grid::uniform(16, 5).unwrap()).unwrap();
        assert!(matches!(catenary_gluing(&curve, 1.0), Err(Error::NotApplicable(_))));
        assert!(matches!(cylinder_insertion(&curve, 1.0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn below_alpha_m_rejected() {
        let curve = ProfileCurve::cylinder(1.5, Grid::uniform(16, 5).unwrap()).unwrap();
        assert!(matches!(catenary_gluing(&curve, 1.0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn gluing_is_tangent_and_cheaper() {
        let u = bumped(2.0, 0.4);
        let g = catenary_gluing(&u, 1.0).unwrap();
        assert!(g.x1 > g.x0 && g.x1 < 1.0, "{} {}", g.x0, g.x1);
        let (w, dw) = catenary(g.c_hat, g.x1);
        let (uv, du, _) = u.eval_half(g.x1);
        assert!((w - uv).abs() <= 1e-8, "{}", w - uv);
        assert!((dw - du).abs() <= 1e-8, "{}", dw - du);
        assert!(g.energy_after <= g.energy_before, "{} {}", g.energy_before, g.energy_after);
        let c_alpha = solve_catenary_branches(2.0).unwrap().c1;
        assert!(slope_bound_point(&g.profile, c_alpha).is_none());
    }

    #[test]
    fn insertion_removes_dips() {
        let glued = glue_catenary(&bumped(2.0, 0.4), 1.0).unwrap();
        let ins = cylinder_insertion(&glued, 1.0).unwrap();
        assert!(ins.passes >= 1);
        for w in ins.energies.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + GLUING_ENERGY_SLACK), "{w:?}");
        }
        let p = &ins.profile;
        assert!(last_dip(p).is_none(), "{} {:?}", ins.passes, last_dip(p));
        let (c, v) = crate::classical_solutions::v_alpha(2.0).unwrap();
        assert!(c > 0.0);
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            assert!(p.eval_half(x).0 >= v(x).0 - 1e-9);
        }
    }
}
