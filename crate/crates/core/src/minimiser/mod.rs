//! Direct minimisation of the discrete Helfrich energy, gluing repairs,
//! validators and continuation in the weight `epsilon`.

mod gluing;
mod lbfgs;
mod metric;
mod validators;

use std::f64::consts::PI;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classical_solutions::{catenary, solve_catenary_branches, ConstantsTable};
use crate::energetics::{build_comparison_surface, helfrich, EnergyReport};
use crate::error::{Error, Result};
use crate::profile_geometry::{build_profile, Grid, ProfileCurve};
use crate::quadrature::UnitRule;

pub use gluing::{
    catenary_gluing, cylinder_insertion, glue_catenary, insert_cylinder, slope_bound_point,
    CatenaryGluing, CylinderInsertion, GLUING_ENERGY_SLACK,
};
pub use metric::H2Metric;
pub use validators::{
    el_lhs, el_residual, el_residual_of, first_integral, first_integral_at, first_integral_of,
    first_integral_points,
    validation_points, ExactCatenary, ExactCylinder, FirstIntegral, QuinticRefit, SmoothProfile,
    VALIDATION_POINTS_PER_ELEMENT,
};

use lbfgs::{descend, Descent, DescentParams};

/// Weight from which grids are graded towards `x = 1`.
pub const GRADING_THRESHOLD: f64 = 100.0;
pub const GRADING_RATIO: f64 = 1.2;
pub const GRADED_ELEMENTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SeedProfile {
    Cylinder,
    /// `v_alpha = w_{c1(alpha)}` with the end slope clamped to zero
    Catenary,
    ComparisonSurface,
    Custom(ProfileCurve),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSearch {
    pub shrink: f64,
    pub sufficient_decrease: f64,
}

impl Default for LineSearch {
    fn default() -> Self {
        Self { shrink: 0.5, sufficient_decrease: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub max_iterations: usize,
    /// tolerance on the dual H2 norm of the gradient divided by `max(1, energy)`
    pub gradient_tolerance: f64,
    pub line_search: LineSearch,
    pub positivity_floor: f64,
    pub gluing_enabled: bool,
    pub seed_profile: SeedProfile,
    pub random_seed: u64,
    /// amplitude of the smooth random perturbation added to the seed
    pub seed_noise: f64,
    /// number of extra seeded random starts
    pub multistart: usize,
    pub memory: usize,
    /// grade a uniform grid towards the boundary once `epsilon >= 100`
    pub auto_grade: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: Grid::default(),
            max_iterations: 4000,
            gradient_tolerance: 1e-9,
            line_search: LineSearch::default(),
            positivity_floor: 1e-8,
            gluing_enabled: true,
            seed_profile: SeedProfile::Cylinder,
            random_seed: 0,
            seed_noise: 0.0,
            multistart: 0,
            memory: 12,
            auto_grade: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ls = &self.line_search;
        if !(self.gradient_tolerance > 0.0) || !(self.positivity_floor > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !(ls.shrink > 0.0 && ls.shrink < 1.0) {
            return Err(Error::InvalidInput("shrink factor must lie in (0, 1)".into()));
        }
        if !(ls.sufficient_decrease > 0.0 && ls.sufficient_decrease < 1.0) {
            return Err(Error::InvalidInput("sufficient decrease constant must lie in (0, 1)".into()));
        }
        if self.max_iterations == 0 || self.memory == 0 {
            return Err(Error::InvalidInput("iteration cap and memory must be positive".into()));
        }
        if !(self.seed_noise >= 0.0) {
            return Err(Error::InvalidInput("seed noise must be nonnegative".into()));
        }
        Ok(())
    }

    /// Grid actually used at weight `epsilon`.
    pub fn effective_grid(&self, epsilon: f64) -> Grid {
        let g = &self.grid;
        let n = g.n_elements();
        let uniform = g
            .nodes()
            .iter()
            .enumerate()
            .all(|(i, &x)| (x - i as f64 / n as f64).abs() <= 1e-14);
        if self.auto_grade && epsilon >= GRADING_THRESHOLD && uniform && n > GRADED_ELEMENTS {
            Grid::graded(n, g.quadrature_order(), GRADING_RATIO, GRADED_ELEMENTS)
                .expect("graded grid parameters are valid")
        } else {
            g.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub alpha: f64,
    pub epsilon: f64,
    pub profile: ProfileCurve,
    pub energy: EnergyReport,
    /// relative dual H2 norm, see [`SolverConfig::gradient_tolerance`]
    pub gradient_norm: f64,
    pub el_residual: f64,
    pub first_integral_drift: f64,
    pub first_integral_mean: f64,
    pub iterations: usize,
    pub energy_history: Vec<f64>,
    pub gluing_moves_applied: usize,
    pub converged: bool,
    pub seed: String,
}

/// Smooth admissible perturbation `sum_k xi_k (cos(k pi x) - (-1)^k) / k^2`.
pub fn smooth_noise(curve: &ProfileCurve, amplitude: f64, rng: &mut impl Rng) -> Result<ProfileCurve> {
    let xi: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (values, derivatives): (Vec<f64>, Vec<f64>) = curve
        .grid()
        .nodes()
        .iter()
        .zip(curve.values().iter().zip(curve.derivatives()))
        .map(|(&x, (&u, &du))| {
            let mut dv = 0.0;
            let mut dd = 0.0;
            for (i, c) in xi.iter().enumerate() {
                let k = (i + 1) as f64;
                let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
                dv += c * ((k * PI * x).cos() - sign) / (k * k);
                dd -= c * PI * (k * PI * x).sin() / k;
            }
            (u + amplitude * dv, du + amplitude * dd)
        })
        .unzip();
    build_profile(curve.alpha(), curve.grid().clone(), values, derivatives)
}

fn seed_curve(alpha: f64, seed: &SeedProfile, grid: &Grid) -> Result<ProfileCurve> {
    match seed {
        SeedProfile::Cylinder => ProfileCurve::cylinder(alpha, grid.clone()),
        SeedProfile::Catenary => {
            let c = solve_catenary_branches(alpha)?.c1;
            ProfileCurve::sample_admissible(alpha, grid.clone(), |x| catenary(c, x))
        }
        SeedProfile::ComparisonSurface => {
            // resample so the seed lives on the solver grid
            build_comparison_surface(alpha, grid)?.profile.resample(grid.clone())
        }
        SeedProfile::Custom(curve) => {
            if (curve.alpha() - alpha).abs() > 1e-12 * alpha || !curve.is_admissible() {
                return Err(Error::InvalidInput(
                    "custom seed must be admissible with the requested alpha".into(),
                ));
            }
            if curve.grid().nodes() == grid.nodes() {
                Ok(curve.clone())
            } else {
                curve.resample(grid.clone())
            }
        }
    }
}

fn label(seed: &SeedProfile) -> &'static str {
    match seed {
        SeedProfile::Cylinder => "cylinder",
        SeedProfile::Catenary => "catenary",
        SeedProfile::ComparisonSurface => "comparison",
        SeedProfile::Custom(_) => "custom",
    }
}

fn gluing_applies(alpha: f64, epsilon: f64) -> bool {
    alpha >= ConstantsTable::shared().alpham
        && solve_catenary_branches(alpha).is_ok_and(|b| epsilon >= b.eps_hat)
}

/// One gluing round: catenary then cylinder repair, each kept only if it
/// applies. Returns the repaired curve and the number of moves.
fn repair(curve: &ProfileCurve, epsilon: f64) -> Result<(ProfileCurve, usize)> {
    let mut moves = 0;
    let mut current = curve.clone();
    match catenary_gluing(&current, epsilon) {
        Ok(g) if g.energy_after <= g.energy_before * (1.0 + GLUING_ENERGY_SLACK) => {
            current = g.profile;
            moves += 1;
        }
        Ok(_) | Err(Error::NotApplicable(_)) => {}
        Err(e) => return Err(e),
    }
    match cylinder_insertion(&current, epsilon) {
        Ok(ins) => {
            current = ins.profile;
            moves += ins.passes;
        }
        Err(Error::NotApplicable(_)) => {}
        Err(e) => return Err(e),
    }
    Ok((current, moves))
}

fn better(a: &Descent, b: &Descent) -> bool {
    (a.converged && !b.converged) || (a.converged == b.converged && a.energy < b.energy)
}

/// Local minimiser of the discrete Helfrich energy `W + epsilon A` over
/// admissible profiles with boundary value `alpha`.
pub fn minimise(alpha: f64, epsilon: f64, config: &SolverConfig) -> Result<SolveResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    config.validate()?;
    let grid = config.effective_grid(epsilon);
    let metric = H2Metric::new(&grid, epsilon);
    let params = DescentParams {
        max_iterations: config.max_iterations,
        gradient_tolerance: config.gradient_tolerance,
        shrink: config.line_search.shrink,
        sufficient_decrease: config.line_search.sufficient_decrease,
        positivity_floor: config.positivity_floor,
        memory: config.memory,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.random_seed);

    let mut seeds = Vec::new();
    let base = seed_curve(alpha, &config.seed_profile, &grid)?;
    let base = if config.seed_noise > 0.0 {
        smooth_noise(&base, config.seed_noise, &mut rng)?
    } else {
        base
    };
    seeds.push((label(&config.seed_profile).to_string(), base));
    if config.multistart > 0 {
        for s in [SeedProfile::Cylinder, SeedProfile::Catenary, SeedProfile::ComparisonSurface] {
            if s == config.seed_profile {
                continue;
            }
            if let Ok(c) = seed_curve(alpha, &s, &grid) {
                seeds.push((label(&s).to_string(), c));
            }
        }
        let amplitude = if config.seed_noise > 0.0 { config.seed_noise } else { 0.1 * alpha };
        for k in 0..config.multistart {
            let c = smooth_noise(&seeds[0].1, amplitude, &mut rng)?;
            seeds.push((format!("random-{k}"), c));
        }
    }

    let mut best: Option<(String, Descent)> = None;
    for (name, seed) in &seeds {
        if let Some(node) = seed.values().iter().position(|&v| v <= config.positivity_floor) {
            if best.is_none() && seeds.len() == 1 {
                return Err(Error::NonPositiveProfile { node, value: seed.values()[node] });
            }
            continue;
        }
        let run = descend(seed, epsilon, &metric, &params);
        if best.as_ref().map_or(true, |(_, b)| better(&run, b)) {
            best = Some((name.clone(), run));
        }
    }
    let (seed_name, mut best) = best.ok_or(Error::NonPositiveProfile { node: 0, value: 0.0 })?;

    let mut moves = 0;
    if config.gluing_enabled && gluing_applies(alpha, epsilon) {
        for _ in 0..3 {
            let (repaired, m) = repair(&best.curve, epsilon)?;
            if m == 0 {
                break;
            }
            let Ok(restart) = repaired.resample(grid.clone()) else { break };
            let run = descend(&restart, epsilon, &metric, &params);
            if better(&run, &best) && run.energy < best.energy {
                best = run;
                moves += m;
            } else {
                break;
            }
        }
    }

    let energy = helfrich(&best.curve, epsilon);
    let el = el_residual(&best.curve, epsilon).unwrap_or(f64::NAN);
    let fi = first_integral(&best.curve, epsilon).ok();
    let result = SolveResult {
        alpha,
        epsilon,
        energy,
        gradient_norm: best.gradient_norm,
        el_residual: el,
        first_integral_drift: fi.as_ref().map_or(f64::NAN, |f| f.drift),
        first_integral_mean: fi.as_ref().map_or(f64::NAN, |f| f.mean),
        iterations: best.iterations,
        energy_history: best.history,
        gluing_moves_applied: moves,
        converged: best.converged,
        seed: seed_name,
        profile: best.curve,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::DidNotConverge(Box::new(result)))
    }
}

/// Sup-distance and slope `L1` distance of a profile to `v_alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatenoidDistance {
    pub sup: f64,
    pub slope_l1: f64,
}

pub fn distance_to_v_alpha(curve: &ProfileCurve) -> Result<CatenoidDistance> {
    let c = solve_catenary_branches(curve.alpha())?.c1;
    let grid = curve.grid();
    let rule = UnitRule::new(8);
    let mut sup = 0.0f64;
    let mut l1 = 0.0;
    for e in 0..grid.n_elements() {
        let (x0, h) = (grid.nodes()[e], grid.width(e));
        for k in 0..=16 {
            let x = x0 + h * k as f64 / 16.0;
            sup = sup.max((curve.eval_half(x).0 - catenary(c, x).0).abs());
        }
        l1 += rule.integrate(x0, x0 + h, |x| (curve.eval_half(x).1 - catenary(c, x).1).abs());
    }
    Ok(CatenoidDistance { sup, slope_l1: 2.0 * l1 })
}

#[derive(Debug)]
pub struct ContinuationRung {
    pub epsilon: f64,
    pub outcome: Result<SolveResult>,
    /// present when `alpha > alpha_0`
    pub distance: Option<CatenoidDistance>,
}

impl ContinuationRung {
    /// Converged result, or the best iterate of a failed solve.
    pub fn result(&self) -> Option<&SolveResult> {
        match &self.outcome {
            Ok(r) => Some(r),
            Err(Error::DidNotConverge(r)) => Some(r),
            Err(_) => None,
        }
    }
}

/// Solves along an increasing ladder of weights, seeding every rung with
/// the last successful profile.
pub fn continuation_epsilon(
    alpha: f64,
    ladder: &[f64],
    config: &SolverConfig,
) -> Result<Vec<ContinuationRung>> {
    if ladder.iter().any(|&e| !(e >= 0.0)) || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("ladder must be increasing and nonnegative".into()));
    }
    let has_catenary = alpha > ConstantsTable::shared().alpha0;
    let mut cfg = config.clone();
    let mut rungs = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let outcome = minimise(alpha, eps, &cfg);
        let distance = match &outcome {
            Ok(r) if has_catenary => distance_to_v_alpha(&r.profile).ok(),
            Err(Error::DidNotConverge(r)) if has_catenary => distance_to_v_alpha(&r.profile).ok(),
            _ => None,
        };
        if let Ok(r) = &outcome {
            cfg.seed_profile = SeedProfile::Custom(r.profile.clone());
            cfg.seed_noise = 0.0;
        }
        rungs.push(ContinuationRung { epsilon: eps, outcome, distance });
    }
    Ok(rungs)
}
