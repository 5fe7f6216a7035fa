//! # Mountain-pass solution via the P⁻ fiber branch
//!
//! Along the mass-preserving dilation t⋆(u,v) the energy reduces to the
//! scalar fiber map
//!
//! ```text
//!   F(t) = ½Kt² − c_p t^{γ_p} − c_q t^{γ_q} − c_ν t^{2*},
//! ```
//!
//! whose derivative has at most two positive roots: a local minimum t₋
//! (the P⁺ branch holding the local minimizer at t = 1) and a local
//! maximum t₊ (the P⁻ branch). Critical points of the constrained energy
//! with positive level sit at fiber maxima, so the saddle of the
//! mountain-pass geometry is computed as a constrained minimization over
//! P⁻: each descent step is retracted back onto the branch by dilating
//! with the current t₊. Seeded at the maximum of a bubble-insertion path,
//! the projected energy decreases monotonically into the window
//! (k₀, m + cap_increment) where compactness is guaranteed, and a bordered
//! Newton polish locks the converged saddle to machine stationarity.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::functionals::{
    energy_from_norms, force_u, force_v, grad_energy, multipliers, pair_norms,
    pohozaev_from_norms, FiberCoeffs, ParamsError, ProblemParams, SolveReport,
};
use crate::grid::{dilate, FieldPair, Grid, GridError, RadialField};
use crate::linalg::{assemble_stiffness, solve_shifted_pinned, LinalgError};
use crate::localmin::{clamp_nonneg, coupled_newton_polish, rescale};

/// Fiber roots are bracketed on a log grid over this dilation range.
pub const FIBER_RANGE: (f64, f64) = (1e-6, 1e6);
/// Log-grid resolution of the bracketing scan.
pub const FIBER_SCAN_POINTS: usize = 601;
/// Relative width at which root bisection stops.
pub const FIBER_BISECT_RTOL: f64 = 1e-12;
/// The P⁻ retraction re-dilates until the branch root returns this close
/// to 1 (resampling shifts the coefficients slightly, so one dilation is
/// not exact on a mesh).
const PROJECT_TTOL: f64 = 1e-9;
const PROJECT_MAX_PASSES: usize = 16;
/// Postcondition on the projected point: |P| relative to the kinetic sum.
pub const PROJECTION_PTOL: f64 = 1e-6;
/// Descent step control (identical scheme to the ball-constrained flow).
const TAU_INITIAL: f64 = 0.1;
const TAU_GROW: f64 = 1.2;
const TAU_SHRINK: f64 = 0.5;
const TAU_CAP: f64 = 5000.0;
/// Weak-residual threshold the Newton polish must reach.
const NEWTON_ACCEPT: f64 = 1e-6;

/// The (at most two) positive roots of F′, classified by F″.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FiberRoots {
    /// Fiber local minimum (P⁺ membership, F″ > 0).
    pub t_minus: Option<f64>,
    /// Fiber local maximum (P⁻ membership, F″ < 0).
    pub t_plus: Option<f64>,
    /// Whether any positive root was found.
    pub exists: bool,
}

#[derive(Debug, Error)]
pub enum MountainError {
    #[error("invalid parameters: {0}")]
    Invalid(#[from] ParamsError),
    #[error("pair has an empty component; the fiber map is degenerate")]
    EmptyComponent,
    #[error("no P⁻ root: the fiber map has no interior maximum (kinetic part too small)")]
    NoPminus,
    #[error("projected energy {energy:.6e} fell below the mountain floor {floor:.6e}")]
    FellToMinimizer { energy: f64, floor: f64 },
    #[error("projection left |P| = {pohozaev:.3e} above {PROJECTION_PTOL:.0e}·K = {scale:.3e}")]
    Projection { pohozaev: f64, scale: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("converged level {energy:.6e} outside the window ({lo:.6e}, {hi:.6e})")]
    LevelViolation { energy: f64, lo: f64, hi: f64 },
    #[error("seed does not live on the solver grid")]
    ForeignGrid,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Locate the positive critical points of the fiber map of `pair`.
///
/// F′(t)/t = K − γ_p c_p t^{γ_p−2} − γ_q c_q t^{γ_q−2} − 2* c_ν t^{2*−2}
/// falls to −∞ at both ends of (0, ∞) and is unimodal in log t, so sign
/// changes on a log grid bracket every root; each bracket is bisected to
/// [`FIBER_BISECT_RTOL`] and classified by the sign of F″. A degenerate
/// tangency (P⁰ contact) produces no bracket and is reported as absence.
pub fn fiber_critical_points(
    params: &ProblemParams,
    pair: &FieldPair,
) -> Result<FiberRoots, MountainError> {
    let norms = pair_norms(params, pair);
    if norms.mass_u <= 0.0 || norms.mass_v <= 0.0 {
        return Err(MountainError::EmptyComponent);
    }
    let f = FiberCoeffs::from_norms(params, &norms);
    let g = |t: f64| f.deriv(t) / t;

    let (lo, hi) = FIBER_RANGE;
    let step = (hi / lo).ln() / (FIBER_SCAN_POINTS - 1) as f64;
    let mut roots = FiberRoots { t_minus: None, t_plus: None, exists: false };
    let mut prev_t = lo;
    let mut prev_g = g(lo);
    for i in 1..FIBER_SCAN_POINTS {
        let t = lo * (step * i as f64).exp();
        let gt = g(t);
        if prev_g == 0.0 || prev_g * gt < 0.0 {
            let root = if prev_g == 0.0 {
                prev_t
            } else {
                let (mut a, mut b) = (prev_t, t);
                let mut ga = prev_g;
                while b - a > FIBER_BISECT_RTOL * b {
                    let mid = 0.5 * (a + b);
                    let gm = g(mid);
                    if gm == 0.0 {
                        a = mid;
                        b = mid;
                    } else if ga * gm < 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        ga = gm;
                    }
                }
                0.5 * (a + b)
            };
            let curvature = f.second(root);
            if curvature > 0.0 && roots.t_minus.is_none() {
                roots.t_minus = Some(root);
            } else if curvature < 0.0 && roots.t_plus.is_none() {
                roots.t_plus = Some(root);
            }
        }
        prev_t = t;
        prev_g = gt;
    }
    roots.exists = roots.t_minus.is_some() || roots.t_plus.is_some();
    if let (Some(tm), Some(tp)) = (roots.t_minus, roots.t_plus) {
        debug_assert!(tm < tp, "fiber min {tm} must precede fiber max {tp}");
    }
    Ok(roots)
}

/// Retract a pair onto the P⁻ branch: dilate both components by the fiber
/// maximum t₊ until the branch root sits at 1, then restore the input
/// masses exactly.
///
/// On the continuum one dilation suffices; mesh resampling perturbs the
/// norms at O(h²), so the dilation is repeated until |t₊ − 1| ≤ 1e−9. The
/// output satisfies |P| ≤ [`PROJECTION_PTOL`]·(kinetic sum).
pub fn project_pminus(
    params: &ProblemParams,
    pair: &FieldPair,
) -> Result<FieldPair, MountainError> {
    let entry = pair_norms(params, pair);
    if entry.mass_u <= 0.0 || entry.mass_v <= 0.0 {
        return Err(MountainError::EmptyComponent);
    }
    let grid = pair.grid().clone();
    let mut cur = pair.clone();
    for _ in 0..PROJECT_MAX_PASSES {
        let roots = fiber_critical_points(params, &cur)?;
        let tp = roots.t_plus.ok_or(MountainError::NoPminus)?;
        if (tp - 1.0).abs() <= PROJECT_TTOL {
            break;
        }
        cur = FieldPair { u: dilate(&cur.u, tp)?, v: dilate(&cur.v, tp)? };
        // resampling perturbs the masses at O(h²); restore them now so the
        // fixed point of the loop has exact masses AND t₊ = 1
        rescale(&grid, &mut cur.u.values, entry.mass_u);
        rescale(&grid, &mut cur.v.values, entry.mass_v);
    }
    let norms = pair_norms(params, &cur);
    let p = pohozaev_from_norms(params, &norms);
    let scale = PROJECTION_PTOL * (norms.kin_u + norms.kin_v);
    if p.abs() > scale {
        return Err(MountainError::Projection { pohozaev: p, scale });
    }
    Ok(cur)
}

/// Solver controls for the P⁻ descent.
#[derive(Debug, Clone)]
pub struct MountainOptions {
    /// Stop the flow once the mass-constrained gradient norm at the
    /// projected iterate falls below this (mesh-dependent plateau).
    pub pg_tol: f64,
    pub max_iters: usize,
    /// Mountain floor k₀; the projected energy may never fall below it.
    pub k0: f64,
    /// Optional (m, cap_increment): enforce 0 < M < m + cap on success.
    pub window: Option<(f64, f64)>,
}

impl Default for MountainOptions {
    fn default() -> Self {
        Self { pg_tol: 3e-2, max_iters: 60_000, k0: 0.0, window: None }
    }
}

/// L²-norm of the energy gradient projected onto the tangent space of the
/// two mass constraints at `pair`.
pub fn projected_gradient_norm(params: &ProblemParams, pair: &FieldPair) -> f64 {
    let g = grad_energy(params, pair);
    let w = &pair.grid().w;
    let mut acc = 0.0;
    for (gc, fc) in [(&g.u, &pair.u), (&g.v, &pair.v)] {
        let mut dot = 0.0;
        let mut mass = 0.0;
        for ((gi, fi), wi) in gc.values.iter().zip(&fc.values).zip(w) {
            dot += wi * gi * fi;
            mass += wi * fi * fi;
        }
        let coef = if mass > 0.0 { dot / mass } else { 0.0 };
        for ((gi, fi), wi) in gc.values.iter().zip(&fc.values).zip(w) {
            let tangential = gi - coef * fi;
            acc += wi * tangential * tangential;
        }
    }
    acc.sqrt()
}

/// Minimize J over the P⁻ branch starting from a bubble-path maximum.
///
/// Each iteration takes one semi-implicit descent step on the free energy,
/// clamps negative overshoots, restores the masses and retracts onto P⁻;
/// a step is accepted only if the projected energy does not increase. The
/// flow stops at the mesh gradient plateau and a bordered Newton solve
/// polishes the saddle to weak-form stationarity ~1e−11. The converged
/// level M must stay above the mountain floor k₀ and, when a window is
/// supplied, inside (0, m + cap_increment).
pub fn find_mountain_pass(
    grid: &Arc<Grid>,
    params: &ProblemParams,
    seed: &FieldPair,
    opts: &MountainOptions,
) -> Result<SolveReport, MountainError> {
    params.validate()?;
    if !Arc::ptr_eq(seed.grid(), grid) {
        return Err(MountainError::ForeignGrid);
    }
    let m = grid.len();
    let k = assemble_stiffness(grid);

    let mut cur = project_pminus(params, seed)?;
    let mut j_cur = energy_from_norms(params, &pair_norms(params, &cur));
    let mut tau = TAU_INITIAL;
    let mut iterations = 0;
    let mut pg = f64::INFINITY;
    let (mut rhs_u, mut rhs_v) = (vec![0.0; m], vec![0.0; m]);
    let (mut nu_new, mut nv_new) = (vec![0.0; m], vec![0.0; m]);

    while iterations < opts.max_iters {
        iterations += 1;
        if j_cur < opts.k0 {
            return Err(MountainError::FellToMinimizer { energy: j_cur, floor: opts.k0 });
        }
        let (u, v) = (&cur.u.values, &cur.v.values);
        for i in 0..m {
            rhs_u[i] = grid.w[i] * (u[i] + tau * force_u(params, u[i], v[i]));
            rhs_v[i] = grid.w[i] * (v[i] + tau * force_v(params, u[i], v[i]));
        }
        solve_shifted_pinned(&grid.w, &k, tau, &rhs_u, &mut nu_new)?;
        solve_shifted_pinned(&grid.w, &k, tau, &rhs_v, &mut nv_new)?;
        clamp_nonneg(&mut nu_new);
        clamp_nonneg(&mut nv_new);
        rescale(grid, &mut nu_new, params.a);
        rescale(grid, &mut nv_new, params.b);
        let raw = FieldPair {
            u: RadialField { grid: grid.clone(), values: nu_new.clone() },
            v: RadialField { grid: grid.clone(), values: nv_new.clone() },
        };
        let candidate = match project_pminus(params, &raw) {
            Ok(c) => c,
            // an overlong step can push past the branch fold; shrink and retry
            Err(MountainError::NoPminus | MountainError::Projection { .. }) => {
                tau *= TAU_SHRINK;
                if tau < 1e-12 {
                    break;
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let trial_norms = pair_norms(params, &candidate);
        let trial_energy = energy_from_norms(params, &trial_norms);
        let slack = 1e-9 * (j_cur.abs() + 1.0);
        if trial_energy <= j_cur + slack {
            cur = candidate;
            j_cur = trial_energy;
            tau = (tau * TAU_GROW).min(TAU_CAP);
            pg = projected_gradient_norm(params, &cur);
            if pg <= opts.pg_tol {
                break;
            }
        } else {
            tau *= TAU_SHRINK;
            if tau < 1e-12 {
                break;
            }
        }
    }
    if pg > opts.pg_tol {
        return Err(MountainError::NoConvergence { iterations, residual: pg });
    }

    let (mut u, mut v) = (cur.u.values.clone(), cur.v.values.clone());
    let (mut l1, mut l2) = multipliers(params, &cur)?;
    let residual = coupled_newton_polish(grid, &k, params, &mut u, &mut v, &mut l1, &mut l2)
        .map_err(|_| MountainError::NoConvergence { iterations, residual: pg })?;
    let pair = FieldPair {
        u: RadialField { grid: grid.clone(), values: u },
        v: RadialField { grid: grid.clone(), values: v },
    };
    let norms = pair_norms(params, &pair);
    if residual > NEWTON_ACCEPT {
        return Err(MountainError::NoConvergence { iterations, residual });
    }

    let level = energy_from_norms(params, &norms);
    if level < opts.k0 {
        return Err(MountainError::FellToMinimizer { energy: level, floor: opts.k0 });
    }
    if let Some((m_level, cap)) = opts.window {
        if !(level > 0.0 && level < m_level + cap) {
            return Err(MountainError::LevelViolation {
                energy: level,
                lo: 0.0,
                hi: m_level + cap,
            });
        }
    }

    Ok(SolveReport {
        energy: level,
        lambda1: l1,
        lambda2: l2,
        pohozaev_residual: pohozaev_from_norms(params, &norms),
        mass_errors: ((norms.mass_u - params.a).abs(), (norms.mass_v - params.b).abs()),
        kkt_residual: residual,
        iterations,
        converged: residual <= 1e-9,
        state: pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    use crate::bubble::{test_pair, tstar, verify_level_gap};
    use crate::functionals::{canonical_params, energy, fiber_energy, Constants};
    use crate::grid::{is_schwartz, make_grid, GridLaw};
    use crate::localmin::{compute_thresholds, find_local_min, LocalMinOptions, Thresholds};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const S3: f64 = 5.477904089531332;
    const C3: f64 = 0.17475367811213670;

    fn test_grid() -> Arc<Grid> {
        static GRID: OnceLock<Arc<Grid>> = OnceLock::new();
        GRID.get_or_init(|| make_grid(3, 50.0, 2048, GridLaw::Graded { exponent: 4.0 }).unwrap())
            .clone()
    }

    fn compact_params() -> ProblemParams {
        ProblemParams { a: 25.0, b: 25.0, ..canonical_params() }
    }

    fn constants() -> Constants {
        Constants { sobolev_s: S3, gn_c: vec![(3.0, C3)] }
    }

    fn compact_setup() -> &'static (FieldPair, f64, Thresholds) {
        static SETUP: OnceLock<(FieldPair, f64, Thresholds)> = OnceLock::new();
        SETUP.get_or_init(|| {
            let g = test_grid();
            let params = compact_params();
            let t = compute_thresholds(&params, &constants()).unwrap();
            let rep = find_local_min(&g, &params, &t, &LocalMinOptions::default()).unwrap();
            (rep.state, rep.energy, t)
        })
    }

    /// A pair of random positive bumps with prescribed masses.
    fn random_pair(rng: &mut ChaCha8Rng, a: f64, b: f64) -> FieldPair {
        let g = test_grid();
        let mut bump = |_target: f64| -> Vec<f64> {
            let bumps = rng.gen_range(1..=3);
            let mut centers = Vec::new();
            for _ in 0..bumps {
                centers.push((rng.gen_range(0.0..6.0), rng.gen_range(0.4..3.0)));
            }
            g.r.iter()
                .map(|&r| {
                    centers
                        .iter()
                        .map(|(c, w)| (-((r - c) / w).powi(2)).exp())
                        .sum::<f64>()
                })
                .collect()
        };
        let mut u = bump(a);
        let mut v = bump(b);
        let last = g.len() - 1;
        u[last] = 0.0;
        v[last] = 0.0;
        rescale(&g, &mut u, a);
        rescale(&g, &mut v, b);
        FieldPair {
            u: RadialField { grid: g.clone(), values: u },
            v: RadialField { grid: g, values: v },
        }
    }

    #[test]
    fn fiber_derivative_has_at_most_two_sign_changes() {
        let params = compact_params();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let pair = random_pair(&mut rng, 25.0, 25.0);
            let f = FiberCoeffs::new(&params, &pair);
            let (lo, hi) = FIBER_RANGE;
            let step = (hi / lo).ln() / (FIBER_SCAN_POINTS - 1) as f64;
            let mut changes = 0;
            let mut prev = f.deriv(lo) / lo;
            for i in 1..FIBER_SCAN_POINTS {
                let t = lo * (step * i as f64).exp();
                let g = f.deriv(t) / t;
                if prev * g < 0.0 {
                    changes += 1;
                }
                prev = g;
            }
            assert!(changes <= 2, "found {changes} sign changes");
            let roots = fiber_critical_points(&params, &pair).unwrap();
            if let (Some(tm), Some(tp)) = (roots.t_minus, roots.t_plus) {
                assert!(tm < tp, "branch order violated: {tm} vs {tp}");
            }
        }
    }

    #[test]
    fn minimizer_sits_on_its_own_fiber_minimum() {
        let (mini, _, _) = compact_setup();
        let params = compact_params();
        let roots = fiber_critical_points(&params, mini).unwrap();
        let tm = roots.t_minus.expect("local minimizer must be a P+ point");
        // the root sits at 1 up to |P|/F″(1), and the solver bounds |P| by
        // 1e−5 relative to the kinetic sum (F″ and K share the scale)
        assert!(
            (tm - 1.0).abs() < 1e-5,
            "minimizer fiber root {tm} should be 1 (it already satisfies P = 0)"
        );
        assert!(roots.t_plus.expect("fiber max must exist") > 1.0);
    }

    #[test]
    fn oversized_amplitude_leaves_no_fiber_roots() {
        // scaling a pair up makes the critical term dominate every t, the
        // analogue of the small-A regime where g stays negative
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pair = random_pair(&mut rng, 25.0, 25.0);
        let g = pair.grid().clone();
        let blown = FieldPair {
            u: RadialField {
                grid: g.clone(),
                values: pair.u.values.iter().map(|x| 100.0 * x).collect(),
            },
            v: RadialField {
                grid: g,
                values: pair.v.values.iter().map(|x| 100.0 * x).collect(),
            },
        };
        let params = compact_params();
        let roots = fiber_critical_points(&params, &blown).unwrap();
        assert!(!roots.exists, "expected no roots, got {roots:?}");
        assert!(matches!(project_pminus(&params, &blown), Err(MountainError::NoPminus)));
    }

    #[test]
    fn projection_lands_on_the_branch_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = compact_params();
        let pair = random_pair(&mut rng, 25.0, 25.0);
        let proj = project_pminus(&params, &pair).unwrap();
        // branch root returns to 1
        let roots = fiber_critical_points(&params, &proj).unwrap();
        let tp = roots.t_plus.expect("projected pair keeps its fiber max");
        assert!((tp - 1.0).abs() < 1e-6, "t+ after projection: {tp}");
        // masses unchanged
        let n_in = pair_norms(&params, &pair);
        let n_out = pair_norms(&params, &proj);
        assert!((n_out.mass_u - n_in.mass_u).abs() < 1e-10 * n_in.mass_u);
        assert!((n_out.mass_v - n_in.mass_v).abs() < 1e-10 * n_in.mass_v);
        // Pohozaev within the advertised bound
        let p = pohozaev_from_norms(&params, &n_out);
        assert!(p.abs() <= PROJECTION_PTOL * (n_out.kin_u + n_out.kin_v));
        // energy equals the fiber max over a dense dilation grid
        let j = energy(&params, &proj);
        assert!(j > 0.0, "projected level should be positive (got {j})");
        let mut best = f64::NEG_INFINITY;
        for i in 0..=4000 {
            let t = 10f64.powf(-2.0 + 4.0 * i as f64 / 4000.0);
            best = best.max(fiber_energy(&params, &proj, t).unwrap());
        }
        assert!(
            (best - j).abs() <= 1e-6 * j.abs(),
            "fiber max {best} vs projected level {j}"
        );
    }

    #[test]
    fn mountain_pass_on_the_compact_fixture() {
        let (mini, m_level, thresholds) = compact_setup();
        let params = compact_params();
        let g = test_grid();
        let consts = constants();
        let gap = verify_level_gap(&params, mini, &consts, 1024).unwrap();
        let seed = test_pair(&params, mini, 1024, gap.t_n).unwrap();
        let opts = MountainOptions {
            k0: thresholds.k0,
            window: Some((*m_level, gap.cap_increment)),
            ..MountainOptions::default()
        };
        let report = find_mountain_pass(&g, &params, &seed, &opts).unwrap();

        assert!(report.converged, "kkt residual {}", report.kkt_residual);
        let level = report.energy;
        assert!(level > 0.0 && *m_level < 0.0, "M = {level} must sit above 0 > m = {m_level}");
        assert!(
            level > thresholds.k0 && level < m_level + gap.cap_increment,
            "M = {level} outside ({}, {})",
            thresholds.k0,
            m_level + gap.cap_increment
        );
        let norms = pair_norms(&params, &report.state);
        assert!(
            report.pohozaev_residual.abs() <= 1e-4 * (norms.kin_u + norms.kin_v),
            "|P| = {} vs kinetic {}",
            report.pohozaev_residual.abs(),
            norms.kin_u + norms.kin_v
        );
        assert!(report.mass_errors.0 < 1e-8 && report.mass_errors.1 < 1e-8);
        // positive spike, Schwartz profile, nonnegative everywhere
        let peak = report.state.u.values[0];
        assert!(peak > 0.0);
        assert!(report.state.u.values.iter().all(|&x| x >= 0.0));
        assert!(is_schwartz(&report.state.u, 1e-6 * peak));
        assert!(is_schwartz(&report.state.v, 1e-6 * peak));
        // multiplier identity: λ₁a + λ₂b > 0 in the mixed regime
        assert!(report.lambda1 * params.a + report.lambda2 * params.b > 0.0);
        // the saddle concentrates: its level is within the concentration
        // quantum of m + cap (bubble carries almost all of the energy)
        assert!(level > 0.5 * gap.cap_increment, "level {level} vs cap {}", gap.cap_increment);
    }

    #[test]
    fn window_violation_is_reported() {
        let (mini, _, thresholds) = compact_setup();
        let params = compact_params();
        let g = test_grid();
        let seed = test_pair(&params, mini, 1024, tstar(&params)).unwrap();
        // shrink the admissible window to force the violation branch
        let opts = MountainOptions {
            k0: thresholds.k0,
            window: Some((0.0, 1e-3)),
            ..MountainOptions::default()
        };
        match find_mountain_pass(&g, &params, &seed, &opts) {
            Err(MountainError::LevelViolation { energy, hi, .. }) => {
                assert!(energy >= hi);
            }
            other => panic!("expected LevelViolation, got {other:?}"),
        }
    }

    #[test]
    fn foreign_seed_is_rejected() {
        let (mini, _, _) = compact_setup();
        let params = compact_params();
        let other = make_grid(3, 50.0, 1024, GridLaw::Graded { exponent: 4.0 }).unwrap();
        let seed = FieldPair {
            u: RadialField::from_fn(other.clone(), |r| (-r * r).exp()),
            v: RadialField::from_fn(other, |r| (-r * r).exp()),
        };
        let g = test_grid();
        assert!(matches!(
            find_mountain_pass(&g, &params, &seed, &MountainOptions::default()),
            Err(MountainError::ForeignGrid)
        ));
        let _ = mini;
    }
}
