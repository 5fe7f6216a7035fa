//! # Thresholds and the constrained local minimizer
//!
//! The energy restricted to the product of mass spheres is bounded below
//! on small kinetic balls: with ρ = ‖∇u‖₂² + ‖∇v‖₂², Gagliardo–Nirenberg
//! and Sobolev bounds give J ≥ ρ·h_ν(ρ) where
//!
//! ```text
//!   h_ν(ρ) = ½ − (2^{γ_p/2}/p) μ₁ C_p a^{(p−γ_p)/2} ρ^{(γ_p−2)/2}
//!              − (2^{γ_q/2}/q) μ₂ C_q b^{(q−γ_q)/2} ρ^{(γ_q−2)/2}
//!              − 2^{2*/2} ν S^{−2*/2} ρ^{(2*−2)/2}.
//! ```
//!
//! The subcritical terms blow up as ρ → 0 and fade as ρ grows, while the
//! critical term grows with ρ, so h_ν is positive on a window when ν is
//! small. Three derived quantities organize the construction:
//!
//! * ρ₀ — the smallest ρ of the form 1e−6·2^k whose ν-free part exceeds ¼;
//! * ν₀ — the largest coupling for which h_ν(ρ₀) stays positive, located
//!   by bisection;
//! * k₀ = ρ₀·h_{ν₀}(ρ₀) — a strictly positive energy floor separating the
//!   mountain-pass level from the trivial region.
//!
//! Below ν₀ the energy has a genuine local minimizer inside the kinetic
//! ball of radius ρ₀: [`find_local_min`] computes it by a semi-implicit
//! constrained descent followed by a bordered Newton polish of the full
//! two-component KKT system, guarding the ball constraint throughout.
//! [`sweep_nu`] tracks the minimizer along a coupling sweep with warm
//! starts and measures its H¹ distance to the decoupled pair.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::functionals::{
    energy_from_norms, force_u, force_v, pair_norms, pohozaev_from_norms, signed_pow, Constants,
    ParamsError, ProblemParams, SolveReport,
};
use crate::grid::{FieldPair, Grid, GridError, RadialField};
use crate::linalg::{
    assemble_stiffness, solve_bordered, solve_shifted_pinned, Banded, LinalgError, SymBanded,
};
use crate::scalar::{solve_ground_state, FlowOptions as ScalarFlowOptions, ScalarParams};

/// ρ₀ search starts here and doubles.
pub const RHO_SEARCH_START: f64 = 1e-6;
/// ρ₀ search gives up past this radius.
pub const RHO_SEARCH_LIMIT: f64 = 1e12;
/// Relative width at which the ν₀ bisection stops. Keeping this finite is
/// what makes k₀ strictly positive: the bisection returns the largest ν
/// *verified* to keep h positive, a hair below the exact root.
pub const NU_BISECTION_RTOL: f64 = 1e-9;
/// Flow step growth/shrink factors and cap (see `scalar` for rationale).
const TAU_GROW: f64 = 1.2;
const TAU_SHRINK: f64 = 0.5;
const TAU_CAP: f64 = 5000.0;
/// Newton stopping threshold on the relative weak residual.
const NEWTON_RTOL: f64 = 1e-11;

/// The threshold triple (ρ₀, ν₀, k₀).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    pub rho0: f64,
    pub nu0: f64,
    pub k0: f64,
}

#[derive(Debug, Error)]
pub enum LocalMinError {
    #[error("invalid parameters: {0}")]
    Invalid(#[from] ParamsError),
    #[error("no Gagliardo-Nirenberg constant registered for exponent {0}")]
    MissingConstant(f64),
    #[error("rho0 search exceeded {limit:.1e} without the nu-free part of h reaching 1/4")]
    SearchFailure { limit: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
    #[error("initial pair lives on a different grid than the solver")]
    ForeignGrid,
    #[error("iterate left the kinetic ball: |∇(u,v)|^2 = {kinetic:.6e} vs bound {bound:.6e}")]
    BallExit { kinetic: f64, bound: f64 },
    #[error("descent did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// The lower-bound curve h_ν(ρ) in coefficient form, so threshold searches
/// evaluate it without re-deriving the exponents.
#[derive(Debug, Clone, Copy)]
pub struct HCurve {
    c_p: f64,
    e_p: f64,
    c_q: f64,
    e_q: f64,
    /// coefficient multiplying ν in the critical term
    c_crit: f64,
    e_crit: f64,
}

impl HCurve {
    pub fn new(params: &ProblemParams, constants: &Constants) -> Result<Self, LocalMinError> {
        params.validate()?;
        let cp = constants.gn(params.p).ok_or(LocalMinError::MissingConstant(params.p))?;
        let cq = constants.gn(params.q).ok_or(LocalMinError::MissingConstant(params.q))?;
        let (gp, gq, ts) = (params.gamma_p(), params.gamma_q(), params.two_star());
        Ok(Self {
            c_p: 2f64.powf(gp / 2.0) / params.p
                * params.mu1
                * cp
                * params.a.powf((params.p - gp) / 2.0),
            e_p: (gp - 2.0) / 2.0,
            c_q: 2f64.powf(gq / 2.0) / params.q
                * params.mu2
                * cq
                * params.b.powf((params.q - gq) / 2.0),
            e_q: (gq - 2.0) / 2.0,
            c_crit: 2f64.powf(ts / 2.0) * constants.sobolev_s.powf(-ts / 2.0),
            e_crit: (ts - 2.0) / 2.0,
        })
    }

    /// The ν-free part ½ − subcritical terms.
    pub fn free(&self, rho: f64) -> f64 {
        0.5 - self.c_p * rho.powf(self.e_p) - self.c_q * rho.powf(self.e_q)
    }

    /// Full curve at coupling ν.
    pub fn value(&self, nu: f64, rho: f64) -> f64 {
        self.free(rho) - nu * self.c_crit * rho.powf(self.e_crit)
    }
}

/// h_ν(ρ) at the coupling stored in `params`.
pub fn h_nu(params: &ProblemParams, constants: &Constants, rho: f64) -> Result<f64, LocalMinError> {
    Ok(HCurve::new(params, constants)?.value(params.nu, rho))
}

/// Compute (ρ₀, ν₀, k₀) for a parameter set.
///
/// ρ₀ doubles from 1e−6 until the ν-free part of h clears ¼ (error past
/// 1e12); ν₀ is bisected to relative width 1e−9 from the largest coupling
/// verified positive, so the floor k₀ = ρ₀·h_{ν₀}(ρ₀) comes out small but
/// strictly positive.
pub fn compute_thresholds(
    params: &ProblemParams,
    constants: &Constants,
) -> Result<Thresholds, LocalMinError> {
    let h = HCurve::new(params, constants)?;

    let mut rho = RHO_SEARCH_START;
    while h.free(rho) <= 0.25 {
        rho *= 2.0;
        if rho > RHO_SEARCH_LIMIT {
            return Err(LocalMinError::SearchFailure { limit: RHO_SEARCH_LIMIT });
        }
    }
    let rho0 = rho;

    let mut hi = 1.0;
    while h.value(hi, rho0) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > NU_BISECTION_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if h.value(mid, rho0) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let nu0 = lo;
    let k0 = rho0 * h.value(nu0, rho0);
    Ok(Thresholds { rho0, nu0, k0 })
}

/// Solver controls for the constrained descent.
#[derive(Debug, Clone)]
pub struct LocalMinOptions {
    /// Relative flow tolerance before the Newton polish takes over.
    pub flow_tol: f64,
    pub max_iters: usize,
    /// Initial descent step; the line search adapts from here.
    pub step0: f64,
    /// Whether to require the converged state inside the ρ₀ ball.
    pub ball_check: bool,
    /// Gaussian seed width when no warm start is supplied.
    pub init_width: f64,
    /// Warm start (must live on the solver grid).
    pub init: Option<FieldPair>,
}

impl Default for LocalMinOptions {
    fn default() -> Self {
        Self {
            flow_tol: 1e-6,
            max_iters: 20_000,
            step0: 0.1,
            ball_check: true,
            init_width: 1.0,
            init: None,
        }
    }
}

/// Local minimizer of J inside the kinetic ball of radius ρ₀.
///
/// The flow may roam the doubled ball (kinetic sum ≤ 2ρ₀, error on exit);
/// the converged state must sit strictly inside ρ₀. Multipliers come out
/// of the polished KKT system; the report carries the Pohozaev and
/// stationarity residuals for downstream contract checks.
pub fn find_local_min(
    grid: &Arc<Grid>,
    params: &ProblemParams,
    thresholds: &Thresholds,
    opts: &LocalMinOptions,
) -> Result<SolveReport, LocalMinError> {
    params.validate()?;
    if params.a == 0.0 || params.b == 0.0 {
        return Err(LocalMinError::Invalid(ParamsError::Masses { a: params.a, b: params.b }));
    }
    if !(opts.step0 > 0.0) {
        return Err(LocalMinError::Invalid(ParamsError::Positivity {
            name: "step0",
            value: opts.step0,
        }));
    }
    let m = grid.len();
    let k = assemble_stiffness(grid);

    let (mut u, mut v) = match &opts.init {
        Some(pair) => {
            if !Arc::ptr_eq(pair.grid(), grid) {
                return Err(LocalMinError::ForeignGrid);
            }
            (pair.u.values.clone(), pair.v.values.clone())
        }
        None => {
            // a mass-m Gaussian of width σ carries kinetic energy ≈ mN/σ²,
            // so widen the seed until it starts well inside the ball
            let ball_width =
                (8.0 * grid.dim as f64 * (params.a + params.b) / thresholds.rho0).sqrt();
            let w = opts.init_width.max(ball_width);
            let g: Vec<f64> = grid.r.iter().map(|&r| (-(r / w) * (r / w)).exp()).collect();
            (g.clone(), g)
        }
    };
    u[m - 1] = 0.0;
    v[m - 1] = 0.0;
    rescale(grid, &mut u, params.a);
    rescale(grid, &mut v, params.b);

    let pair_of = |u: &[f64], v: &[f64]| -> FieldPair {
        FieldPair {
            u: RadialField { grid: grid.clone(), values: u.to_vec() },
            v: RadialField { grid: grid.clone(), values: v.to_vec() },
        }
    };

    let ball = 2.0 * thresholds.rho0;
    let mut tau = opts.step0;
    let mut norms = pair_norms(params, &pair_of(&u, &v));
    let mut energy = energy_from_norms(params, &norms);
    let mut iterations = 0;
    let (mut rhs_u, mut rhs_v) = (vec![0.0; m], vec![0.0; m]);
    let (mut nu_new, mut nv_new) = (vec![0.0; m], vec![0.0; m]);

    while iterations < opts.max_iters {
        iterations += 1;
        let kin = norms.kin_u + norms.kin_v;
        if kin > ball {
            return Err(LocalMinError::BallExit { kinetic: kin, bound: ball });
        }
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
        let trial_norms = pair_norms(params, &pair_of(&nu_new, &nv_new));
        let trial_energy = energy_from_norms(params, &trial_norms);
        let slack = 1e-12 * (energy.abs() + trial_energy.abs() + 1.0);
        if trial_energy <= energy + slack {
            let step2: f64 = u
                .iter()
                .zip(&nu_new)
                .chain(v.iter().zip(&nv_new))
                .zip(grid.w.iter().chain(grid.w.iter()))
                .map(|((a, b), w)| w * (a - b) * (a - b))
                .sum();
            u.copy_from_slice(&nu_new);
            v.copy_from_slice(&nv_new);
            norms = trial_norms;
            energy = trial_energy;
            let rel = step2.sqrt() / (tau * (params.a + params.b).sqrt());
            tau = (tau * TAU_GROW).min(TAU_CAP);
            if rel < opts.flow_tol {
                break;
            }
        } else {
            tau *= TAU_SHRINK;
            if tau < 1e-12 {
                break;
            }
        }
    }

    let pair = pair_of(&u, &v);
    let (mut l1, mut l2) = crate::functionals::multipliers(params, &pair)?;
    let residual = coupled_newton_polish(grid, &k, params, &mut u, &mut v, &mut l1, &mut l2)?;
    let pair = pair_of(&u, &v);
    let norms = pair_norms(params, &pair);

    let kin = norms.kin_u + norms.kin_v;
    if opts.ball_check && kin >= thresholds.rho0 {
        return Err(LocalMinError::BallExit { kinetic: kin, bound: thresholds.rho0 });
    }
    if residual > 1e-6 {
        return Err(LocalMinError::NoConvergence { iterations, residual });
    }

    Ok(SolveReport {
        energy: energy_from_norms(params, &norms),
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

pub(crate) fn clamp_nonneg(x: &mut [f64]) {
    for t in x.iter_mut() {
        if *t < 0.0 {
            *t = 0.0;
        }
    }
}

pub(crate) fn rescale(grid: &Grid, x: &mut [f64], target: f64) {
    let m: f64 = x.iter().zip(&grid.w).map(|(t, w)| w * t * t).sum();
    if m > 0.0 {
        let s = (target / m).sqrt();
        for t in x.iter_mut() {
            *t *= s;
        }
    }
}

/// Weak residual of the coupled KKT system and its row scale.
pub(crate) fn coupled_kkt_residual(
    grid: &Grid,
    k: &SymBanded,
    params: &ProblemParams,
    u: &[f64],
    v: &[f64],
    l1: f64,
    l2: f64,
) -> (f64, f64) {
    let m = grid.len();
    let (mut ku, mut kv) = (vec![0.0; m], vec![0.0; m]);
    k.apply(u, &mut ku);
    k.apply(v, &mut kv);
    let mut res2 = 0.0;
    let mut scale2 = 0.0;
    for i in 0..m - 1 {
        let w = grid.w[i];
        let (lu, lv) = (w * l1 * u[i], w * l2 * v[i]);
        let (fu, fv) = (w * force_u(params, u[i], v[i]), w * force_v(params, u[i], v[i]));
        let (ru, rv) = (ku[i] + lu - fu, kv[i] + lv - fv);
        res2 += ru * ru + rv * rv;
        scale2 += ku[i] * ku[i] + lu * lu + fu * fu + kv[i] * kv[i] + lv * lv + fv * fv;
    }
    (res2.sqrt(), scale2.sqrt().max(f64::MIN_POSITIVE))
}

/// Newton on the two-component KKT system with both mass constraints
/// bordered. Fields are interleaved (u_i, v_i) so the Jacobian is banded
/// with half-bandwidth 4; the 2×2 Schur complement closes the system.
/// Returns the relative weak residual actually achieved (best iterate).
pub(crate) fn coupled_newton_polish(
    grid: &Grid,
    k: &SymBanded,
    params: &ProblemParams,
    u: &mut Vec<f64>,
    v: &mut Vec<f64>,
    l1: &mut f64,
    l2: &mut f64,
) -> Result<f64, LinalgError> {
    let m = grid.len();
    let n = m - 1;
    let dim = 2 * n;
    let mut best_res = f64::INFINITY;
    let mut best = (u.clone(), v.clone(), *l1, *l2);

    for _ in 0..40 {
        let (res, scale) = coupled_kkt_residual(grid, k, params, u, v, *l1, *l2);
        let rel = res / scale;
        if rel < best_res {
            best_res = rel;
            best = (u.clone(), v.clone(), *l1, *l2);
        }
        if rel < NEWTON_RTOL {
            break;
        }

        let mut a = Banded::zeros(dim, 4, 4);
        let (p, q, al, be) = (params.p, params.q, params.alpha, params.beta);
        for i in 0..n {
            let w = grid.w[i];
            let (ui, vi) = (u[i], v[i]);
            // u-row diagonal: K + w(λ₁ − ∂f_u/∂u)
            let dfu_du = params.mu1 * (p - 1.0) * ui.abs().powf(p - 2.0)
                + params.nu * al * (al - 1.0) * ui.abs().powf(al - 2.0) * vi.abs().powf(be);
            let dfv_dv = params.mu2 * (q - 1.0) * vi.abs().powf(q - 2.0)
                + params.nu * be * (be - 1.0) * vi.abs().powf(be - 2.0) * ui.abs().powf(al);
            let cross = params.nu * al * be * signed_pow(ui, al) * signed_pow(vi, be);
            a.add(2 * i, 2 * i, k.d[i] + w * (*l1 - dfu_du));
            a.add(2 * i + 1, 2 * i + 1, k.d[i] + w * (*l2 - dfv_dv));
            a.add(2 * i, 2 * i + 1, -w * cross);
            a.add(2 * i + 1, 2 * i, -w * cross);
            if i + 1 < n {
                a.add(2 * i, 2 * (i + 1), k.e[i]);
                a.add(2 * (i + 1), 2 * i, k.e[i]);
                a.add(2 * i + 1, 2 * (i + 1) + 1, k.e[i]);
                a.add(2 * (i + 1) + 1, 2 * i + 1, k.e[i]);
            }
            if i + 2 < n {
                a.add(2 * i, 2 * (i + 2), k.f[i]);
                a.add(2 * (i + 2), 2 * i, k.f[i]);
                a.add(2 * i + 1, 2 * (i + 2) + 1, k.f[i]);
                a.add(2 * (i + 2) + 1, 2 * i + 1, k.f[i]);
            }
        }

        let mut b1 = vec![0.0; dim];
        let mut b2 = vec![0.0; dim];
        for i in 0..n {
            b1[2 * i] = grid.w[i] * u[i];
            b2[2 * i + 1] = grid.w[i] * v[i];
        }
        let (mut ku, mut kv) = (vec![0.0; m], vec![0.0; m]);
        k.apply(u, &mut ku);
        k.apply(v, &mut kv);
        let mut rhs = vec![0.0; dim];
        for i in 0..n {
            let w = grid.w[i];
            rhs[2 * i] = -(ku[i] + w * (*l1 * u[i] - force_u(params, u[i], v[i])));
            rhs[2 * i + 1] = -(kv[i] + w * (*l2 * v[i] - force_v(params, u[i], v[i])));
        }
        let g1: f64 =
            u.iter().zip(&grid.w).map(|(x, w)| w * x * x).sum::<f64>() - params.a;
        let g2: f64 =
            v.iter().zip(&grid.w).map(|(x, w)| w * x * x).sum::<f64>() - params.b;
        let c = [-0.5 * g1, -0.5 * g2];
        let mut delta = vec![0.0; dim];
        let mut y = [0.0, 0.0];
        if solve_bordered(&mut a, &[b1, b2], &rhs, &c, &mut delta, &mut y).is_err() {
            break;
        }

        let mut damp = 1.0;
        loop {
            let mut tu = u.clone();
            let mut tv = v.clone();
            for i in 0..n {
                tu[i] = (tu[i] + damp * delta[2 * i]).max(0.0);
                tv[i] = (tv[i] + damp * delta[2 * i + 1]).max(0.0);
            }
            let tl1 = *l1 + damp * y[0];
            let tl2 = *l2 + damp * y[1];
            let (r2, s2) = coupled_kkt_residual(grid, k, params, &tu, &tv, tl1, tl2);
            if r2 / s2 < rel || damp < 0.05 {
                *u = tu;
                *v = tv;
                *l1 = tl1;
                *l2 = tl2;
                break;
            }
            damp *= 0.5;
        }
    }

    let (res, scale) = coupled_kkt_residual(grid, k, params, u, v, *l1, *l2);
    if res / scale > best_res {
        let (bu, bv, bl1, bl2) = best;
        *u = bu;
        *v = bv;
        *l1 = bl1;
        *l2 = bl2;
        return Ok(best_res);
    }
    Ok(res / scale)
}

/// One row of a coupling sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub nu: f64,
    pub energy: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// H¹ distance of the minimizer to the decoupled ground-state pair.
    pub h1_dist: f64,
}

/// Track the local minimizer over a list of couplings, solving in
/// descending ν order with warm starts and reporting rows in input order.
/// The H¹ distance is measured against the ν-independent decoupled pair
/// (the two scalar ground states at masses a, b).
pub fn sweep_nu(
    grid: &Arc<Grid>,
    base: &ProblemParams,
    nus: &[f64],
    thresholds: &Thresholds,
    opts: &LocalMinOptions,
) -> Result<Vec<SweepRow>, LocalMinError> {
    let ref_u = solve_ground_state(
        grid,
        &ScalarParams { p: base.p, mu: base.mu1, mass: base.a },
        &ScalarFlowOptions::default(),
    )?;
    let ref_v = solve_ground_state(
        grid,
        &ScalarParams { p: base.q, mu: base.mu2, mass: base.b },
        &ScalarFlowOptions::default(),
    )?;

    let mut order: Vec<usize> = (0..nus.len()).collect();
    order.sort_by(|&i, &j| nus[j].partial_cmp(&nus[i]).unwrap());

    let mut rows: Vec<Option<SweepRow>> = vec![None; nus.len()];
    let mut warm: Option<FieldPair> = None;
    for &idx in &order {
        let params = ProblemParams { nu: nus[idx], ..*base };
        let mut o = opts.clone();
        o.init = warm.take();
        let report = find_local_min(grid, &params, thresholds, &o)?;
        let h1 = h1_distance(&report.state, &ref_u.field, &ref_v.field);
        rows[idx] = Some(SweepRow {
            nu: nus[idx],
            energy: report.energy,
            lambda1: report.lambda1,
            lambda2: report.lambda2,
            h1_dist: h1,
        });
        warm = Some(report.state);
    }
    Ok(rows.into_iter().map(|r| r.expect("all sweep rows are filled")).collect())
}

fn h1_distance(pair: &FieldPair, ref_u: &RadialField, ref_v: &RadialField) -> f64 {
    let g = pair.grid();
    let diff = |a: &[f64], b: &[f64]| -> RadialField {
        RadialField {
            grid: g.clone(),
            values: a.iter().zip(b).map(|(x, y)| x - y).collect(),
        }
    };
    let du = diff(&pair.u.values, &ref_u.values);
    let dv = diff(&pair.v.values, &ref_v.values);
    let h1 = crate::grid::kinetic(&du)
        + crate::grid::lp_norm_p(&du, 2.0).expect("2 >= 1")
        + crate::grid::kinetic(&dv)
        + crate::grid::lp_norm_p(&dv, 2.0).expect("2 >= 1");
    h1.sqrt()
}
