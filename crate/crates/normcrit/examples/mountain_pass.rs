//! Compute the second, mountain-pass solution: seed a test pair near the
//! maximum of the bubble fiber curve, retract every iterate onto the
//! unstable Pohozaev branch P⁻, and descend the constrained energy until
//! the projected gradient stalls at the mesh plateau; a bordered Newton
//! polish then sharpens the critical point.  The converged level M must
//! land in the window 0 < k₀ ≤ M < m + cap and the state must satisfy the
//! same stationarity contract as the minimizer.

use normcrit::bubble::{cap_increment, test_pair, verify_level_gap};
use normcrit::functionals::{energy, Constants, ProblemParams};
use normcrit::grid::{make_grid, GridLaw};
use normcrit::localmin::{compute_thresholds, find_local_min, LocalMinOptions};
use normcrit::mountain::{find_mountain_pass, MountainOptions};

/// Frozen N = 3 constants (see the `constants_bootstrap` example).
const S3: f64 = 5.477904089531332;
const C3: f64 = 0.17475367811213670;

const NODES: usize = 2048;
const R_MAX: f64 = 50.0;
/// Concentration index of the seed bubble (any deep index works; the
/// descent forgets the seed's fine structure).
const SEED_INDEX: u32 = 1024;

fn main() {
    let params = ProblemParams {
        dim: 3,
        p: 3.0,
        q: 3.0,
        alpha: 3.0,
        beta: 3.0,
        mu1: 1.0,
        mu2: 1.0,
        nu: 0.01,
        a: 25.0,
        b: 25.0,
    };
    let constants = Constants { sobolev_s: S3, gn_c: vec![(3.0, C3)] };
    let thresholds = compute_thresholds(&params, &constants).expect("thresholds exist");
    let grid = make_grid(params.dim, R_MAX, NODES, GridLaw::Graded { exponent: 4.0 })
        .expect("mesh parameters are valid");

    let minimizer = find_local_min(&grid, &params, &thresholds, &LocalMinOptions::default())
        .expect("descent converges");
    let m = energy(&params, &minimizer.state);
    let cap = cap_increment(&params, &constants);

    let gap = verify_level_gap(&params, &minimizer.state, &constants, SEED_INDEX)
        .expect("fiber curve has an interior maximum");
    let seed = test_pair(&params, &minimizer.state, SEED_INDEX, gap.t_n).expect("seed builds");
    println!("seed: bubble index {SEED_INDEX} at fiber maximum t_n = {:.6}", gap.t_n);

    let opts = MountainOptions { k0: thresholds.k0, window: Some((m, cap)), ..Default::default() };
    let report = find_mountain_pass(&grid, &params, &seed, &opts).expect("pass-level descent converges");
    let s = report.summary(&params);

    println!("\nmountain-pass level  M = {:.12e}", s.energy);
    println!("window               {:.3e} < M < {:.10e}", thresholds.k0, m + cap);
    println!("minimizer level      m = {:.10e} < 0 < M", m);
    println!("multipliers          lambda1 = {:.8}  lambda2 = {:.8}", s.lambda1, s.lambda2);
    println!("mass errors          {:.2e}  {:.2e}", s.mass_error_u, s.mass_error_v);
    println!("Pohozaev             |P| = {:.2e}  vs kinetic sum {:.6e}", s.pohozaev_residual.abs(), s.kinetic_u + s.kinetic_v);
    println!("iterations           {}", s.iterations);

    assert!(s.converged && s.energy > 0.0 && m < 0.0);
    assert!(thresholds.k0 < s.energy && s.energy < m + cap);
    assert!(s.pohozaev_residual.abs() <= 1e-4 * (s.kinetic_u + s.kinetic_v));
    println!("\nsecond solution certified: a genuine saddle above the ground level.");
}
