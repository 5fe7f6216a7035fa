//! Find the local minimizer of the coupled energy inside its kinetic ball
//! and verify the contract on the result: prescribed masses hit to 1e−8,
//! vanishing Pohozaev identity, positive multipliers with
//! λ₁a + λ₂b > 0, and Schwartz-symmetric (positive, radially
//! non-increasing) profiles.  Masses a = b = 25 keep the run at a few
//! seconds while leaving the energy scale comfortably above f64 noise.

use normcrit::functionals::{Constants, ProblemParams};
use normcrit::grid::{is_schwartz, make_grid, GridLaw, SCHWARTZ_TOL};
use normcrit::localmin::{compute_thresholds, find_local_min, LocalMinOptions};

/// Frozen N = 3 constants: S = 3(π/2)^{4/3} and C₃ = 2/√M_W, both
/// reproduced to 6+ digits by the `constants_bootstrap` example.
const S3: f64 = 5.477904089531332;
const C3: f64 = 0.17475367811213670;

const NODES: usize = 2048;
const R_MAX: f64 = 50.0;

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
    println!("thresholds: rho0 = {:.6e}  nu0 = {:.6e}  k0 = {:.6e}", thresholds.rho0, thresholds.nu0, thresholds.k0);
    println!("coupling nu = {} {} nu0\n", params.nu, if params.nu < thresholds.nu0 { "<" } else { ">=" });

    let grid = make_grid(params.dim, R_MAX, NODES, GridLaw::Graded { exponent: 4.0 })
        .expect("mesh parameters are valid");
    let report =
        find_local_min(&grid, &params, &thresholds, &LocalMinOptions::default()).expect("descent converges");
    let s = report.summary(&params);

    println!("energy          m(a,b) = {:.12e}   (must be < 0)", s.energy);
    println!("multipliers     lambda1 = {:.8}  lambda2 = {:.8}", s.lambda1, s.lambda2);
    println!("                lambda1 a + lambda2 b = {:.6e}   (must be > 0)", s.lambda1 * params.a + s.lambda2 * params.b);
    println!("mass errors     {:.2e}  {:.2e}", s.mass_error_u, s.mass_error_v);
    println!("Pohozaev        |P| = {:.2e}   vs kinetic sum {:.6e}", s.pohozaev_residual.abs(), s.kinetic_u + s.kinetic_v);
    println!("KKT residual    {:.2e}   in {} iterations", s.kkt_residual, s.iterations);
    println!(
        "profiles        u Schwartz: {}   v Schwartz: {}",
        is_schwartz(&report.state.u, SCHWARTZ_TOL),
        is_schwartz(&report.state.v, SCHWARTZ_TOL)
    );

    assert!(s.converged && s.energy < 0.0 && s.lambda1 > 0.0 && s.lambda2 > 0.0);
    assert!(s.pohozaev_residual.abs() <= 1e-5 * (s.kinetic_u + s.kinetic_v));
    println!("\nlocal minimizer certified inside the kinetic ball of radius rho0.");
}
