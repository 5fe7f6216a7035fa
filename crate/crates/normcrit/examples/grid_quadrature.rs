//! Mesh plumbing in isolation: build a graded radial mesh, integrate a
//! Gaussian against closed forms, and check that the mass-preserving
//! dilation t⋆u = t^{N/2} u(t·) really preserves mass while scaling the
//! kinetic term by t² and the L^p norms by t^{γ_p} with
//! γ_p = N(p−2)/2.

use std::f64::consts::PI;

use normcrit::grid::{dilate, kinetic, lp_norm_p, make_grid, GridLaw, RadialField};

const NODES: usize = 4096;
const R_MAX: f64 = 30.0;

fn main() {
    let grid = make_grid(3, R_MAX, NODES, GridLaw::Graded { exponent: 4.0 })
        .expect("mesh parameters are valid");
    println!(
        "graded mesh: {} nodes on [0, {}], {} of them inside r = {}",
        grid.len(),
        R_MAX,
        grid.r.iter().filter(|&&r| r <= R_MAX / 100.0).count(),
        R_MAX / 100.0
    );

    // u(r) = exp(-r^2): ||u||_p^p = (pi/p)^{3/2}, ||grad u||_2^2 = 3 (pi/2)^{3/2}
    let u = RadialField::from_fn(grid.clone(), |r| (-r * r).exp());
    println!("\n{:<28} {:>24} {:>24} {:>12}", "quantity", "quadrature", "closed form", "rel err");
    let show = |name: &str, got: f64, want: f64| {
        println!("{name:<28} {got:>24.16e} {want:>24.16e} {:>12.2e}", (got - want).abs() / want);
    };
    for p in [2.0, 3.0, 6.0] {
        let got = lp_norm_p(&u, p).expect("p >= 1");
        show(&format!("integral of |u|^{p}"), got, (PI / p).powf(1.5));
    }
    show("kinetic energy", kinetic(&u), 3.0 * (PI / 2.0).powf(1.5));

    println!("\ndilation t*u = t^{{N/2}} u(t .): invariants at a few t");
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "mass ratio", "kinetic/t^2", "L3 / t^{3/2}");
    let mass0 = lp_norm_p(&u, 2.0).unwrap();
    let kin0 = kinetic(&u);
    let l30 = lp_norm_p(&u, 3.0).unwrap();
    for t in [0.5, 1.0, 2.0, 4.0] {
        let ut = dilate(&u, t).expect("t > 0");
        println!(
            "{t:>8.2} {:>14.10} {:>14.10} {:>14.10}",
            lp_norm_p(&ut, 2.0).unwrap() / mass0,
            kinetic(&ut) / (t * t) / kin0,
            lp_norm_p(&ut, 3.0).unwrap() / t.powf(1.5) / l30
        );
    }
    println!("\n(all three columns should be 1 up to interpolation error)");
}
