//! # Coupled rearrangement of two radial profiles
//!
//! The subadditivity of the ground level in the masses rests on a joint
//! symmetrization: given nonnegative u, v vanishing at infinity, `{u,v}*`
//! is the radial non-increasing profile whose superlevel set at height t
//! is the centered ball with
//!
//! ```text
//!   |{ {u,v}* > t }| = |{u > t}| + |{v > t}|.
//! ```
//!
//! For radial non-increasing inputs the superlevel sets are balls already,
//! so the construction reduces to composing radii: if r_u(t) is the radius
//! of {u > t}, the rearranged radius is r_*(t) = (r_u(t)^N + r_v(t)^N)^{1/N},
//! and the profile is recovered by inverting the non-increasing map
//! t ↦ r_*(t) with a bisection per mesh node.
//!
//! Key identities verified here (on equal grids, fields vanishing well
//! inside r_max so the 2^{1/N}-dilated support still fits):
//!
//! * L^p additivity: ‖{u,v}*‖_p^p = ‖u‖_p^p + ‖v‖_p^p (exact in the
//!   continuum — level sets just add — checked to quadrature accuracy);
//! * power-map equivariance: {u^κ, v^κ}* = ({u,v}*)^κ;
//! * kinetic contraction: ‖∇{u,v}*‖₂² ≤ ‖∇u‖₂² + ‖∇v‖₂², strict for
//!   positive decreasing smooth inputs;
//! * pairing/cross-term domination: ∫u₁^αv₁^β + u₂^αv₂^β ≤
//!   ∫({u₁,u₂}*)^α({v₁,v₂}*)^β, the step that makes the ground level
//!   subadditive in the pair of masses.

use std::sync::Arc;

use thiserror::Error;

use crate::grid::{kinetic, lp_norm_p, FieldPair, GridError, RadialField};
use crate::scans::ScanReport;

/// Inputs must be non-increasing and nonnegative within this tolerance,
/// relative to their peak value.
pub const MONOTONE_RTOL: f64 = 1e-9;
/// Bisection iterations per node when inverting the radius map (each
/// halves the value bracket, so 80 reaches the f64 floor from any scale).
const INVERT_ITERS: usize = 80;
/// Relative tolerance of the L^p additivity identity (set by trapezoid
/// quadrature on the solver grids, not by the construction).
pub const LEVEL_RTOL: f64 = 1e-3;
/// Number of sampled heights for the superlevel-measure invariant.
pub const LEVEL_SAMPLES: usize = 64;

#[derive(Debug, Error)]
pub enum RearrangeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// A validated non-increasing sample vector with O(log m) superlevel radii.
struct Decreasing<'a> {
    r: &'a [f64],
    vals: Vec<f64>,
}

impl<'a> Decreasing<'a> {
    fn new(f: &'a RadialField, label: &str) -> Result<Self, RearrangeError> {
        let peak = f.values.iter().cloned().fold(0.0, f64::max);
        let tol = MONOTONE_RTOL * (peak + f64::MIN_POSITIVE);
        if f.values.iter().any(|&x| x < -tol) {
            return Err(RearrangeError::InvalidArgument(format!(
                "{label} must be nonnegative within {MONOTONE_RTOL:.0e} of its peak"
            )));
        }
        if f.values.windows(2).any(|w| w[1] > w[0] + tol) {
            return Err(RearrangeError::InvalidArgument(format!(
                "{label} must be non-increasing within {MONOTONE_RTOL:.0e} of its peak"
            )));
        }
        // clamp the tolerated wiggle away so binary search sees a truly
        // monotone sequence
        let mut vals = Vec::with_capacity(f.values.len());
        let mut running = f64::INFINITY;
        for &x in &f.values {
            running = running.min(x.max(0.0));
            vals.push(running);
        }
        Ok(Self { r: &f.grid.r, vals })
    }

    fn peak(&self) -> f64 {
        self.vals[0]
    }

    /// sup{r : f(r) > t} for the piecewise-linear interpolant; 0 when the
    /// peak does not exceed t.
    fn radius(&self, t: f64) -> f64 {
        if t >= self.vals[0] {
            return 0.0;
        }
        // first index with vals[i] <= t; exists because the last node is 0
        let i = self.vals.partition_point(|&x| x > t);
        let (r0, r1) = (self.r[i - 1], self.r[i]);
        let (f0, f1) = (self.vals[i - 1], self.vals[i]);
        r0 + (f0 - t) / (f0 - f1) * (r1 - r0)
    }

    /// Radius of the support, the t → 0⁺ limit of [`Self::radius`].
    fn support(&self) -> f64 {
        let i = self.vals.partition_point(|&x| x > 0.0);
        self.r[i]
    }
}

/// Compose two nonnegative radial non-increasing profiles into their
/// coupled rearrangement on the shared grid.
///
/// Each node value is `sup{t : r_*(t) > r_i}` with
/// r_*(t) = (r_u(t)^N + r_v(t)^N)^{1/N}, found by bisection on the
/// monotone radius map. The composed support reaches 2^{1/N}·max support,
/// so inputs must vanish comfortably inside r_max or the tail is truncated
/// at the boundary node (which is always pinned to zero).
pub fn coupled_rearrange(
    u: &RadialField,
    v: &RadialField,
) -> Result<RadialField, RearrangeError> {
    if !Arc::ptr_eq(&u.grid, &v.grid) {
        return Err(RearrangeError::GridMismatch);
    }
    let grid = u.grid.clone();
    let du = Decreasing::new(u, "u")?;
    let dv = Decreasing::new(v, "v")?;
    let n = grid.dim as f64;
    let radius = |t: f64| -> f64 {
        let (ru, rv) = (du.radius(t), dv.radius(t));
        (ru.powf(n) + rv.powf(n)).powf(1.0 / n)
    };
    let top = du.peak().max(dv.peak());
    let support = (du.support().powf(n) + dv.support().powf(n)).powf(1.0 / n);

    let m = grid.len();
    let mut values = vec![0.0; m];
    values[0] = top;
    for (i, out) in values.iter_mut().enumerate().skip(1) {
        let ri = grid.r[i];
        if ri >= support {
            *out = 0.0;
            continue;
        }
        let (mut lo, mut hi) = (0.0, top);
        for _ in 0..INVERT_ITERS {
            let mid = 0.5 * (lo + hi);
            if radius(mid) > ri {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        *out = 0.5 * (lo + hi);
    }
    values[m - 1] = 0.0;
    Ok(RadialField::new(grid, values)?)
}

/// Check the coupled-rearrangement inequalities on a list of pair-pairs
/// ((u₁,v₁), (u₂,v₂)) with coupling exponents (α, β):
///
/// * L² and L^p additivity of `{·,·}*` within [`LEVEL_RTOL`] (margin =
///   tolerance − relative error, p ∈ {2, 3});
/// * kinetic contraction for {u₁,u₂}* and {v₁,v₂}* (relative margin > 0);
/// * cross-term domination ∫u₁^αv₁^β + u₂^αv₂^β ≤ ∫u*^α v*^β;
/// * the plain pairing inequality (the α = β = 1 specialization).
pub fn verify_rearrangement_inequalities(
    quads: &[(FieldPair, FieldPair)],
    alpha: f64,
    beta: f64,
) -> Result<ScanReport, RearrangeError> {
    if !(alpha >= 1.0 && beta >= 1.0) {
        return Err(RearrangeError::InvalidArgument(format!(
            "need alpha, beta >= 1 (got {alpha}, {beta})"
        )));
    }
    let mut report = ScanReport {
        lemma_id: "rearrangement".to_string(),
        samples: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
        witness: Vec::new(),
    };
    for (idx, (first, second)) in quads.iter().enumerate() {
        let (u1, v1) = (&first.u, &first.v);
        let (u2, v2) = (&second.u, &second.v);
        let grid = u1.grid.clone();
        let u_star = coupled_rearrange(u1, u2)?;
        let v_star = coupled_rearrange(v1, v2)?;
        let i = idx as f64;

        // additivity of L^p masses (equality up to quadrature), both slots
        for p in [2.0, 3.0] {
            let sum_u = lp_norm_p(u1, p)? + lp_norm_p(u2, p)?;
            let rel_u = (lp_norm_p(&u_star, p)? - sum_u).abs() / sum_u;
            report.track(LEVEL_RTOL - rel_u, &[i, 1.0, p]);
            let sum_v = lp_norm_p(v1, p)? + lp_norm_p(v2, p)?;
            let rel_v = (lp_norm_p(&v_star, p)? - sum_v).abs() / sum_v;
            report.track(LEVEL_RTOL - rel_v, &[i, 1.5, p]);
        }

        // kinetic contraction, strict for distinct positive inputs
        let ksum_u = kinetic(u1) + kinetic(u2);
        report.track((ksum_u - kinetic(&u_star)) / ksum_u, &[i, 2.0, 0.0]);
        let ksum_v = kinetic(v1) + kinetic(v2);
        report.track((ksum_v - kinetic(&v_star)) / ksum_v, &[i, 2.0, 1.0]);

        // cross-term and pairing domination
        let couple = |a: &RadialField, b: &RadialField, ea: f64, eb: f64| -> f64 {
            let g: Vec<f64> = a
                .values
                .iter()
                .zip(&b.values)
                .map(|(ai, bi)| ai.max(0.0).powf(ea) * bi.max(0.0).powf(eb))
                .collect();
            crate::grid::integrate_radial(&g, &grid)
        };
        let lhs_cross = couple(u1, v1, alpha, beta) + couple(u2, v2, alpha, beta);
        let rhs_cross = couple(&u_star, &v_star, alpha, beta);
        let scale_cross = lhs_cross.abs().max(rhs_cross.abs()).max(f64::MIN_POSITIVE);
        report.track((rhs_cross - lhs_cross) / scale_cross, &[i, 3.0, 0.0]);

        let lhs_pair = couple(u1, v1, 1.0, 1.0) + couple(u2, v2, 1.0, 1.0);
        let rhs_pair = couple(&u_star, &v_star, 1.0, 1.0);
        let scale_pair = lhs_pair.abs().max(rhs_pair.abs()).max(f64::MIN_POSITIVE);
        report.track((rhs_pair - lhs_pair) / scale_pair, &[i, 4.0, 0.0]);
    }
    Ok(report)
}

/// Relative defect of the superlevel-measure identity
/// |{ {u,v}* > t }| = |{u > t}| + |{v > t}| at `samples` heights spread
/// over (0, max peak). Exposed for the invariants test and diagnostics.
pub fn superlevel_measure_defect(
    u: &RadialField,
    v: &RadialField,
    star: &RadialField,
    samples: usize,
) -> Result<f64, RearrangeError> {
    let du = Decreasing::new(u, "u")?;
    let dv = Decreasing::new(v, "v")?;
    let ds = Decreasing::new(star, "{u,v}*")?;
    let n = u.grid.dim as f64;
    let top = du.peak().max(dv.peak());
    let mut worst = 0.0f64;
    for k in 1..=samples {
        let t = top * k as f64 / (samples + 1) as f64;
        let target = du.radius(t).powf(n) + dv.radius(t).powf(n);
        if target == 0.0 {
            continue;
        }
        let got = ds.radius(t).powf(n);
        worst = worst.max((got - target).abs() / target);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    use crate::grid::{make_grid, Grid, GridLaw};
    use proptest::prelude::*;

    fn test_grid() -> Arc<Grid> {
        static GRID: OnceLock<Arc<Grid>> = OnceLock::new();
        GRID.get_or_init(|| make_grid(3, 50.0, 2048, GridLaw::Graded { exponent: 4.0 }).unwrap())
            .clone()
    }

    fn gaussian(width: f64, amp: f64) -> RadialField {
        RadialField::from_fn(test_grid(), |r| amp * (-(r / width).powi(2)).exp())
    }

    #[test]
    fn pairing_with_zero_recovers_the_input() {
        let f = gaussian(1.5, 2.0);
        let z = RadialField::zeros(test_grid());
        let star = coupled_rearrange(&f, &z).unwrap();
        let peak = f.values[0];
        for (a, b) in star.values.iter().zip(&f.values) {
            assert!((a - b).abs() <= 1e-9 * peak, "{a} vs {b}");
        }
    }

    #[test]
    fn equal_pair_is_a_radial_dilation() {
        // {f,f}* pushes each level-ball to twice its volume, so the profile
        // is exactly f(r / 2^{1/N})
        let f = gaussian(1.0, 1.0);
        let star = coupled_rearrange(&f, &f).unwrap();
        let c = 2f64.powf(1.0 / 3.0);
        let peak = f.values[0];
        for (i, &r) in test_grid().r.iter().enumerate() {
            let expect = (-(r / c).powi(2)).exp();
            assert!(
                (star.values[i] - expect).abs() <= 1e-3 * peak,
                "at r = {r}: {} vs {expect}",
                star.values[i]
            );
        }
        // closed-form norm scalings of the dilation
        let l2 = lp_norm_p(&star, 2.0).unwrap();
        let l2_f = lp_norm_p(&f, 2.0).unwrap();
        assert!((l2 - 2.0 * l2_f).abs() < LEVEL_RTOL * l2_f);
        let k = kinetic(&star);
        let k_f = kinetic(&f);
        assert!((k - c * k_f).abs() < 3e-3 * k_f, "kinetic {k} vs {}", c * k_f);
    }

    #[test]
    fn lp_masses_add_for_unequal_gaussians() {
        let f = gaussian(0.7, 3.0);
        let g = gaussian(2.1, 0.8);
        let star = coupled_rearrange(&f, &g).unwrap();
        for p in [1.5, 2.0, 3.0, 4.0] {
            let sum = lp_norm_p(&f, p).unwrap() + lp_norm_p(&g, p).unwrap();
            let got = lp_norm_p(&star, p).unwrap();
            assert!(
                (got - sum).abs() <= LEVEL_RTOL * sum,
                "p = {p}: {got} vs {sum}"
            );
        }
    }

    #[test]
    fn superlevel_measures_are_preserved() {
        let f = gaussian(0.9, 2.5);
        let g = gaussian(1.7, 1.0);
        let star = coupled_rearrange(&f, &g).unwrap();
        let defect = superlevel_measure_defect(&f, &g, &star, LEVEL_SAMPLES).unwrap();
        assert!(defect <= LEVEL_RTOL, "worst relative measure defect {defect}");
    }

    #[test]
    fn power_maps_commute_with_the_rearrangement() {
        let f = gaussian(0.8, 1.9);
        let g = gaussian(1.6, 0.9);
        let kappa = 3.0;
        let star_pow = {
            let star = coupled_rearrange(&f, &g).unwrap();
            RadialField::from_fn(test_grid(), |r| star.interp(r).powf(kappa))
        };
        let pow_star = {
            let fp = RadialField::from_fn(test_grid(), |r| f.interp(r).powf(kappa));
            let gp = RadialField::from_fn(test_grid(), |r| g.interp(r).powf(kappa));
            coupled_rearrange(&fp, &gp).unwrap()
        };
        let peak = star_pow.values[0];
        for (a, b) in star_pow.values.iter().zip(&pow_star.values) {
            assert!((a - b).abs() <= 1e-3 * peak, "{a} vs {b}");
        }
    }

    #[test]
    fn inequality_suite_on_gaussian_quadruples() {
        let quads = vec![
            (
                FieldPair::new(gaussian(0.7, 2.0), gaussian(1.1, 1.5)).unwrap(),
                FieldPair::new(gaussian(1.9, 0.6), gaussian(0.5, 2.4)).unwrap(),
            ),
            (
                FieldPair::new(gaussian(1.0, 1.0), gaussian(1.0, 1.0)).unwrap(),
                FieldPair::new(gaussian(2.0, 0.5), gaussian(0.8, 1.2)).unwrap(),
            ),
        ];
        let report = verify_rearrangement_inequalities(&quads, 3.0, 3.0).unwrap();
        assert_eq!(report.violations, 0, "worst {}", report.worst_margin);
        assert!(report.worst_margin > 0.0, "all inequalities strict here");
        assert_eq!(report.samples, 2 * 8);
    }

    #[test]
    fn gradient_contraction_is_strict_for_equal_pairs() {
        // ‖∇{f,f}*‖² = 2^{(N−2)/N}‖∇f‖² < 2‖∇f‖²: margin ≈ 1 − 2^{−2/3}
        let f = gaussian(1.2, 1.0);
        let star = coupled_rearrange(&f, &f).unwrap();
        let margin = (2.0 * kinetic(&f) - kinetic(&star)) / (2.0 * kinetic(&f));
        let expect = 1.0 - 2f64.powf(-2.0 / 3.0);
        assert!((margin - expect).abs() < 1e-3, "margin {margin} vs {expect}");
    }

    #[test]
    fn degenerate_zero_component_is_tolerated() {
        let quads = vec![(
            FieldPair::new(gaussian(1.0, 1.0), gaussian(1.3, 0.9)).unwrap(),
            FieldPair::new(RadialField::zeros(test_grid()), gaussian(0.9, 1.1)).unwrap(),
        )];
        let report = verify_rearrangement_inequalities(&quads, 3.0, 3.0).unwrap();
        assert_eq!(report.violations, 0, "worst {}", report.worst_margin);
        assert!(report.worst_margin > -SCAN_SLACK_LOCAL);
    }
    const SCAN_SLACK_LOCAL: f64 = 1e-12;

    #[test]
    fn monotone_violations_are_rejected() {
        let grid = test_grid();
        let rising = RadialField::from_fn(grid.clone(), |r| {
            if r < 40.0 {
                r * (-(r / 8.0)).exp()
            } else {
                0.0
            }
        });
        let ok = gaussian(1.0, 1.0);
        assert!(matches!(
            coupled_rearrange(&rising, &ok),
            Err(RearrangeError::InvalidArgument(_))
        ));
        let negative = RadialField::from_fn(grid, |r| if r < 1.0 { -1.0 } else { 0.0 });
        assert!(matches!(
            coupled_rearrange(&negative, &ok),
            Err(RearrangeError::InvalidArgument(_))
        ));
    }

    #[test]
    fn foreign_grids_are_rejected() {
        let f = gaussian(1.0, 1.0);
        let other = make_grid(3, 50.0, 1024, GridLaw::Graded { exponent: 4.0 }).unwrap();
        let g = RadialField::from_fn(other, |r| (-r * r).exp());
        assert!(matches!(coupled_rearrange(&f, &g), Err(RearrangeError::GridMismatch)));
    }

    #[test]
    fn four_dimensional_volumes_compose_too() {
        let grid = make_grid(4, 40.0, 1024, GridLaw::Graded { exponent: 4.0 }).unwrap();
        let f = RadialField::from_fn(grid.clone(), |r| 2.0 * (-(r / 1.2).powi(2)).exp());
        let g = RadialField::from_fn(grid, |r| (-(r / 2.2).powi(2)).exp());
        let star = coupled_rearrange(&f, &g).unwrap();
        let defect = superlevel_measure_defect(&f, &g, &star, LEVEL_SAMPLES).unwrap();
        assert!(defect <= LEVEL_RTOL, "defect {defect}");
        let sum = lp_norm_p(&f, 2.0).unwrap() + lp_norm_p(&g, 2.0).unwrap();
        let got = lp_norm_p(&star, 2.0).unwrap();
        assert!((got - sum).abs() <= LEVEL_RTOL * sum);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn additivity_holds_for_random_gaussian_pairs(
            w1 in 0.4f64..2.5,
            w2 in 0.4f64..2.5,
            a1 in 0.2f64..4.0,
            a2 in 0.2f64..4.0,
            p in 1.2f64..4.0,
        ) {
            let f = gaussian(w1, a1);
            let g = gaussian(w2, a2);
            let star = coupled_rearrange(&f, &g).unwrap();
            let sum = lp_norm_p(&f, p).unwrap() + lp_norm_p(&g, p).unwrap();
            let got = lp_norm_p(&star, p).unwrap();
            prop_assert!((got - sum).abs() <= LEVEL_RTOL * sum,
                "p = {}: {} vs {}", p, got, sum);
        }
    }
}
