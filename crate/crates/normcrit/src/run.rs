//! # Reproducible run harness behind the `normcrit` binary
//!
//! Each subcommand is one experiment: it reads a validated [`RunConfig`],
//! produces its CSV/JSON artifacts in the output directory, and records a
//! `manifest.json` with the config digest, seed, wall time, outcome and
//! the artifact list. Runs are deterministic: the same config file and
//! seed reproduce byte-identical CSVs (floats are written as `{:.17e}`,
//! randomized scans are ChaCha-seeded, and every parallel reduction
//! collects by index before folding), so a manifest plus a config file is
//! a complete reproduction recipe. Only `wall_seconds` varies between
//! identical runs.
//!
//! Artifact names are fixed per subcommand:
//!
//! | subcommand      | artifacts                                      |
//! |-----------------|------------------------------------------------|
//! | `solve-local`   | `local_report.json`, `local_u.csv`, `local_v.csv` |
//! | `solve-mp`      | `mp_report.json`, `mp_u.csv`, `mp_v.csv`       |
//! | `verify-bubble` | `asymptotics.csv`                              |
//! | `verify-gap`    | `gap.csv`                                      |
//! | `verify-lemmas` | `lemmas.csv`                                   |
//! | `sweep-nu`      | `sweep.csv`                                    |
//! | `constants`     | `constants.json`                               |
//!
//! Failures exit nonzero with a class-specific code: 2 for configuration
//! problems (parse errors, invalid parameters, meshes the grid contract
//! rejects), 3 when a solver or fit does not converge, 4 when a computed
//! energy level lands outside its admissible window, 5 when an inequality
//! scan records a violation. Gated subcommands write their table *before*
//! failing, so the offending rows are always on disk for inspection.
//!
//! A lock file (`.lock`) makes the output directory single-writer; a
//! crashed run leaves the lock behind on purpose — its pid identifies the
//! owner, and removing it is an explicit operator action.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bubble::{
    bubble_asymptotics, cap_increment, test_pair, tstar, verify_level_gap, AsymptoticsRow,
    BubbleError, GapReport,
};
use crate::config::{parse_config_str, ConfigError, RunConfig};
use crate::functionals::{Constants, ReportSummary, SolveReport};
use crate::grid::{make_grid, write_field_csv, FieldPair, Grid, GridError, RadialField};
use crate::localmin::{compute_thresholds, find_local_min, sweep_nu, LocalMinError, Thresholds};
use crate::mountain::{find_mountain_pass, MountainError};
use crate::rearrange::{verify_rearrangement_inequalities, RearrangeError};
use crate::scalar::ScalarError;
use crate::scans::{
    scan_cross_term, scan_interaction_lower, scan_taylor_tail, two_root_suite, ScanError,
    ScanReport,
};

/// Concentration index of the mountain-pass seed bubble: large enough that
/// the mass-normalization correction t²‖Θ_n‖₂²/a stays small for any O(1)
/// masses, so the seeded fiber always carries an unstable branch.
pub const MP_SEED_INDEX: u32 = 1024;
/// Bubble lists are extended to at least this many distinct indices before
/// an asymptotic fit (two points fix a slope; five resolve curvature).
pub const FIT_MIN_INDICES: usize = 5;
/// ... spanning at least this ratio between smallest and largest index.
pub const FIT_MIN_SPAN: f64 = 8.0;
/// Box (L₁, L₂) and linear coefficient A₁ for the interaction-remainder
/// scans run by `verify-lemmas` (same compact box the in-module tests
/// exercise; A₁ < (α+β)L₁ holds for every critical pair down to N = 5).
pub const INTERACTION_BOX: (f64, f64, f64) = (0.5, 2.0, 1.0);
/// Tail exponents scanned by `verify-lemmas` (the remainder lemma needs
/// η > 2; these bracket the resonant N = 3 value η = 3).
pub const TAYLOR_ETAS: [f64; 3] = [2.5, 3.0, 4.0];
/// Cross-term exponent pairs scanned by `verify-lemmas`: the symmetric
/// critical splits for N = 3, 4, 5 plus two asymmetric N = 3 splits.
pub const CROSS_PAIRS: [(f64, f64); 5] =
    [(3.0, 3.0), (2.0, 2.0), (5.0 / 3.0, 5.0 / 3.0), (4.5, 1.5), (2.5, 3.5)];
/// Tuple count for the fiber two-root scan.
pub const TWO_ROOT_TUPLES: usize = 1000;

/// The seven experiments the binary exposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    SolveLocal,
    SolveMp,
    VerifyBubble,
    VerifyGap,
    VerifyLemmas,
    SweepNu,
    Constants,
}

impl Subcommand {
    /// All subcommands in display order.
    pub const ALL: [Subcommand; 7] = [
        Subcommand::SolveLocal,
        Subcommand::SolveMp,
        Subcommand::VerifyBubble,
        Subcommand::VerifyGap,
        Subcommand::VerifyLemmas,
        Subcommand::SweepNu,
        Subcommand::Constants,
    ];

    /// Kebab-case name used on the command line and in manifests.
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::SolveLocal => "solve-local",
            Subcommand::SolveMp => "solve-mp",
            Subcommand::VerifyBubble => "verify-bubble",
            Subcommand::VerifyGap => "verify-gap",
            Subcommand::VerifyLemmas => "verify-lemmas",
            Subcommand::SweepNu => "sweep-nu",
            Subcommand::Constants => "constants",
        }
    }

    /// Inverse of [`Subcommand::name`].
    pub fn from_name(name: &str) -> Option<Subcommand> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("configuration: cannot build the requested mesh: {0}")]
    Mesh(GridError),
    #[error("configuration: {0}")]
    Invalid(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("level violation: {0}")]
    LevelViolation(String),
    #[error("scan violation: `{lemma_id}` has {violations} violations (worst margin {worst_margin:.3e}), see {ledger}")]
    ScanViolation { lemma_id: String, violations: usize, worst_margin: f64, ledger: String },
    #[error("output directory is owned by another run (lock file {0} exists)")]
    Locked(PathBuf),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit code for the error class: 2 configuration, 3 solver
    /// non-convergence, 4 level-window violation, 5 scan violation, 1 for
    /// environment problems (locks, artifact i/o).
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Mesh(_) | RunError::Invalid(_) => 2,
            RunError::NoConvergence(_) => 3,
            RunError::LevelViolation(_) => 4,
            RunError::ScanViolation { .. } => 5,
            RunError::Locked(_) | RunError::Io(_) => 1,
        }
    }
}

impl From<LocalMinError> for RunError {
    fn from(e: LocalMinError) -> Self {
        match e {
            LocalMinError::Invalid(_)
            | LocalMinError::MissingConstant(_)
            | LocalMinError::SearchFailure { .. }
            | LocalMinError::ForeignGrid => RunError::Invalid(e.to_string()),
            LocalMinError::Grid(g) => RunError::Mesh(g),
            LocalMinError::Scalar(s) => s.into(),
            LocalMinError::Linalg(_)
            | LocalMinError::BallExit { .. }
            | LocalMinError::NoConvergence { .. } => RunError::NoConvergence(e.to_string()),
        }
    }
}

impl From<ScalarError> for RunError {
    fn from(e: ScalarError) -> Self {
        match e {
            ScalarError::Invalid(_) => RunError::Invalid(e.to_string()),
            ScalarError::Grid(g) => RunError::Mesh(g),
            ScalarError::Linalg(_) | ScalarError::NoConvergence { .. } => {
                RunError::NoConvergence(e.to_string())
            }
        }
    }
}

impl From<MountainError> for RunError {
    fn from(e: MountainError) -> Self {
        match e {
            MountainError::Invalid(_) | MountainError::EmptyComponent | MountainError::ForeignGrid => {
                RunError::Invalid(e.to_string())
            }
            MountainError::Grid(g) => RunError::Mesh(g),
            MountainError::LevelViolation { .. } => RunError::LevelViolation(e.to_string()),
            MountainError::NoPminus
            | MountainError::FellToMinimizer { .. }
            | MountainError::NoConvergence { .. }
            | MountainError::Projection { .. }
            | MountainError::Linalg(_) => RunError::NoConvergence(e.to_string()),
        }
    }
}

impl From<BubbleError> for RunError {
    fn from(e: BubbleError) -> Self {
        match e {
            BubbleError::InvalidArgument(_) | BubbleError::Resolution { .. } => {
                RunError::Invalid(e.to_string())
            }
            BubbleError::Grid(g) => RunError::Mesh(g),
            // a curve that never turns over cannot certify its level window
            BubbleError::NoInteriorMax { .. } | BubbleError::EndpointSearchFailure { .. } => {
                RunError::LevelViolation(e.to_string())
            }
            BubbleError::FitFailure { .. } => RunError::NoConvergence(e.to_string()),
        }
    }
}

impl From<ScanError> for RunError {
    fn from(e: ScanError) -> Self {
        RunError::Invalid(e.to_string())
    }
}

impl From<RearrangeError> for RunError {
    fn from(e: RearrangeError) -> Self {
        match e {
            RearrangeError::Grid(g) => RunError::Mesh(g),
            other => RunError::Invalid(other.to_string()),
        }
    }
}

/// Reproduction record written next to the artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub subcommand: String,
    pub config_sha256: String,
    pub seed: u64,
    pub wall_seconds: f64,
    /// `"ok"`, or `"failed: <reason>"` when the run errored after taking
    /// ownership of the output directory.
    pub status: String,
    /// Artifact file names relative to the manifest's directory; every
    /// listed file exists when `status` is `"ok"`.
    pub artifacts: Vec<String>,
}

/// A successful run: the manifest and where it was written.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

/// Exclusive ownership of an output directory for the duration of a run.
#[derive(Debug)]
struct LockGuard {
    path: PathBuf,
}

impl LockGuard {
    fn acquire(dir: &Path) -> Result<Self, RunError> {
        let path = dir.join(".lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                // owner pid, for the operator deciding whether a leftover
                // lock is stale
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(RunError::Locked(path))
            }
            Err(e) => Err(RunError::Io(e)),
        }
    }
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| RunError::Invalid(format!("serialization: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Run one subcommand end to end: read and validate the config, apply the
/// CLI overrides, take the output-directory lock, execute, and leave a
/// manifest behind (status `"failed: …"` on error, with whatever artifacts
/// were completed before the failure).
pub fn run_subcommand(
    sub: Subcommand,
    config_path: &Path,
    out_override: Option<&Path>,
    seed_override: Option<u64>,
) -> Result<RunOutcome, RunError> {
    let bytes = fs::read(config_path).map_err(|e| RunError::Config(ConfigError::Io(e)))?;
    let config_sha256 = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|e| RunError::Invalid(format!("config is not UTF-8: {e}")))?;
    let mut cfg = parse_config_str(&text)?;
    if let Some(out) = out_override {
        cfg.output_dir = out.to_path_buf();
    }
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }

    fs::create_dir_all(&cfg.output_dir)?;
    let _lock = LockGuard::acquire(&cfg.output_dir)?;

    let started = Instant::now();
    let mut artifacts: Vec<String> = Vec::new();
    let result = dispatch(sub, &cfg, &mut artifacts);

    let manifest = Manifest {
        subcommand: sub.name().to_string(),
        config_sha256,
        seed: cfg.seed,
        wall_seconds: started.elapsed().as_secs_f64(),
        status: match &result {
            Ok(()) => "ok".to_string(),
            Err(e) => format!("failed: {e}"),
        },
        artifacts,
    };
    let manifest_path = cfg.output_dir.join("manifest.json");
    let wrote = write_json(&manifest_path, &manifest);
    result?;
    wrote?;
    Ok(RunOutcome { manifest, manifest_path })
}

fn dispatch(sub: Subcommand, cfg: &RunConfig, artifacts: &mut Vec<String>) -> Result<(), RunError> {
    match sub {
        Subcommand::SolveLocal => cmd_solve_local(cfg, artifacts),
        Subcommand::SolveMp => cmd_solve_mp(cfg, artifacts),
        Subcommand::VerifyBubble => cmd_verify_bubble(cfg, artifacts),
        Subcommand::VerifyGap => cmd_verify_gap(cfg, artifacts),
        Subcommand::VerifyLemmas => cmd_verify_lemmas(cfg, artifacts),
        Subcommand::SweepNu => cmd_sweep_nu(cfg, artifacts),
        Subcommand::Constants => cmd_constants(cfg, artifacts),
    }
}

fn build_grid(cfg: &RunConfig) -> Result<Arc<Grid>, RunError> {
    make_grid(cfg.params.dim, cfg.grid.r_max, cfg.grid.nodes, cfg.grid.law).map_err(RunError::Mesh)
}

fn constants_for(cfg: &RunConfig) -> Result<Constants, RunError> {
    Ok(crate::scalar::compute_constants(cfg.params.dim, cfg.params.p, cfg.params.q)?)
}

fn write_profiles(
    dir: &Path,
    stem: &str,
    pair: &FieldPair,
    artifacts: &mut Vec<String>,
) -> Result<(), RunError> {
    for (suffix, field) in [("u", &pair.u), ("v", &pair.v)] {
        let name = format!("{stem}_{suffix}.csv");
        write_field_csv(&dir.join(&name), field).map_err(|e| match e {
            GridError::Io(io) => RunError::Io(io),
            other => RunError::Invalid(other.to_string()),
        })?;
        artifacts.push(name);
    }
    Ok(())
}

/// `solve-local` report: the converged summary plus the threshold triple
/// the admissibility discussion is phrased in. The run reports, and never
/// enforces, ν < ν₀ — the threshold is sufficient for the ball geometry,
/// not necessary for convergence.
#[derive(Debug, Clone, Serialize)]
struct LocalRunReport {
    summary: ReportSummary,
    thresholds: Thresholds,
    nu: f64,
    nu_below_nu0: bool,
}

fn solve_local_inner(cfg: &RunConfig) -> Result<(SolveReport, Thresholds, Constants), RunError> {
    let grid = build_grid(cfg)?;
    let constants = constants_for(cfg)?;
    let thresholds = compute_thresholds(&cfg.params, &constants)?;
    let report = find_local_min(&grid, &cfg.params, &thresholds, &cfg.localmin_options())?;
    Ok((report, thresholds, constants))
}

fn cmd_solve_local(cfg: &RunConfig, artifacts: &mut Vec<String>) -> Result<(), RunError> {
    let (report, thresholds, _) = solve_local_inner(cfg)?;
    let out = LocalRunReport {
        summary: report.summary(&cfg.params),
        thresholds,
        nu: cfg.params.nu,
        nu_below_nu0: cfg.params.nu < thresholds.nu0,
    };
    write_json(&cfg.output_dir.join("local_report.json"), &out)?;
    artifacts.push("local_report.json".to_string());
    write_profiles(&cfg.output_dir, "local", &report.state, artifacts)
}

/// `solve-mp` report: the saddle summary plus the level bookkeeping
/// (`M` = saddle level, `cap` = concentration quantum, `window_ok` records
/// k₀ < M and 0 < M < m + cap as enforced by the solver).
#[derive(Debug, Clone, Serialize)]
struct MpRunReport {
    summary: ReportSummary,
    #[serde(rename = "M")]
    level: f64,
    cap: f64,
    window_ok: bool,
    /// Minimizer level m the window top m + cap is anchored to.
    m: f64,
    k0: f64,
}

fn cmd_solve_mp(cfg: &RunConfig, artifacts: &mut Vec<String>) -> Result<(), RunError> {
    let (local, thresholds, constants) = solve_local_inner(cfg)?;
    let grid = local.state.grid().clone();
    let m_level = local.energy;
    let cap = cap_increment(&cfg.params, &constants);
    let n_seed = MP_SEED_INDEX.max(cfg.n_values.iter().copied().max().unwrap_or(0));
    // seed the descent at the measured path maximum — the saddle's natural
    // approximation — falling back to the limiting dilation t* when the
    // curve has no interior maximum at this index
    let t_seed = match verify_level_gap(&cfg.params, &local.state, &constants, n_seed) {
        Ok(gap) => gap.t_n,
        Err(BubbleError::NoInteriorMax { .. }) => tstar(&cfg.params),
        Err(e) => return Err(e.into()),
    };
    let seed_pair = test_pair(&cfg.params, &local.state, n_seed, t_seed)?;
    let opts = cfg.mountain_options(thresholds.k0, Some((m_level, cap)));
    let report = find_mountain_pass(&grid, &cfg.params, &seed_pair, &opts)?;

    let level = report.energy;
    let out = MpRunReport {
        summary: report.summary(&cfg.params),
        level,
        cap,
        window_ok: level > thresholds.k0 && level > 0.0 && level < m_level + cap,
        m: m_level,
        k0: thresholds.k0,
    };
    write_json(&cfg.output_dir.join("mp_report.json"), &out)?;
    artifacts.push("mp_report.json".to_string());
    write_profiles(&cfg.output_dir, "mp", &report.state, artifacts)
}

/// Extend a configured index list until it is fit-worthy: at least
/// [`FIT_MIN_INDICES`] distinct values spanning a factor of
/// [`FIT_MIN_SPAN`], preferring to extend downward (small indices are
/// cheap) and doubling the top only when the floor index 4 is reached.
pub fn fit_indices(n_values: &[u32]) -> Vec<u32> {
    let mut ns: Vec<u32> = n_values.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let span_ok = |ns: &[u32]| {
        ns.len() >= FIT_MIN_INDICES
            && (*ns.last().unwrap() as f64) >= FIT_MIN_SPAN * ns[0] as f64
    };
    while !span_ok(&ns) {
        if ns[0] >= 8 {
            ns.insert(0, ns[0] / 2);
        } else {
            let top = *ns.last().unwrap();
            ns.push(top.saturating_mul(2));
        }
    }
    ns
}

fn push_asymptotics_csv(
    dir: &Path,
    rows: &[AsymptoticsRow],
    artifacts: &mut Vec<String>,
) -> Result<(), RunError> {
    let mut out = String::from("quantity,n,measured,limit,fitted_slope,theory_slope\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            r.quantity, r.n, r.measured, r.limit, r.fitted_slope, r.theory_slope
        ));
    }
    fs::write(dir.join("asymptotics.csv"), out)?;
    artifacts.push("asymptotics.csv".to_string());
    Ok(())
}

fn cmd_verify_bubble(cfg: &RunConfig, artifacts: &mut Vec<String>) -> Result<(), RunError> {
    let ns = fit_indices(&cfg.n_values);
    let rows = bubble_asymptotics(cfg.params.dim, &ns, &cfg.etas)?;
    push_asymptotics_csv(&cfg.output_dir, &rows, artifacts)
}

fn push_gap_csv(
    dir: &Path,
    rows: &[GapReport],
    artifacts: &mut Vec<String>,
) -> Result<(), RunError> {
    let mut out = String::from("n,t_n,H,m,cap,margin\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            r.n, r.t_n, r.h_at_tn, r.m, r.cap_increment, r.margin
        ));
    }
    fs::write(dir.join("gap.csv"), out)?;
    artifacts.push("gap.csv".to_string());
    Ok(())
}

/// `verify-gap`: the level-gap table over the configured indices. The gap
/// statement is asymptotic, so only the largest index is gated: its margin
/// must be positive. Indices whose path has no interior maximum yet are
/// kept in the table as NaN rows (the curve data exists, the maximum does
/// not). The table is always written before the gate fires.
fn cmd_verify_gap(cfg: &RunConfig, artifacts: &mut Vec<String>) -> Result<(), RunError> {
    let (local, _, constants) = solve_local_inner(cfg)?;
    let mut ns = cfg.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let m = local.energy;
    let cap = cap_increment(&cfg.params, &constants);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        match verify_level_gap(&cfg.params, &local.state, &constants, n) {
            Ok(row) => rows.push(row),
            Err(BubbleError::NoInteriorMax { .. }) => rows.push(GapReport {
                n,
                t_n: f64::NAN,
                h_at_tn: f64::NAN,
                m,
                cap_increment: cap,
                margin: f64::NAN,
            }),
            Err(e) => return Err(e.into()),
        }
    }
    push_gap_csv(&cfg.output_dir, &rows, artifacts)?;
    let last = rows.last().expect("config guarantees a nonempty index list");
    if !(last.margin > 0.0) {
        return Err(RunError::LevelViolation(format!(
            "gap margin at n = {} is {:.6e}; the curve maximum needs H < m + cap (see gap.csv)",
            last.n, last.margin
        )));
    }
    Ok(())
}

/// The scan roster behind `verify-lemmas`, exposed so tests and the
/// acceptance suite run exactly what the subcommand runs: the fiber
/// two-root scan, the interaction-remainder scan at the canonical (3,3)
/// pair plus one random critical pair per dimension 3..5, the cross-term
/// scan over [`CROSS_PAIRS`], the Taylor-tail scan over [`TAYLOR_ETAS`],
/// and the coupled-rearrangement identities on seeded monotone profiles.
pub fn lemma_suite(seed: u64) -> Result<Vec<ScanReport>, RunError> {
    let mut reports = Vec::new();
    reports.push(two_root_suite(TWO_ROOT_TUPLES, seed));

    let (l1, l2, a1) = INTERACTION_BOX;
    reports.push(scan_interaction_lower(3.0, 3.0, l1, l2, a1)?.report);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1e5a_11ab);
    for dim in [3u32, 4, 5] {
        let two_star = 2.0 * dim as f64 / (dim as f64 - 2.0);
        // α, β > 1 strictly, bounded away from the endpoints
        let alpha = rng.gen_range(1.05..two_star - 1.05);
        let beta = two_star - alpha;
        reports.push(scan_interaction_lower(alpha, beta, l1, l2, a1)?.report);
    }

    for (alpha, beta) in CROSS_PAIRS {
        reports.push(scan_cross_term(alpha, beta)?);
    }
    for eta in TAYLOR_ETAS {
        reports.push(scan_taylor_tail(eta, l1, l2)?.report);
    }
    reports.push(verify_rearrangement_inequalities(&rearrange_quads(seed)?, 3.0, 3.0)?);
    Ok(reports)
}

/// Seeded monotone test profiles for the rearrangement identities: sums of
/// centered Gaussians (radially decreasing by construction) with widths
/// and amplitudes drawn from the run seed.
fn rearrange_quads(seed: u64) -> Result<Vec<(FieldPair, FieldPair)>, RunError> {
    let grid = make_grid(3, 40.0, 1024, crate::grid::GridLaw::Graded { exponent: 4.0 })
        .map_err(RunError::Mesh)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5ea7_bed5);
    let mut bump = |g: &Arc<Grid>| -> RadialField {
        let (a1, w1) = (rng.gen_range(0.3..3.0), rng.gen_range(0.5..2.0));
        let (a2, w2) = (rng.gen_range(0.1..1.0), rng.gen_range(2.0..6.0));
        let mut values: Vec<f64> = g
            .r
            .iter()
            .map(|&r| a1 * (-(r / w1) * (r / w1)).exp() + a2 * (-(r / w2) * (r / w2)).exp())
            .collect();
        let m = values.len();
        values[m - 1] = 0.0;
        RadialField { grid: g.clone(), values }
    };
    let mut quads = Vec::new();
    for _ in 0..2 {
        let first = FieldPair { u: bump(&grid), v: bump(&grid) };
        let second = FieldPair { u: bump(&grid), v: bump(&grid) };
        quads.push((first, second));
    }
    Ok(quads)
}

/// `verify-lemmas`: run the whole suite, append every report to the
/// ledger, and fail with the scan-violation exit code if any report
/// recorded a violation (the ledger is written first).
fn cmd_verify_lemmas(cfg: &RunConfig, artifacts: &mut Vec<String>) -> Result<(), RunError> {
    let reports = lemma_suite(cfg.seed)?;
    let mut out = String::from(ScanReport::csv_header());
    out.push('\n');
    for r in &reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    fs::write(cfg.output_dir.join("lemmas.csv"), out)?;
    artifacts.push("lemmas.csv".to_string());

    if let Some(bad) = reports.iter().find(|r| r.violations > 0) {
        return Err(RunError::ScanViolation {
            lemma_id: bad.lemma_id.clone(),
            violations: bad.violations,
            worst_margin: bad.worst_margin,
            ledger: "lemmas.csv".to_string(),
        });
    }
    Ok(())
}

fn cmd_sweep_nu(cfg: &RunConfig, artifacts: &mut Vec<String>) -> Result<(), RunError> {
    let grid = build_grid(cfg)?;
    let constants = constants_for(cfg)?;
    let thresholds = compute_thresholds(&cfg.params, &constants)?;
    let rows = sweep_nu(&grid, &cfg.params, &cfg.nu_list, &thresholds, &cfg.localmin_options())?;
    let mut out = String::from("nu,m,lambda1,lambda2,h1_dist\n");
    for r in &rows {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            r.nu, r.energy, r.lambda1, r.lambda2, r.h1_dist
        ));
    }
    fs::write(cfg.output_dir.join("sweep.csv"), out)?;
    artifacts.push("sweep.csv".to_string());
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct ConstantsGridInfo {
    law: &'static str,
    exponent: f64,
    sobolev_nodes: usize,
    sobolev_r_max: f64,
    gn_wide_nodes: usize,
    gn_wide_r_max: f64,
    gn_fine_nodes: usize,
    gn_fine_r_max: f64,
}

/// `constants` report: dimension, Sobolev constant, Gagliardo–Nirenberg
/// table keyed by exponent, and the internal measuring meshes (the
/// bootstrap does not use the solve mesh from the config).
#[derive(Debug, Clone, Serialize)]
struct ConstantsReport {
    #[serde(rename = "N")]
    dim: u32,
    #[serde(rename = "S")]
    sobolev: f64,
    #[serde(rename = "C_p")]
    gn: std::collections::BTreeMap<String, f64>,
    grid: ConstantsGridInfo,
}

fn cmd_constants(cfg: &RunConfig, artifacts: &mut Vec<String>) -> Result<(), RunError> {
    let constants = constants_for(cfg)?;
    let gn_opts = crate::scalar::ConstantsOptions::default();
    let mut gn = std::collections::BTreeMap::new();
    for (p, c) in &constants.gn_c {
        gn.insert(format!("{p}"), *c);
    }
    let report = ConstantsReport {
        dim: cfg.params.dim,
        sobolev: constants.sobolev_s,
        gn,
        grid: ConstantsGridInfo {
            law: "graded",
            exponent: 4.0,
            sobolev_nodes: crate::functionals::S_REFERENCE_NODES,
            sobolev_r_max: crate::functionals::S_REFERENCE_RMAX,
            gn_wide_nodes: gn_opts.wide_nodes,
            gn_wide_r_max: gn_opts.wide_rmax,
            gn_fine_nodes: gn_opts.fine_nodes,
            gn_fine_r_max: gn_opts.fine_rmax,
        },
    };
    write_json(&cfg.output_dir.join("constants.json"), &report)?;
    artifacts.push("constants.json".to_string());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcommand_names_round_trip() {
        for sub in Subcommand::ALL {
            assert_eq!(Subcommand::from_name(sub.name()), Some(sub));
        }
        assert_eq!(Subcommand::from_name("solve"), None);
        assert_eq!(Subcommand::from_name(""), None);
    }

    #[test]
    fn sha256_matches_reference_digest() {
        // NIST FIPS 180-2 test vector for "abc"
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_serializes_with_the_contract_keys() {
        let m = Manifest {
            subcommand: "constants".to_string(),
            config_sha256: "00".repeat(32),
            seed: 42,
            wall_seconds: 0.25,
            status: "ok".to_string(),
            artifacts: vec!["constants.json".to_string()],
        };
        let text = serde_json::to_string(&m).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let obj = value.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            ["artifacts", "config_sha256", "seed", "status", "subcommand", "wall_seconds"]
        );
        assert_eq!(obj["artifacts"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn exit_codes_follow_the_error_classes() {
        let samples: Vec<(RunError, i32)> = vec![
            (RunError::Config(ConfigError::MissingKey("params.nu")), 2),
            (RunError::Invalid("bad".into()), 2),
            (RunError::NoConvergence("stalled".into()), 3),
            (RunError::LevelViolation("above window".into()), 4),
            (
                RunError::ScanViolation {
                    lemma_id: "two_root".into(),
                    violations: 1,
                    worst_margin: -1.0,
                    ledger: "lemmas.csv".into(),
                },
                5,
            ),
            (RunError::Locked(PathBuf::from("out/.lock")), 1),
        ];
        for (err, code) in samples {
            assert_eq!(err.exit_code(), code, "{err}");
        }
    }

    #[test]
    fn module_errors_map_to_their_classes() {
        let e: RunError = LocalMinError::NoConvergence { iterations: 7, residual: 1.0 }.into();
        assert_eq!(e.exit_code(), 3);
        let e: RunError = MountainError::LevelViolation { energy: 60.0, lo: 0.0, hi: 49.0 }.into();
        assert_eq!(e.exit_code(), 4);
        let e: RunError = MountainError::NoPminus.into();
        assert_eq!(e.exit_code(), 3);
        let e: RunError = BubbleError::NoInteriorMax { n: 64 }.into();
        assert_eq!(e.exit_code(), 4);
        let e: RunError = BubbleError::InvalidArgument("n".into()).into();
        assert_eq!(e.exit_code(), 2);
        let e: RunError = ScalarError::Invalid("mu".into()).into();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn lock_is_exclusive_and_released_on_drop() {
        let dir = tempfile::tempdir().unwrap();
        let first = LockGuard::acquire(dir.path()).unwrap();
        match LockGuard::acquire(dir.path()) {
            Err(RunError::Locked(p)) => assert!(p.ends_with(".lock")),
            other => panic!("expected Locked, got {other:?}"),
        }
        drop(first);
        let again = LockGuard::acquire(dir.path()).unwrap();
        drop(again);
        assert!(!dir.path().join(".lock").exists());
    }

    #[test]
    fn fit_indices_extends_sparse_lists() {
        // the gap-table default grows two cheap lower octaves
        assert_eq!(fit_indices(&[64, 128, 256]), vec![16, 32, 64, 128, 256]);
        // an already fit-worthy list is passed through (sorted, deduped)
        assert_eq!(fit_indices(&[256, 16, 64, 32, 128, 16]), vec![16, 32, 64, 128, 256]);
        // pinned at the floor index 4, the top doubles instead
        assert_eq!(fit_indices(&[4]), vec![4, 8, 16, 32, 64]);
        let ns = fit_indices(&[5, 6]);
        assert!(ns.len() >= FIT_MIN_INDICES);
        assert!(*ns.last().unwrap() as f64 >= FIT_MIN_SPAN * ns[0] as f64);
    }

    #[test]
    fn lemma_suite_roster_is_deterministic() {
        let a = lemma_suite(42).unwrap();
        let b = lemma_suite(42).unwrap();
        assert_eq!(a.len(), 1 + 4 + CROSS_PAIRS.len() + TAYLOR_ETAS.len() + 1);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.csv_row(), y.csv_row());
        }
        assert_eq!(a[0].lemma_id, "two_root");
        assert!(a.iter().all(|r| r.violations == 0), "seeded suite must be clean");
    }

    #[test]
    fn config_errors_surface_before_any_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("bad.conf");
        std::fs::write(&config, "params.dim = 3\nnot a key = 1\n").unwrap();
        let out = dir.path().join("out");
        let err = run_subcommand(Subcommand::Constants, &config, Some(&out), None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(!out.join("manifest.json").exists(), "no manifest for unparseable configs");
    }
}
