//! The `verify` suite: every module invariant, measured and compared
//! against its tolerance.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::experiment::{run_trials_with, TrialConfig};
use crate::geometry::{sample_uniform_sphere, RngStream, UnitVector};
use crate::inequalities::{
    chsh_report, dichotomic_identity, leggett_scan, noncontextual_control, subensemble_bounds, SettingsPlan,
    TwoPlaneBound,
};
use crate::ks_single::{chi_with, overlap_closed, overlap_contour, overlap_numeric, Sign, TieBreak};
use crate::ks_two::{
    correlation_closed, correlation_numeric, distribution_from_tensor, ensemble_marginal, ensemble_marginal_grid,
    malus_averages, mass_brute_force, one_sided_singlet_distribution, singlet_distribution, Side, SourceModel,
};
use crate::qm::{bell_state, correlation_tensor, qm_correlation, BellState};
use crate::quadrature::{McConfig, NumericMethod};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &str, measured: f64, expected: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: (measured - expected).abs() <= tolerance,
            measured,
            expected,
            tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub quick: bool,
    pub seed: u64,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub quick: bool,
    pub seed: u64,
    pub workers: usize,
    pub n_theta: Option<usize>,
    /// Tie-break used by the completeness check; `Heaviside` reproduces the
    /// analytic Θ(0)=1 double count on the equator.
    pub tie: TieBreak,
}

struct Sizes {
    pairs: usize,
    n_theta: usize,
    mc_samples: usize,
    mc_pairs: usize,
    brute_theta: usize,
    quadruples: usize,
    trials: u64,
}

fn sizes(opts: &VerifyOptions) -> Sizes {
    let s = if opts.quick {
        Sizes {
            pairs: 20,
            n_theta: 256,
            mc_samples: 100_000,
            mc_pairs: 5,
            brute_theta: 32,
            quadruples: 1_000,
            trials: 100_000,
        }
    } else {
        Sizes {
            pairs: 100,
            n_theta: 512,
            mc_samples: 1_000_000,
            mc_pairs: 20,
            brute_theta: 48,
            quadruples: 10_000,
            trials: 1_000_000,
        }
    };
    Sizes {
        n_theta: opts.n_theta.unwrap_or(s.n_theta),
        ..s
    }
}

fn random_units(seed: u64, stream: u64, n: usize) -> Vec<UnitVector> {
    let mut rng = RngStream::new(seed, stream);
    (0..n).map(|_| sample_uniform_sphere(&mut rng)).collect()
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let sz = sizes(opts);
    let seed = opts.seed;
    let grid = NumericMethod::Grid { n_theta: sz.n_theta };
    // Quadrature error scales like 1/n_theta for the indicator integrands.
    let grid_tol = |base: f64| base * (512.0 / sz.n_theta as f64).max(1.0);
    let mc = |k: u64| NumericMethod::MonteCarlo(McConfig::new(sz.mc_samples, seed.wrapping_add(k)).with_workers(opts.workers));
    let units = random_units(seed, 1, 2 * sz.pairs);
    let pairs: Vec<(UnitVector, UnitVector)> = units.chunks(2).map(|c| (c[0], c[1])).collect();
    let mut checks = Vec::new();

    let mut overlap_err = Vec::new();
    let mut sym_err = Vec::new();
    for &(a, b) in &pairs {
        let ab = overlap_numeric(a, b, Sign::Plus, grid)?.value;
        let ba = overlap_numeric(b, a, Sign::Plus, grid)?.value;
        overlap_err.push(ab - overlap_closed(a, b, Sign::Plus));
        sym_err.push(ab - ba);
    }
    checks.push(Check::new(
        "overlap grid",
        max_abs(overlap_err),
        0.0,
        grid_tol(2e-3),
        format!("max |I_ab - (1+a.b)/2| over {} pairs, n_theta={}", pairs.len(), sz.n_theta),
    ));
    let mut z_max: f64 = 0.0;
    for (k, &(a, b)) in pairs.iter().take(sz.mc_pairs).enumerate() {
        let e = overlap_numeric(a, b, Sign::Plus, mc(k as u64))?;
        z_max = z_max.max((e.value - overlap_closed(a, b, Sign::Plus)).abs() / e.std_error);
    }
    checks.push(Check::new(
        "overlap Monte Carlo",
        z_max,
        0.0,
        4.0,
        format!("max |z| over {} pairs, {} samples each", sz.mc_pairs, sz.mc_samples),
    ));
    let closed_sym = max_abs(pairs.iter().map(|&(a, b)| overlap_closed(a, b, Sign::Plus) - overlap_closed(b, a, Sign::Plus)));
    checks.push(Check::new(
        "I_ab symmetry",
        max_abs(sym_err).max(closed_sym),
        0.0,
        grid_tol(4e-3),
        format!("closed-form difference {closed_sym:e}; numeric max |I_ab - I_ba|"),
    ));
    let contour = max_abs(
        pairs
            .iter()
            .map(|&(a, b)| overlap_contour(a, b, Sign::Plus, 64).map(|c| c - overlap_closed(a, b, Sign::Plus)))
            .collect::<Result<Vec<_>>>()?,
    );
    checks.push(Check::new("overlap contour (Stokes)", contour, 0.0, 1e-10, "max |contour - closed|"));

    let eq = equator_double_count(opts.tie);
    checks.push(Check::new(
        "equator completeness",
        eq.0 as f64,
        0.0,
        0.0,
        format!("{} of {} equator points with chi+ + chi- != 1 (tie-break {:?})", eq.0, eq.1, opts.tie),
    ));

    let q = random_units(seed, 2, 4 * 50);
    let mut malus_err = Vec::new();
    for c in q.chunks(4) {
        let (ea, eb) = malus_averages(c[0], c[1], c[2], c[3], grid)?;
        malus_err.push(ea.value - c[0].dot(&c[2]));
        malus_err.push(eb.value - c[1].dot(&c[3]));
    }
    checks.push(Check::new(
        "Malus",
        max_abs(malus_err),
        0.0,
        grid_tol(2e-3),
        "max |A - u.a|, |B - v.b| over 50 quadruples",
    ));

    let sub = &pairs[..pairs.len().min(50)];
    let mut singlet_err = Vec::new();
    let mut fa_err = Vec::new();
    for &(a, b) in sub {
        let e = correlation_numeric(&singlet_distribution(a, b), a, b, grid)?.value;
        singlet_err.push(e + a.dot(&b));
        let e = correlation_numeric(&one_sided_singlet_distribution(a), a, b, grid)?.value;
        fa_err.push(e + a.dot(&b));
    }
    checks.push(Check::new(
        "singlet correlation",
        max_abs(singlet_err),
        0.0,
        grid_tol(5e-3),
        format!("max |E_ab + a.b| with F_ab, {} pairs", sub.len()),
    ));
    checks.push(Check::new("F_a route", max_abs(fa_err), 0.0, grid_tol(5e-3), "max |E_ab + a.b| with F_a"));

    let mut bell_err: f64 = 0.0;
    for kind in BellState::ALL {
        let state = bell_state(kind);
        let f = distribution_from_tensor(&correlation_tensor(&state));
        for &(a, b) in sub {
            bell_err = bell_err.max((correlation_closed(&f, a, b) - qm_correlation(&state, a, b)).abs());
        }
    }
    checks.push(Check::new("Bell table", bell_err, 0.0, 1e-12, "closed-form model vs QM, four Bell states"));

    let (a, b) = pairs[0];
    let singlet = singlet_distribution(a, b);
    let mass = mass_brute_force(&singlet, sz.brute_theta)?;
    checks.push(Check::new(
        "mass=4",
        mass,
        4.0,
        2e-2 * (48.0 / sz.brute_theta as f64).max(1.0),
        format!("four-dimensional quadrature, n_theta={}", sz.brute_theta),
    ));
    let marg = ensemble_marginal_grid(&singlet, a, Side::A, sz.n_theta)?;
    let marg_closed = ensemble_marginal(&singlet, a, Side::A);
    checks.push(Check::new(
        "ensemble marginal",
        marg,
        1.0 - a.dot(&b),
        grid_tol(5e-3),
        format!("closed form {marg_closed}; target 1 - a.b"),
    ));

    let mut id_fail = 0;
    for (x, y) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let (l, m, u) = dichotomic_identity(x, y)?;
        if l != m || m != u {
            id_fail += 1;
        }
    }
    checks.push(Check::new("dichotomic identity", f64::from(id_fail), 0.0, 0.0, "failures on the four combinations"));
    let quads = random_units(seed, 3, 4 * sz.quadruples);
    let chain_fail = quads
        .chunks(4)
        .filter(|c| !subensemble_bounds(c[0], c[1], c[2], c[3]).holds())
        .count();
    checks.push(Check::new(
        "subensemble chain",
        chain_fail as f64,
        0.0,
        0.0,
        format!("failures of lower <= mid <= upper over {} quadruples", sz.quadruples),
    ));

    let phis: Vec<f64> = (1..=89).map(|d| f64::from(d).to_radians()).collect();
    let model = |a: UnitVector, b: UnitVector| SourceModel::Singlet.correlation(a, b);
    let scan = leggett_scan(&model, &phis, &TwoPlaneBound)?;
    let edge = scan.summary.upper_edge.unwrap_or(f64::NAN);
    checks.push(Check::new(
        "Leggett violation edge",
        edge.to_degrees(),
        (2.0 * (1.0 / PI).asin()).to_degrees(),
        1.0,
        "upper edge of the violation interval, degrees",
    ));
    checks.push(Check::new(
        "Leggett peak margin",
        scan.summary.max_margin,
        1.0 / (PI * PI),
        1e-3,
        format!("at phi = {:.1} deg", scan.summary.phi_at_max_margin.to_degrees()),
    ));
    let control = noncontextual_control();
    let control_e = |a: UnitVector, b: UnitVector| correlation_closed(&control, a, b);
    let cscan = leggett_scan(&control_e, &phis, &TwoPlaneBound)?;
    checks.push(Check::new(
        "control F no violation",
        cscan.summary.n_violations as f64,
        0.0,
        0.0,
        "violations with a setting-independent unit-mass F",
    ));

    let plan = SettingsPlan::standard_chsh();
    let chsh = chsh_report(&model, &plan);
    checks.push(Check::new("CHSH", chsh.lhs, 2.0 * 2f64.sqrt(), 1e-12, "closed form at 0, 90, 45, 135 deg"));

    let sim_plan = SettingsPlan::single(UnitVector::in_xz_plane(0.0), UnitVector::in_xz_plane(PI / 3.0));
    let cfg = TrialConfig::new(sz.trials, seed).with_workers(opts.workers);
    let s = run_trials_with(&SourceModel::Singlet, &sim_plan, cfg, |_| Ok(()))?.remove(0);
    checks.push(Check::new(
        "event simulation",
        s.correlation,
        -0.5,
        3.0 * s.std_error,
        format!("singlet at 60 deg, {} trials, std_error {:.2e}", s.n_trials, s.std_error),
    ));

    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        quick: opts.quick,
        seed,
        checks,
    })
}

/// Points exactly on the equators of the coordinate axes, and how many of
/// them have χ⁺ + χ⁻ ≠ 1 under `tie`.
fn equator_double_count(tie: TieBreak) -> (usize, usize) {
    let mut bad = 0;
    let mut total = 0;
    for axis in [UnitVector::X, UnitVector::Y, UnitVector::Z] {
        for k in 0..16 {
            let (s, c) = (f64::from(k) * PI / 8.0).sin_cos();
            let arr = axis.to_array();
            // Rotate the remaining two coordinates; λ·axis is exactly 0.
            let p = if arr[0] == 1.0 {
                [0.0, c, s]
            } else if arr[1] == 1.0 {
                [s, 0.0, c]
            } else {
                [c, s, 0.0]
            };
            let Ok(lambda) = UnitVector::from_array(p) else { continue };
            total += 1;
            let sum = chi_with(axis, Sign::Plus, lambda, tie) + chi_with(axis, Sign::Minus, lambda, tie);
            if sum != 1 {
                bad += 1;
            }
        }
    }
    (bad, total)
}
