//! Event-level simulation of the fixed-settings experiment.
//!
//! For every trial the source picks an indicator term of F with probability
//! ∝ weight, draws the pair polarizations u, v uniformly on that term's
//! hemispheres, then draws λ₁ ~ ρ_u and λ₂ ~ ρ_v. The outcomes are the
//! tie-broken ±1 values at each analyzer. Because F is not normalized, the
//! correlation estimator is mass·mean(A·B).
//!
//! Trials are generated in blocks of [`MC_BLOCK`]; block `k` of setting `s`
//! draws from `RngStream::new(seed, (s << 32) | k)`, so the event stream
//! depends on the seed and plan only, never on the worker count.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HemisphereSampler, RngStream, UnitVector};
use crate::inequalities::{SettingPair, SettingsPlan};
use crate::ks_single::dichotomic_outcome;
use crate::ks_two::{PolarizationDistribution, SourceModel, TermPicker};
use crate::quadrature::{map_blocks, MC_BLOCK};

/// Header of the event CSV, in column order.
pub const EVENT_CSV_HEADER: [&str; 23] = [
    "trial_id",
    "setting_label",
    "ax",
    "ay",
    "az",
    "bx",
    "by",
    "bz",
    "ux",
    "uy",
    "uz",
    "vx",
    "vy",
    "vz",
    "l1x",
    "l1y",
    "l1z",
    "l2x",
    "l2y",
    "l2z",
    "A",
    "B",
    "mass",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub trial_id: u64,
    pub setting_label: String,
    pub n_a: UnitVector,
    pub n_b: UnitVector,
    pub u: UnitVector,
    pub v: UnitVector,
    pub lambda1: UnitVector,
    pub lambda2: UnitVector,
    pub outcome_a: i8,
    pub outcome_b: i8,
    pub mass: f64,
}

impl EventRecord {
    /// λ₁·u ≥ 0, λ₂·v ≥ 0 (up to rounding) and both outcomes ±1.
    pub fn satisfies_support(&self) -> bool {
        const EPS: f64 = 1e-12;
        self.lambda1.dot(&self.u) >= -EPS
            && self.lambda2.dot(&self.v) >= -EPS
            && matches!(self.outcome_a, 1 | -1)
            && matches!(self.outcome_b, 1 | -1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub pp: u64,
    pub pm: u64,
    pub mp: u64,
    pub mm: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, a: i8, b: i8) -> Result<()> {
        match (a, b) {
            (1, 1) => self.pp += 1,
            (1, -1) => self.pm += 1,
            (-1, 1) => self.mp += 1,
            (-1, -1) => self.mm += 1,
            (1 | -1, x) | (x, _) => return Err(Error::NonDichotomic(i64::from(x))),
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.pp + self.pm + self.mp + self.mm
    }

    /// mean(A·B) and its standard error.
    pub fn product_moments(&self) -> (f64, f64) {
        let n = self.total() as f64;
        let mean = (self.pp + self.mm) as f64 / n - (self.pm + self.mp) as f64 / n;
        let se = if self.total() > 1 {
            let var = n / (n - 1.0) * (1.0 - mean * mean);
            (var.max(0.0) / n).sqrt()
        } else {
            0.0
        };
        (mean, se)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub setting_label: String,
    pub n_a: UnitVector,
    pub n_b: UnitVector,
    pub n_trials: u64,
    pub counts: OutcomeCounts,
    pub correlation: f64,
    pub std_error: f64,
    pub mass: f64,
    pub seed: Option<u64>,
    /// False when |correlation| exceeds 1 by more than three standard errors.
    pub physical: bool,
}

impl RunSummary {
    fn from_counts(
        setting_label: String,
        n_a: UnitVector,
        n_b: UnitVector,
        counts: OutcomeCounts,
        mass: f64,
        seed: Option<u64>,
    ) -> Self {
        let (mean, se) = counts.product_moments();
        let correlation = mass * mean;
        let std_error = mass * se;
        Self {
            setting_label,
            n_a,
            n_b,
            n_trials: counts.total(),
            counts,
            correlation,
            std_error,
            mass,
            seed,
            physical: correlation.abs() <= 1.0 + 3.0 * std_error,
        }
    }
}

/// Trial budget per setting pair and parallel layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    pub n_trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl TrialConfig {
    pub fn new(n_trials: u64, seed: u64) -> Self {
        Self {
            n_trials,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// One setting pair's generator: F is fixed for the whole block of trials.
struct SettingRun<'a> {
    pair: &'a SettingPair,
    index: u64,
    picker: TermPicker,
    mass: f64,
}

impl SettingRun<'_> {
    fn block(&self, cfg: &TrialConfig, block: u64) -> Vec<EventRecord> {
        let start = block * MC_BLOCK as u64;
        let len = (MC_BLOCK as u64).min(cfg.n_trials - start);
        let mut rng = RngStream::new(cfg.seed, (self.index << 32) | block);
        let first_id = self.index * cfg.n_trials + start;
        (0..len)
            .map(|i| {
                let k = self.picker.pick(rng.uniform());
                let (su, sv) = &self.picker.samplers[k];
                let u = su.uniform(&mut rng);
                let v = sv.uniform(&mut rng);
                let lambda1 = HemisphereSampler::new(u).cosine(&mut rng);
                let lambda2 = HemisphereSampler::new(v).cosine(&mut rng);
                EventRecord {
                    trial_id: first_id + i,
                    setting_label: self.pair.label.clone(),
                    n_a: self.pair.a,
                    n_b: self.pair.b,
                    u,
                    v,
                    lambda1,
                    lambda2,
                    outcome_a: dichotomic_outcome(self.pair.a, lambda1),
                    outcome_b: dichotomic_outcome(self.pair.b, lambda2),
                    mass: self.mass,
                }
            })
            .collect()
    }
}

/// Blocks generated in parallel per batch before being handed to the sink.
const BLOCKS_PER_BATCH: usize = 8;

/// Simulates `cfg.n_trials` trials for every pair of `plan`, feeding records
/// to `sink` in trial_id order, and returns one summary per pair.
///
/// Trial ids run from `s·n_trials` for setting `s`. Memory use is bounded by
/// one batch of blocks regardless of `n_trials`.
pub fn run_trials_with<S>(
    source: &SourceModel,
    plan: &SettingsPlan,
    cfg: TrialConfig,
    mut sink: S,
) -> Result<Vec<RunSummary>>
where
    S: FnMut(&EventRecord) -> Result<()>,
{
    if cfg.n_trials == 0 {
        return Err(Error::InvalidArgument("number of trials must be at least 1".into()));
    }
    if plan.pairs.is_empty() {
        return Err(Error::InvalidArgument("settings plan has no setting pairs".into()));
    }
    let n_blocks = cfg.n_trials.div_ceil(MC_BLOCK as u64);
    let batch = (BLOCKS_PER_BATCH * cfg.workers.max(1)) as u64;
    let mut summaries = Vec::with_capacity(plan.pairs.len());
    for (index, pair) in plan.pairs.iter().enumerate() {
        let f = source.distribution(pair.a, pair.b);
        let run = setting_run(&f, pair, index as u64)?;
        let mut counts = OutcomeCounts::default();
        let mut first = 0;
        while first < n_blocks {
            let count = batch.min(n_blocks - first);
            let blocks = map_blocks(count as usize, cfg.workers, |k| run.block(&cfg, first + k as u64));
            for rec in blocks.iter().flatten() {
                counts.record(rec.outcome_a, rec.outcome_b)?;
                sink(rec)?;
            }
            first += count;
        }
        summaries.push(RunSummary::from_counts(
            pair.label.clone(),
            pair.a,
            pair.b,
            counts,
            run.mass,
            Some(cfg.seed),
        ));
    }
    Ok(summaries)
}

fn setting_run<'a>(f: &PolarizationDistribution, pair: &'a SettingPair, index: u64) -> Result<SettingRun<'a>> {
    let mass = f.mass();
    if !(mass > 0.0) {
        return Err(Error::ZeroMass);
    }
    Ok(SettingRun {
        pair,
        index,
        picker: TermPicker::new(f)?,
        mass,
    })
}

/// All records of a run, in trial_id order.
pub fn run_trials(source: &SourceModel, plan: &SettingsPlan, cfg: TrialConfig) -> Result<Vec<EventRecord>> {
    let mut out = Vec::new();
    run_trials_with(source, plan, cfg, |r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Records drawn from one fixed distribution at a single setting pair.
pub fn run_distribution(
    f: &PolarizationDistribution,
    pair: &SettingPair,
    cfg: TrialConfig,
) -> Result<Vec<EventRecord>> {
    let plan = SettingsPlan {
        pairs: vec![pair.clone()],
        phi: None,
    };
    run_trials(&SourceModel::Fixed(f.clone()), &plan, cfg)
}

/// Summary of records sharing one setting pair: correlation = mass·mean(A·B),
/// std_error = mass·σ/√n. The seed is not recoverable from records.
pub fn estimate_correlation(records: &[EventRecord]) -> Result<RunSummary> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let mut counts = OutcomeCounts::default();
    for r in records {
        if r.setting_label != first.setting_label || r.n_a != first.n_a || r.n_b != first.n_b {
            return Err(Error::MixedSettings {
                first: first.setting_label.clone(),
                other: r.setting_label.clone(),
            });
        }
        if r.mass != first.mass {
            return Err(Error::InvalidArgument(format!(
                "records mix masses {} and {}",
                first.mass, r.mass
            )));
        }
        counts.record(r.outcome_a, r.outcome_b)?;
    }
    Ok(RunSummary::from_counts(
        first.setting_label.clone(),
        first.n_a,
        first.n_b,
        counts,
        first.mass,
        None,
    ))
}

/// Splits records by setting label (first-appearance order) and summarizes
/// each group.
pub fn summarize_by_setting(records: &[EventRecord]) -> Result<Vec<RunSummary>> {
    let mut groups: Vec<(String, Vec<EventRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(l, _)| *l == r.setting_label) {
            Some((_, g)) => g.push(r.clone()),
            None => groups.push((r.setting_label.clone(), vec![r.clone()])),
        }
    }
    groups.iter().map(|(_, g)| estimate_correlation(g)).collect()
}

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Streaming CSV writer for event records. Reals are written with 17
/// significant digits, which round-trips every f64 exactly.
pub struct EventWriter {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl EventWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut inner = csv::Writer::from_writer(BufWriter::new(file));
        inner
            .write_record(EVENT_CSV_HEADER)
            .map_err(|e| csv_error(&path, e))?;
        Ok(Self { path, inner })
    }

    pub fn write(&mut self, r: &EventRecord) -> Result<()> {
        let mut row: Vec<String> = Vec::with_capacity(EVENT_CSV_HEADER.len());
        row.push(r.trial_id.to_string());
        row.push(r.setting_label.clone());
        for v in [r.n_a, r.n_b, r.u, r.v, r.lambda1, r.lambda2] {
            row.extend(v.to_array().map(fmt_real));
        }
        row.push(r.outcome_a.to_string());
        row.push(r.outcome_b.to_string());
        row.push(fmt_real(r.mass));
        self.inner.write_record(&row).map_err(|e| csv_error(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))?;
        let buf = self
            .inner
            .into_inner()
            .map_err(|e| Error::io(&self.path, std::io::Error::other(e.to_string())))?;
        buf.into_inner()
            .map_err(|e| Error::io(&self.path, e.into_error()))?
            .flush()
            .map_err(|e| Error::io(&self.path, e))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::InvalidArgument(format!("{}: {other:?}", path.display())),
    }
}

pub fn write_events(path: impl AsRef<Path>, records: &[EventRecord]) -> Result<()> {
    let mut w = EventWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// Reads an event CSV. An empty file yields no records; any malformed row is
/// reported with its line number.
pub fn read_events(path: impl AsRef<Path>) -> Result<Vec<EventRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(file);
    let malformed = |line: u64, message: String| Error::MalformedRow {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut out = Vec::new();
    let mut row = csv::StringRecord::new();
    let mut header_seen = false;
    loop {
        let more = reader.read_record(&mut row).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                other => malformed(line, format!("{other:?}")),
            }
        })?;
        if !more {
            break;
        }
        let line = row.position().map_or(0, |p| p.line());
        if !header_seen {
            header_seen = true;
            if row.iter().ne(EVENT_CSV_HEADER.iter().copied()) {
                return Err(malformed(line, "header does not match the event schema".into()));
            }
            continue;
        }
        out.push(parse_row(&row).map_err(|m| malformed(line, m))?);
    }
    Ok(out)
}

fn parse_row(row: &csv::StringRecord) -> std::result::Result<EventRecord, String> {
    if row.len() != EVENT_CSV_HEADER.len() {
        return Err(format!("expected {} fields, found {}", EVENT_CSV_HEADER.len(), row.len()));
    }
    let real = |i: usize| -> std::result::Result<f64, String> {
        let s = &row[i];
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("column {}: '{s}' is not a finite real", EVENT_CSV_HEADER[i]))
    };
    let unit = |i: usize| -> std::result::Result<UnitVector, String> {
        let (x, y, z) = (real(i)?, real(i + 1)?, real(i + 2)?);
        let n = (x * x + y * y + z * z).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(format!("columns {}..{}: norm {n} is not 1", EVENT_CSV_HEADER[i], EVENT_CSV_HEADER[i + 2]));
        }
        Ok(UnitVector::from_unit_components(x, y, z))
    };
    let outcome = |i: usize| -> std::result::Result<i8, String> {
        match row[i].trim() {
            "1" | "+1" => Ok(1),
            "-1" => Ok(-1),
            s => Err(format!("column {}: outcome '{s}' is not -1 or 1", EVENT_CSV_HEADER[i])),
        }
    };
    let trial_id = row[0]
        .trim()
        .parse::<u64>()
        .map_err(|_| format!("column trial_id: '{}' is not an integer", &row[0]))?;
    Ok(EventRecord {
        trial_id,
        setting_label: row[1].to_string(),
        n_a: unit(2)?,
        n_b: unit(5)?,
        u: unit(8)?,
        v: unit(11)?,
        lambda1: unit(14)?,
        lambda2: unit(17)?,
        outcome_a: outcome(20)?,
        outcome_b: outcome(21)?,
        mass: real(22)?,
    })
}

/// Summaries as pretty-printed JSON (an array, one object per setting).
pub fn write_summaries(path: impl AsRef<Path>, summaries: &[RunSummary]) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(summaries)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_uniform_sphere;
    use crate::ks_two::{correlation_closed, singlet_distribution};
    use proptest::prelude::*;

    fn deg(d: f64) -> UnitVector {
        UnitVector::in_xz_plane(d.to_radians())
    }

    fn synthetic(n_pp: usize, n_pm: usize, n_mp: usize, n_mm: usize, mass: f64) -> Vec<EventRecord> {
        let mut out = Vec::new();
        for (a, b, n) in [(1, 1, n_pp), (1, -1, n_pm), (-1, 1, n_mp), (-1, -1, n_mm)] {
            for _ in 0..n {
                out.push(EventRecord {
                    trial_id: out.len() as u64,
                    setting_label: "ab".into(),
                    n_a: UnitVector::Z,
                    n_b: UnitVector::Z,
                    u: UnitVector::Z,
                    v: UnitVector::Z,
                    lambda1: UnitVector::Z,
                    lambda2: UnitVector::Z,
                    outcome_a: a,
                    outcome_b: b,
                    mass,
                });
            }
        }
        out
    }

    #[test]
    fn estimator_arithmetic() {
        let s = estimate_correlation(&synthetic(10, 0, 0, 0, 4.0)).unwrap();
        assert_eq!(s.correlation, 4.0);
        assert!(!s.physical);
        assert_eq!(s.std_error, 0.0);
        // mean(AB) = (3 − 5)/8 = −0.25
        let s = estimate_correlation(&synthetic(2, 3, 2, 1, 4.0)).unwrap();
        assert!((s.correlation + 1.0).abs() < 1e-15);
        assert_eq!(s.n_trials, 8);
        assert!(s.physical);
        assert_eq!(s.counts, OutcomeCounts { pp: 2, pm: 3, mp: 2, mm: 1 });
    }

    #[test]
    fn estimator_rejections() {
        assert!(matches!(estimate_correlation(&[]), Err(Error::EmptyRecords)));
        let mut r = synthetic(2, 0, 0, 0, 4.0);
        r[1].setting_label = "other".into();
        assert!(matches!(estimate_correlation(&r), Err(Error::MixedSettings { .. })));
        let mut r = synthetic(2, 0, 0, 0, 4.0);
        r[1].outcome_a = 0;
        assert!(matches!(estimate_correlation(&r), Err(Error::NonDichotomic(0))));
    }

    #[test]
    fn zero_trials_and_zero_mass_rejected() {
        let plan = SettingsPlan::single(UnitVector::Z, UnitVector::Z);
        assert!(run_trials(&SourceModel::Singlet, &plan, TrialConfig::new(0, 1)).is_err());
        let empty = SourceModel::Fixed(PolarizationDistribution::empty());
        assert!(matches!(run_trials(&empty, &plan, TrialConfig::new(10, 1)), Err(Error::ZeroMass)));
    }

    #[test]
    fn records_satisfy_support_and_ids() {
        let plan = SettingsPlan::standard_chsh();
        let n = 5_000;
        let recs = run_trials(&SourceModel::Singlet, &plan, TrialConfig::new(n, 3)).unwrap();
        assert_eq!(recs.len() as u64, 4 * n);
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.trial_id, i as u64);
            assert!(r.satisfies_support(), "{r:?}");
            assert_eq!(r.mass, 4.0);
        }
    }

    #[test]
    fn singlet_event_correlations() {
        let n = 1_000_000;
        for (a, b, target) in [(0.0, 0.0, -1.0), (0.0, 90.0, 0.0), (0.0, 60.0, -0.5)] {
            let plan = SettingsPlan::single(deg(a), deg(b));
            let s = run_trials_with(&SourceModel::Singlet, &plan, TrialConfig::new(n, 7).with_workers(4), |_| Ok(()))
                .unwrap()
                .remove(0);
            assert_eq!(s.n_trials, n);
            assert!((s.correlation - target).abs() <= 3.0 * s.std_error, "{a} {b}: {s:?}");
        }
    }

    #[test]
    fn streaming_summary_matches_record_estimator() {
        let plan = SettingsPlan::single(deg(10.0), deg(75.0));
        let cfg = TrialConfig::new(40_000, 11);
        let mut recs = Vec::new();
        let s = run_trials_with(&SourceModel::Singlet, &plan, cfg, |r| {
            recs.push(r.clone());
            Ok(())
        })
        .unwrap();
        let mut from_records = estimate_correlation(&recs).unwrap();
        from_records.seed = Some(11);
        assert_eq!(s[0], from_records);
    }

    #[test]
    fn worker_count_does_not_change_events() {
        let plan = SettingsPlan::leggett(0.4);
        let one = run_trials(&SourceModel::Singlet, &plan, TrialConfig::new(50_000, 5)).unwrap();
        let four = run_trials(&SourceModel::Singlet, &plan, TrialConfig::new(50_000, 5).with_workers(4)).unwrap();
        assert_eq!(one, four);
        let other = run_trials(&SourceModel::Singlet, &plan, TrialConfig::new(50_000, 6)).unwrap();
        assert_ne!(one, other);
    }

    #[test]
    fn conditional_malus_in_a_cap() {
        let a = deg(0.0);
        let b = deg(50.0);
        let f = singlet_distribution(a, b);
        let recs = run_distribution(&f, &SettingPair::new("ab", a, b), TrialConfig::new(1_000_000, 21).with_workers(4)).unwrap();
        // u0 at 60° from a, well inside the term-1 hemisphere.
        let u0 = deg(60.0);
        let cap_cos = 0.1f64.cos();
        let outcomes: Vec<f64> = recs
            .iter()
            .filter(|r| r.u.dot(&u0) >= cap_cos)
            .map(|r| f64::from(r.outcome_a))
            .collect();
        let n = outcomes.len() as f64;
        assert!(n > 1000.0);
        let mean = outcomes.iter().sum::<f64>() / n;
        let var = outcomes.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sigma = (var / n).sqrt();
        // Cap radius 0.1 rad bounds the bias by 1 − cos(0.1) < 0.005.
        assert!((mean - u0.dot(&a)).abs() <= 0.005 + 3.0 * sigma, "{mean} vs {}", u0.dot(&a));
    }

    #[test]
    fn random_settings_within_three_sigma() {
        let mut rng = RngStream::new(99, 0);
        let pairs: Vec<_> = (0..20)
            .map(|_| (sample_uniform_sphere(&mut rng), sample_uniform_sphere(&mut rng)))
            .collect();
        let mut outside = 0;
        for (k, (a, b)) in pairs.into_iter().enumerate() {
            let plan = SettingsPlan::single(a, b);
            let s = run_trials_with(&SourceModel::Singlet, &plan, TrialConfig::new(1_000_000, 1000 + k as u64).with_workers(4), |_| Ok(()))
                .unwrap()
                .remove(0);
            let target = correlation_closed(&singlet_distribution(a, b), a, b);
            if (s.correlation - target).abs() > 3.0 * s.std_error {
                outside += 1;
            }
        }
        // 3σ excursions occur with probability 0.27% each.
        assert!(outside <= 1, "{outside} of 20 outside 3σ");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("events.csv");
        let recs = run_trials(&SourceModel::Singlet, &SettingsPlan::standard_chsh(), TrialConfig::new(2_500, 4)).unwrap();
        assert_eq!(recs.len(), 10_000);
        write_events(&path, &recs).unwrap();
        let back = read_events(&path).unwrap();
        assert_eq!(back.len(), recs.len());
        for (x, y) in recs.iter().zip(&back) {
            assert_eq!(x, y);
            assert_eq!(x.lambda1.x().to_bits(), y.lambda1.x().to_bits());
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), EVENT_CSV_HEADER.join(","));
    }

    #[test]
    fn empty_file_reads_as_no_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        std::fs::write(&path, "").unwrap();
        assert!(read_events(&path).unwrap().is_empty());
        write_events(&path, &[]).unwrap();
        assert!(read_events(&path).unwrap().is_empty());
    }

    #[test]
    fn zero_outcome_rejected_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let recs = synthetic(3, 0, 0, 0, 4.0);
        write_events(&path, &recs).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let fields: Vec<&str> = lines[2].split(',').collect();
        let mut fields: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
        fields[20] = "0".into();
        lines[2] = fields.join(",");
        std::fs::write(&path, lines.join("\n") + "\n").unwrap();
        match read_events(&path) {
            Err(Error::MalformedRow { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("outcome"), "{message}");
            }
            other => panic!("expected malformed row, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_events("/nonexistent/dir/events.csv").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    proptest! {
        #[test]
        fn counts_sum_and_estimator_bounded(pp in 0usize..50, pm in 0usize..50, mp in 0usize..50, mm in 0usize..50, mass in 0.1f64..8.0) {
            prop_assume!(pp + pm + mp + mm > 0);
            let s = estimate_correlation(&synthetic(pp, pm, mp, mm, mass)).unwrap();
            prop_assert_eq!(s.counts.total(), s.n_trials);
            prop_assert_eq!(s.n_trials as usize, pp + pm + mp + mm);
            prop_assert!(s.correlation.abs() <= mass * (1.0 + 1e-15));
        }

        #[test]
        fn real_format_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
            let back: f64 = fmt_real(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
