//! Seeded random corpora and the sweep pipeline
//! moments → growth estimate → singular set → bound and conjecture checks.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{
    bound_check, conjecture_check, default_window, estimate_growth, growth_estimators,
    GrowthEstimate, DEFAULT_BOUND_TOL, DEFAULT_CONJECTURE_TOL,
};
use crate::moments::{moment_sequence_with, MomentConfig, DEFAULT_BIT_CAP};
use crate::number::ComplexRational;
use crate::poly::Polynomial;
use crate::spectrum::critical_set;

pub const MIN_SWEEP_N_MAX: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub degree_range: (usize, usize),
    /// Numerators are drawn from `-num_bound..=num_bound`.
    pub num_bound: i64,
    /// Denominators are drawn from `1..=den_bound`.
    pub den_bound: i64,
    pub allow_complex: bool,
    pub count: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            degree_range: (1, 5),
            num_bound: 5,
            den_bound: 4,
            allow_complex: false,
            count: 100,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.degree_range;
        if lo > hi {
            return Err(Error::InvalidInput(format!(
                "degree range ({lo},{hi}) is empty"
            )));
        }
        if self.num_bound < 1 || self.den_bound < 1 {
            return Err(Error::InvalidInput(
                "coefficient bounds must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

fn draw_coefficient(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> ComplexRational {
    let part = |rng: &mut ChaCha8Rng| {
        (
            rng.random_range(-cfg.num_bound..=cfg.num_bound),
            rng.random_range(1..=cfg.den_bound),
        )
    };
    let re = part(rng);
    let im = if cfg.allow_complex { part(rng) } else { (0, 1) };
    ComplexRational::from_parts(re, im)
}

/// `count` polynomials of degree exactly in `degree_range`, deterministic in `seed`.
/// The leading coefficient is redrawn until non-zero.
pub fn generate_corpus(cfg: &GeneratorConfig) -> Result<Vec<Polynomial>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        let d = rng.random_range(cfg.degree_range.0..=cfg.degree_range.1);
        let mut coeffs: Vec<ComplexRational> =
            (0..d).map(|_| draw_coefficient(&mut rng, cfg)).collect();
        let lead = loop {
            let c = draw_coefficient(&mut rng, cfg);
            if !c.is_zero() {
                break c;
            }
        };
        coeffs.push(lead);
        out.push(Polynomial::new(coeffs));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n_max: usize,
    /// Registry name of the growth estimator.
    pub estimator: String,
    /// Defaults to `[n_max/4, n_max]`.
    pub window: Option<(usize, usize)>,
    pub bound_tol: f64,
    pub conjecture_tol: f64,
    pub bit_cap: u64,
}

impl SweepConfig {
    pub fn new(n_max: usize) -> Self {
        Self {
            n_max,
            estimator: "slope".into(),
            window: None,
            bound_tol: DEFAULT_BOUND_TOL,
            conjecture_tol: DEFAULT_CONJECTURE_TOL,
            bit_cap: DEFAULT_BIT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureRecord {
    pub poly_text: String,
    pub degree: usize,
    pub estimate: Option<GrowthEstimate>,
    #[serde(rename = "max_modulus_S")]
    pub max_modulus_s: Option<f64>,
    pub bound_holds: Option<bool>,
    pub conjecture_holds: Option<bool>,
    /// `estimate − max|S|`.
    pub conjecture_gap: Option<f64>,
    /// Least `n >= 1` with `M_n != 0` up to `n_max`.
    pub first_nonzero_after: Option<usize>,
    pub seed: u64,
    pub n_max: usize,
    pub error: Option<String>,
}

impl ConjectureRecord {
    fn blank(f: &Polynomial, seed: u64, n_max: usize) -> Self {
        Self {
            poly_text: f.to_string(),
            degree: f.degree(),
            estimate: None,
            max_modulus_s: None,
            bound_holds: None,
            conjecture_holds: None,
            conjecture_gap: None,
            first_nonzero_after: None,
            seed,
            n_max,
            error: None,
        }
    }
}

fn fill_record(rec: &mut ConjectureRecord, f: &Polynomial, cfg: &SweepConfig) -> Result<()> {
    let seq = moment_sequence_with(
        f,
        cfg.n_max,
        MomentConfig {
            bit_cap: cfg.bit_cap,
        },
    )?;
    rec.first_nonzero_after = seq.first_nonzero_index(1);
    let estimator = growth_estimators().get(&cfg.estimator)?;
    let est = estimate_growth(
        &seq,
        estimator.as_ref(),
        cfg.window.unwrap_or(default_window(cfg.n_max)),
    )?;
    rec.estimate = Some(est);
    let s = critical_set(f)?;
    rec.max_modulus_s = Some(s.max_modulus);
    rec.bound_holds = Some(bound_check(&est, &s, cfg.bound_tol).0);
    let (equal, gap) = conjecture_check(&est, &s, cfg.conjecture_tol);
    rec.conjecture_holds = Some(equal);
    rec.conjecture_gap = Some(gap);
    Ok(())
}

/// One record for one polynomial; a failing stage leaves later fields empty and sets `error`.
pub fn sweep_one(f: &Polynomial, seed: u64, cfg: &SweepConfig) -> ConjectureRecord {
    let mut rec = ConjectureRecord::blank(f, seed, cfg.n_max);
    if let Err(e) = fill_record(&mut rec, f, cfg) {
        rec.error = Some(e.to_string());
    }
    rec
}

/// Runs the pipeline over `polys` in parallel; output is in input order.
pub fn run_sweep_on(
    polys: &[Polynomial],
    seed: u64,
    cfg: &SweepConfig,
) -> Result<Vec<ConjectureRecord>> {
    if cfg.n_max < MIN_SWEEP_N_MAX {
        return Err(Error::InvalidInput(format!(
            "sweep n_max must be >= {MIN_SWEEP_N_MAX}"
        )));
    }
    growth_estimators().get(&cfg.estimator)?;
    Ok(polys.par_iter().map(|f| sweep_one(f, seed, cfg)).collect())
}

pub fn run_sweep(gen: &GeneratorConfig, cfg: &SweepConfig) -> Result<Vec<ConjectureRecord>> {
    run_sweep_on(&generate_corpus(gen)?, gen.seed, cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportHeader {
    pub generated_at_unix: u64,
    pub generator: GeneratorConfig,
    pub n_max: usize,
    pub estimator: String,
    pub records: usize,
}

impl ReportHeader {
    pub fn new(gen: &GeneratorConfig, cfg: &SweepConfig, records: usize) -> Self {
        let generated_at_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            generated_at_unix,
            generator: gen.clone(),
            n_max: cfg.n_max,
            estimator: cfg.estimator.clone(),
            records,
        }
    }
}

/// JSON lines: `{"header": …}` then one record per line.
pub fn write_report<W: Write>(
    mut w: W,
    header: &ReportHeader,
    records: &[ConjectureRecord],
) -> std::io::Result<()> {
    serde_json::to_writer(&mut w, &serde_json::json!({ "header": header }))?;
    writeln!(w)?;
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_csv_summary<W: Write>(w: W, records: &[ConjectureRecord]) -> std::io::Result<()> {
    fn opt<T: ToString>(v: Option<T>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "poly_text",
        "degree",
        "estimate",
        "method",
        "max_modulus_S",
        "bound_holds",
        "conjecture_holds",
        "conjecture_gap",
        "first_nonzero_after",
        "error",
    ])?;
    for r in records {
        out.write_record([
            r.poly_text.clone(),
            r.degree.to_string(),
            opt(r.estimate.map(|e| e.estimate)),
            opt(r.estimate.map(|e| e.method.tag())),
            opt(r.max_modulus_s),
            opt(r.bound_holds),
            opt(r.conjecture_holds),
            opt(r.conjecture_gap),
            opt(r.first_nonzero_after),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()
}
