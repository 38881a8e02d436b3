//! Seeded Monte Carlo sweeps and exact small-n oracles for the maximal
//! correlation `Y_n = 2^n - 2 N_r(f)` of a uniformly random function.
//!
//! Sample `i` of every run is drawn from stream `i` of the manifest seed, so
//! a run is reproducible from `(master_seed, n, r, m)` alone and the result
//! does not depend on the worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bounds::{concentration_bound, expectation_upper_bound, joint_tail_bound, lambda_n, BoundReport};
use crate::error::{Error, Result};
use crate::nonlin::{nonlinearity, nonlinearity_exhaustive, nonlinearity_order1, NonlinearityResult};
use crate::rmcode::{binomial, with_pool, RmCodeSpec, MAX_ENUMERATION_K};
use crate::sampling::{sample_uniform, SeedSpec, DEFAULT_MASTER_SEED, STREAM_FORMAT_VERSION};
use crate::truth_table::{TruthTable, MAX_SPECTRUM_VARS};

/// Largest `n` for which every function can be enumerated.
pub const MAX_ORACLE_VARS: u32 = 4;

/// Header of the per-sample CSV.
pub const SAMPLE_CSV_HEADER: &str = "n,r,sample_index,nonlinearity,y,lambda,ratio";

/// Samples computed and written per batch.
const CHUNK: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Converge,
    Joint,
    Concentration,
    ExactOracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest code dimension searched exhaustively.
    pub max_enumeration_k: u32,
    /// Largest `n` for the r = 1 spectrum path.
    pub max_spectrum_vars: u32,
    /// Largest `n` enumerated by the exact oracle.
    pub max_oracle_vars: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_enumeration_k: MAX_ENUMERATION_K,
            max_spectrum_vars: MAX_SPECTRUM_VARS,
            max_oracle_vars: MAX_ORACLE_VARS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub kind: ExperimentKind,
    pub n_values: Vec<u32>,
    pub r: u32,
    pub samples: u64,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub caps: Caps,
    pub jobs: usize,
}

impl ExperimentManifest {
    /// A manifest with the default seed and caps, running on one worker.
    pub fn new(kind: ExperimentKind, n_values: Vec<u32>, r: u32, samples: u64) -> Self {
        ExperimentManifest {
            kind,
            n_values,
            r,
            samples,
            master_seed: DEFAULT_MASTER_SEED,
            output_path: None,
            caps: Caps::default(),
            jobs: 1,
        }
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn seed(&self) -> SeedSpec {
        SeedSpec::new(self.master_seed, 0)
    }

    /// Checks every `(n, r)` against the caps before any work starts.
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::param("n_values", "[]", "at least one n is required"));
        }
        let sampled = self.kind != ExperimentKind::ExactOracle;
        if sampled && self.samples == 0 {
            return Err(Error::param("samples", 0, "must be >= 1"));
        }
        for &n in &self.n_values {
            let spec = RmCodeSpec::new(self.r, n)?;
            if self.kind == ExperimentKind::ExactOracle && n > self.caps.max_oracle_vars {
                return Err(Error::VariableCount {
                    n,
                    max: self.caps.max_oracle_vars,
                });
            }
            if self.kind != ExperimentKind::ExactOracle && self.r == 0 {
                return Err(Error::Order { r: 0, n, min: 1 });
            }
            if self.kind == ExperimentKind::Joint {
                continue;
            }
            if self.r == 1 && self.kind != ExperimentKind::ExactOracle {
                if n > self.caps.max_spectrum_vars {
                    return Err(Error::SpectrumCap {
                        n,
                        max: self.caps.max_spectrum_vars,
                    });
                }
            } else if spec.k() > self.caps.max_enumeration_k {
                return Err(Error::EnumerationCap {
                    k: spec.k(),
                    max: self.caps.max_enumeration_k,
                });
            }
        }
        Ok(())
    }

    fn expect_kind(&self, kind: ExperimentKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::param(
                "kind",
                format!("{:?}", self.kind),
                "wrong runner for this manifest",
            ))
        }
    }
}

/// Sub-stream `i` of `seed`.
pub fn derive_stream(seed: &SeedSpec, i: u64) -> SeedSpec {
    seed.derive(i)
}

/// Formats `x` with `digits` significant digits, like C's `%g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub n: u32,
    pub r: u32,
    pub sample_index: u64,
    pub nonlinearity: u64,
    pub y: i64,
    pub lambda: f64,
    pub ratio: f64,
}

impl SampleRecord {
    fn from_result(sample_index: u64, res: &NonlinearityResult) -> Self {
        let lambda = res.lambda.expect("r >= 1 checked by the manifest");
        SampleRecord {
            n: res.n,
            r: res.r,
            sample_index,
            nonlinearity: res.value,
            y: res.y,
            lambda,
            ratio: res.y as f64 / lambda,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.r,
            self.sample_index,
            self.nonlinearity,
            self.y,
            format_sig(self.lambda, 9),
            format_sig(self.ratio, 9)
        )
    }
}

/// Computes `N_r` of samples `range` at `n`, in index order.
fn sample_batch(
    seed: &SeedSpec,
    n: u32,
    r: u32,
    range: std::ops::Range<u64>,
    jobs: usize,
) -> Result<Vec<NonlinearityResult>> {
    use rayon::prelude::*;

    let one = |i: u64| -> Result<NonlinearityResult> {
        let f = sample_uniform(&derive_stream(seed, i), n)?;
        nonlinearity(&f, r)
    };
    if jobs > 1 {
        with_pool(jobs, || range.into_par_iter().map(one).collect())
    } else {
        range.map(one).collect()
    }
}

/// Per-`n` statistics of a convergence sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub n: u32,
    pub r: u32,
    pub m: u64,
    pub master_seed: u64,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub mean_y: f64,
    pub e_ub: f64,
    pub e_ub_ratio: f64,
    pub frac_y_ge_lambda: f64,
    pub format_version: String,
}

impl ConvergenceSummary {
    /// Summary of the records of one `n`; `std_ratio` is the sample standard
    /// deviation.
    pub fn from_records(records: &[SampleRecord], master_seed: u64) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::param("records", 0, "need at least one sample"))?;
        let (n, r) = (first.n, first.r);
        if records.iter().any(|s| s.n != n || s.r != r) {
            return Err(Error::param("records", "mixed", "all records must share (n, r)"));
        }
        let m = records.len() as f64;
        let mean_ratio = records.iter().map(|s| s.ratio).sum::<f64>() / m;
        let var = if records.len() > 1 {
            records.iter().map(|s| (s.ratio - mean_ratio).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        let lambda = lambda_n(n, r)?;
        let e_ub = expectation_upper_bound(n, r)?;
        Ok(ConvergenceSummary {
            n,
            r,
            m: records.len() as u64,
            master_seed,
            mean_ratio,
            std_ratio: var.sqrt(),
            min_ratio: records.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min),
            max_ratio: records.iter().map(|s| s.ratio).fold(f64::NEG_INFINITY, f64::max),
            mean_y: records.iter().map(|s| s.y as f64).sum::<f64>() / m,
            e_ub,
            e_ub_ratio: e_ub / lambda,
            frac_y_ge_lambda: records.iter().filter(|s| s.y as f64 >= lambda).count() as f64 / m,
            format_version: STREAM_FORMAT_VERSION.to_string(),
        })
    }

    /// `mean_y <= e_ub + slack * std(Y) / sqrt(m)`.
    pub fn within_expectation_bound(&self, slack: f64) -> bool {
        let lambda = self.e_ub / self.e_ub_ratio;
        let std_y = self.std_ratio * lambda;
        self.mean_y <= self.e_ub + slack * std_y / (self.m as f64).sqrt()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain struct")
    }
}

/// Runs a convergence sweep, writing the CSV header and one row per sample
/// to `out` in `(n, sample_index)` order, flushing after every batch.
pub fn run_convergence<W: Write>(manifest: &ExperimentManifest, mut out: W) -> Result<Vec<ConvergenceSummary>> {
    manifest.expect_kind(ExperimentKind::Converge)?;
    manifest.validate()?;
    let seed = manifest.seed();
    writeln!(out, "{SAMPLE_CSV_HEADER}")?;
    let mut summaries = Vec::with_capacity(manifest.n_values.len());
    for &n in &manifest.n_values {
        let mut records = Vec::with_capacity(manifest.samples as usize);
        let mut start = 0;
        while start < manifest.samples {
            let end = (start + CHUNK).min(manifest.samples);
            let batch = sample_batch(&seed, n, manifest.r, start..end, manifest.jobs)?;
            for (i, res) in (start..end).zip(&batch) {
                let record = SampleRecord::from_result(i, res);
                writeln!(out, "{}", record.csv_row())?;
                records.push(record);
            }
            out.flush()?;
            start = end;
        }
        summaries.push(ConvergenceSummary::from_records(&records, manifest.master_seed)?);
    }
    Ok(summaries)
}

/// Monte Carlo standard error of a frequency.
fn mc_sigma(p: f64, m: u64) -> f64 {
    (p * (1.0 - p) / m as f64).sqrt()
}

/// `theta_j = j 2^((n+1)/2) / 4` for `j = 0..=12`.
pub fn theta_grid(n: u32) -> Vec<f64> {
    let step = ((n as f64 + 1.0) / 2.0).exp2() / 4.0;
    (0..=12).map(|j| j as f64 * step).collect()
}

/// Empirical `P[|Y_n - mean| >= theta]` over the theta grid against the
/// concentration bound; one report per `(n, theta)`.
pub fn run_concentration(manifest: &ExperimentManifest) -> Result<Vec<BoundReport>> {
    manifest.expect_kind(ExperimentKind::Concentration)?;
    manifest.validate()?;
    let seed = manifest.seed();
    let m = manifest.samples;
    let mut reports = Vec::new();
    for &n in &manifest.n_values {
        let ys: Vec<i64> = sample_batch(&seed, n, manifest.r, 0..m, manifest.jobs)?
            .iter()
            .map(|res| res.y)
            .collect();
        let mean = ys.iter().sum::<i64>() as f64 / m as f64;
        for theta in theta_grid(n) {
            let hits = ys.iter().filter(|&&y| (y as f64 - mean).abs() >= theta).count();
            let p = hits as f64 / m as f64;
            let bound = concentration_bound(n, theta)?;
            let sigma = mc_sigma(p, m);
            reports.push(
                BoundReport::new("concentration", Some(n), Some(manifest.r), bound)
                    .param("theta", theta)
                    .param("mean_y", mean)
                    .param("m", m as f64)
                    .param("mc_sigma", sigma)
                    .compare(p, Some(p <= bound + 3.0 * sigma)),
            );
        }
    }
    Ok(reports)
}

/// Checks that `g`, `h` have degree at most `r` and satisfy
/// `|<g, h>| <= 2^n / C(n, r)`.
pub fn check_joint_hypothesis(g: &TruthTable, h: &TruthTable, r: u32) -> Result<()> {
    let n = g.n();
    let spec = RmCodeSpec::new(r, n)?;
    for (name, t) in [("g", g), ("h", h)] {
        if !spec.contains(t)? {
            return Err(Error::Hypothesis(format!("{name} has degree {} > r={r}", t.degree())));
        }
    }
    let inner = g.scalar_product_signs(h)?;
    let c = binomial(n, r);
    // |<g,h>| <= 2^n / C  <=>  |<g,h>| C <= 2^n, exact in integers.
    if inner.unsigned_abs() as u128 * c as u128 > 1u128 << n {
        return Err(Error::Hypothesis(format!(
            "|<g,h>| = {} exceeds 2^{n}/C({n},{r}) = {}",
            inner.unsigned_abs(),
            Ratio::new(1u64 << n, c)
        )));
    }
    Ok(())
}

/// Exact counts of the events `Y_g >= lambda`, `Y_h >= lambda` over all
/// `2^(2^n)` functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JointCounts {
    pub total: u64,
    pub g: u64,
    pub h: u64,
    pub joint: u64,
}

impl JointCounts {
    pub fn joint_probability(&self) -> Ratio<u64> {
        Ratio::new(self.joint, self.total)
    }

    pub fn g_probability(&self) -> Ratio<u64> {
        Ratio::new(self.g, self.total)
    }

    pub fn h_probability(&self) -> Ratio<u64> {
        Ratio::new(self.h, self.total)
    }
}

fn all_tables(n: u32) -> Result<impl Iterator<Item = TruthTable>> {
    if n == 0 || n > MAX_ORACLE_VARS {
        return Err(Error::VariableCount {
            n,
            max: MAX_ORACLE_VARS,
        });
    }
    let count = 1u64 << (1u64 << n);
    Ok((0..count).map(move |w| TruthTable::from_words(n, vec![w]).expect("fits in one word")))
}

/// Exact joint tail over every function on `g.n() <= 4` variables.
pub fn exact_joint_counts(g: &TruthTable, h: &TruthTable, lambda: f64) -> Result<JointCounts> {
    g.scalar_product_signs(h)?;
    let mut counts = JointCounts {
        total: 0,
        g: 0,
        h: 0,
        joint: 0,
    };
    for f in all_tables(g.n())? {
        let a = f.correlation_y(g)? as f64 >= lambda;
        let b = f.correlation_y(h)? as f64 >= lambda;
        counts.total += 1;
        counts.g += a as u64;
        counts.h += b as u64;
        counts.joint += (a && b) as u64;
    }
    Ok(counts)
}

/// Estimates `P[Y_g >= lambda_n, Y_h >= lambda_n]` and compares it with the
/// joint tail bound. For `n <= 4` an exact report follows the estimate.
pub fn run_joint(manifest: &ExperimentManifest, g: &TruthTable, h: &TruthTable) -> Result<Vec<BoundReport>> {
    use rayon::prelude::*;

    manifest.expect_kind(ExperimentKind::Joint)?;
    manifest.validate()?;
    let n = g.n();
    if manifest.n_values != [n] || h.n() != n {
        return Err(Error::param(
            "n_values",
            format!("{:?}", manifest.n_values),
            "joint runs take exactly the n of g and h",
        ));
    }
    let r = manifest.r;
    check_joint_hypothesis(g, h, r)?;
    let lambda = lambda_n(n, r)?;
    let bound = joint_tail_bound(n, r)?;
    let inner = g.scalar_product_signs(h)?;
    let seed = manifest.seed();
    let m = manifest.samples;

    let one = |i: u64| -> Result<(bool, bool)> {
        let f = sample_uniform(&derive_stream(&seed, i), n)?;
        Ok((
            f.correlation_y(g)? as f64 >= lambda,
            f.correlation_y(h)? as f64 >= lambda,
        ))
    };
    let hits: Vec<(bool, bool)> = if manifest.jobs > 1 {
        with_pool(manifest.jobs, || (0..m).into_par_iter().map(one).collect::<Result<_>>())?
    } else {
        (0..m).map(one).collect::<Result<_>>()?
    };
    let freq = |pred: fn(&(bool, bool)) -> bool| hits.iter().filter(|x| pred(x)).count() as f64 / m as f64;
    let p_joint = freq(|x| x.0 && x.1);
    let (p_g, p_h) = (freq(|x| x.0), freq(|x| x.1));
    let sigma = mc_sigma(p_joint, m);

    let mut reports = vec![BoundReport::new("joint_tail_mc", Some(n), Some(r), bound)
        .param("inner", inner as f64)
        .param("lambda", lambda)
        .param("m", m as f64)
        .param("marginal_g", p_g)
        .param("marginal_h", p_h)
        .param("product", p_g * p_h)
        .param("mc_sigma", sigma)
        .compare(p_joint, Some(p_joint <= bound + 3.0 * sigma))];

    if n <= MAX_ORACLE_VARS {
        let exact = exact_joint_counts(g, h, lambda)?;
        let to_f = |q: Ratio<u64>| *q.numer() as f64 / *q.denom() as f64;
        let p = to_f(exact.joint_probability());
        let (eg, eh) = (to_f(exact.g_probability()), to_f(exact.h_probability()));
        reports.push(
            BoundReport::new("joint_tail_exact", Some(n), Some(r), bound)
                .param("inner", inner as f64)
                .param("lambda", lambda)
                .param("marginal_g", eg)
                .param("marginal_h", eh)
                .param("product", eg * eh)
                .compare(p, Some(p <= bound)),
        );
    }
    Ok(reports)
}

/// Exact distribution of `N_r` over all functions on `n <= 4` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    pub n: u32,
    pub r: u32,
    pub counts: BTreeMap<u64, u64>,
}

impl ExactDistribution {
    /// `log2` of the number of functions, `2^n`.
    pub fn denominator_log2(&self) -> u32 {
        1 << self.n
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn mean_nr(&self) -> Ratio<u64> {
        let num: u64 = self.counts.iter().map(|(v, c)| v * c).sum();
        Ratio::new(num, self.total())
    }

    /// `E[Y_n] = 2^n - 2 E[N_r]`.
    pub fn mean_y(&self) -> Ratio<u64> {
        Ratio::from_integer(1u64 << self.n) - self.mean_nr() * 2
    }

    pub fn mean_y_f64(&self) -> f64 {
        let q = self.mean_y();
        *q.numer() as f64 / *q.denom() as f64
    }

    /// Exact `P[Y_n >= t]`.
    pub fn y_tail(&self, t: f64) -> Ratio<u64> {
        let len = 1i64 << self.n;
        let hits: u64 = self
            .counts
            .iter()
            .filter(|(&v, _)| (len - 2 * v as i64) as f64 >= t)
            .map(|(_, c)| c)
            .sum();
        Ratio::new(hits, self.total())
    }

    /// `{n, r, denominator_log2, counts: [[value, count], ...], mean_Nr_num, mean_Nr_den}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mean = self.mean_nr();
        serde_json::json!({
            "n": self.n,
            "r": self.r,
            "denominator_log2": self.denominator_log2(),
            "counts": self.counts.iter().map(|(v, c)| [*v, *c]).collect::<Vec<_>>(),
            "mean_Nr_num": mean.numer(),
            "mean_Nr_den": mean.denom(),
        })
    }
}

fn distribution(n: u32, r: u32, mut nr: impl FnMut(&TruthTable) -> Result<u64>) -> Result<ExactDistribution> {
    let mut counts = BTreeMap::new();
    for f in all_tables(n)? {
        *counts.entry(nr(&f)?).or_insert(0) += 1;
    }
    Ok(ExactDistribution { n, r, counts })
}

/// `N_r` of every function on `n <= 4` variables by exhaustive search. For
/// r = 1 the spectrum path is run too and must agree count for count.
pub fn exact_oracle(n: u32, r: u32) -> Result<ExactDistribution> {
    RmCodeSpec::new(r, n)?;
    let dist = distribution(n, r, |f| Ok(nonlinearity_exhaustive(f, r)?.value))?;
    if r == 1 {
        let spectral = distribution(n, r, |f| Ok(nonlinearity_order1(f)?.value))?;
        if spectral != dist {
            return Err(Error::Consistency(format!(
                "spectrum and exhaustive N_1 distributions differ at n={n}"
            )));
        }
    }
    Ok(dist)
}

/// The spectrum-path distribution alone, for r = 1.
pub fn exact_oracle_spectral(n: u32) -> Result<ExactDistribution> {
    distribution(n, 1, |f| Ok(nonlinearity_order1(f)?.value))
}

/// The exhaustive-path distribution alone.
pub fn exact_oracle_exhaustive(n: u32, r: u32) -> Result<ExactDistribution> {
    RmCodeSpec::new(r, n)?;
    distribution(n, r, |f| Ok(nonlinearity_exhaustive(f, r)?.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(119.14551715388909, 9), "119.145517");
        assert_eq!(format_sig(1.0, 9), "1");
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(-0.5, 9), "-0.5");
        assert_eq!(format_sig(1.007_171_758_254_297, 9), "1.00717176");
        assert_eq!(format_sig(1234567890.0, 9), "1.23456789e+09");
        assert_eq!(format_sig(0.000012345, 3), "1.23e-05");
        assert_eq!(format_sig(0.00012345, 3), "0.000123");
        assert_eq!(format_sig(999999999.7, 9), "1e+09");
    }

    #[test]
    fn oracle_small_cases() {
        let d = exact_oracle(1, 1).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(0, 4)]));
        assert_eq!(d.mean_nr(), Ratio::from_integer(0));

        let d = exact_oracle(2, 2).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(0, 16)]));

        // RM(1,2) has 8 codewords; the other 8 functions have odd weight.
        let d = exact_oracle(2, 1).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(0, 8), (1, 8)]));
        assert_eq!(d.mean_y(), Ratio::from_integer(3));

        let j = d.to_json();
        assert_eq!(j["denominator_log2"], 4);
        assert_eq!(j["counts"], serde_json::json!([[0, 8], [1, 8]]));
        assert_eq!(
            (j["mean_Nr_num"].as_u64(), j["mean_Nr_den"].as_u64()),
            (Some(1), Some(2))
        );
    }

    #[test]
    fn oracle_n3_distribution() {
        // N_1 over B_3: 16 affine, 128 at distance 1, 112 at distance 2.
        let d = exact_oracle(3, 1).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(0, 16), (1, 128), (2, 112)]));
        assert!(exact_oracle(5, 1).is_err());
    }

    #[test]
    fn joint_hypothesis() {
        let x1 = TruthTable::coordinate(4, 1).unwrap();
        let x2 = TruthTable::coordinate(4, 2).unwrap();
        check_joint_hypothesis(&x1, &x2, 1).unwrap();
        assert!(matches!(check_joint_hypothesis(&x1, &x1, 1), Err(Error::Hypothesis(_))));
        let x1x2 = TruthTable::monomial(4, 0b11).unwrap();
        assert!(matches!(
            check_joint_hypothesis(&x1, &x1x2, 1),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn joint_marginal_is_exact_tail() {
        let x1 = TruthTable::coordinate(4, 1).unwrap();
        let x2 = TruthTable::coordinate(4, 2).unwrap();
        let c = exact_joint_counts(&x1, &x2, lambda_n(4, 1).unwrap()).unwrap();
        assert_eq!(c.total, 65536);
        assert_eq!(c.g_probability(), Ratio::new(697, 65536));
        assert_eq!(c.h, c.g);
    }

    #[test]
    fn manifest_caps() {
        let m = ExperimentManifest::new(ExperimentKind::Converge, vec![8], 3, 10);
        assert!(matches!(m.validate(), Err(Error::EnumerationCap { .. })));
        let m = ExperimentManifest::new(ExperimentKind::Converge, vec![28], 1, 10);
        assert!(matches!(m.validate(), Err(Error::SpectrumCap { .. })));
        let m = ExperimentManifest::new(ExperimentKind::ExactOracle, vec![5], 1, 0);
        assert!(m.validate().is_err());
        let m = ExperimentManifest::new(ExperimentKind::Converge, vec![6], 0, 10);
        assert!(m.validate().is_err());
        let m = ExperimentManifest::new(ExperimentKind::Converge, vec![6], 2, 0);
        assert!(m.validate().is_err());
        let m = ExperimentManifest::new(ExperimentKind::Converge, vec![4, 7], 2, 3);
        m.validate().unwrap();
    }

    #[test]
    fn convergence_rows_and_summary() {
        let m = ExperimentManifest::new(ExperimentKind::Converge, vec![6, 8], 1, 40).with_seed(5);
        let mut out = Vec::new();
        let summaries = run_convergence(&m, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SAMPLE_CSV_HEADER));
        let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 80);
        for (idx, row) in rows.iter().enumerate() {
            let n: i64 = row[0].parse().unwrap();
            assert_eq!(row[2].parse::<usize>().unwrap(), idx % 40);
            let value: i64 = row[3].parse().unwrap();
            let y: i64 = row[4].parse().unwrap();
            assert_eq!(y, (1 << n) - 2 * value);
            let lambda: f64 = row[5].parse().unwrap();
            let ratio: f64 = row[6].parse().unwrap();
            assert!((ratio - y as f64 / lambda).abs() <= 1e-8 * ratio.abs().max(1e-300));
        }
        assert_eq!(summaries.len(), 2);
        let s = &summaries[0];
        assert_eq!((s.n, s.r, s.m, s.master_seed), (6, 1, 40, 5));
        assert!(s.min_ratio <= s.mean_ratio && s.mean_ratio <= s.max_ratio);
        assert!((s.e_ub_ratio - (7.0f64 / 6.0).sqrt()).abs() < 1e-12);
        assert_eq!(s.format_version, STREAM_FORMAT_VERSION);
    }

    #[test]
    fn convergence_is_worker_independent() {
        let base = ExperimentManifest::new(ExperimentKind::Converge, vec![5], 2, 12).with_seed(9);
        let run = |jobs| {
            let mut out = Vec::new();
            let s = run_convergence(&base.clone().with_jobs(jobs), &mut out).unwrap();
            (out, serde_json::to_string(&s).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, run(1));
    }

    #[test]
    fn concentration_grid() {
        assert_eq!(theta_grid(10).len(), 13);
        assert!((theta_grid(10)[4] - 2f64.powf(5.5)).abs() < 1e-12);
        let m = ExperimentManifest::new(ExperimentKind::Concentration, vec![8], 1, 200);
        let reports = run_concentration(&m).unwrap();
        assert_eq!(reports.len(), 13);
        assert_eq!(reports[0].comparison, Some(1.0));
        assert_eq!(reports[0].bound, 1.0);
        assert!(reports.iter().all(|r| r.satisfied == Some(true)));
    }

    #[test]
    fn joint_runner() {
        let x1 = TruthTable::coordinate(4, 1).unwrap();
        let x2 = TruthTable::coordinate(4, 2).unwrap();
        let m = ExperimentManifest::new(ExperimentKind::Joint, vec![4], 1, 5000);
        let reports = run_joint(&m, &x1, &x2).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[1].name, "joint_tail_exact");
        assert_eq!(reports[1].satisfied, Some(true));
        assert!(run_joint(&m, &x1, &x1).is_err());
        let wrong = ExperimentManifest::new(ExperimentKind::Joint, vec![5], 1, 10);
        assert!(run_joint(&wrong, &x1, &x2).is_err());
    }

    #[test]
    fn derive_stream_on_default_seed() {
        let s = SeedSpec::default();
        assert_eq!(derive_stream(&s, 3), derive_stream(&s, 3));
        let a = sample_uniform(&derive_stream(&s, 0), 8).unwrap();
        let b = sample_uniform(&derive_stream(&s, 1), 8).unwrap();
        assert_ne!(a.words(), b.words());
    }
}
