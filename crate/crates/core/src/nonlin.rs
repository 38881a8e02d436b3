//! r-th order nonlinearity `N_r(f) = min_{g in RM(r,n)} d(f, g)`.

use serde::Serialize;

use crate::bounds::lambda_n;
use crate::error::{Error, Result};
use crate::rmcode::{
    build_basis, gray, jobs_log2, message_hex, pair_blocks, with_pool, PairBlock, PairScanner, RmCodeSpec,
    MAX_ENUMERATION_K,
};
use crate::truth_table::{TruthTable, MAX_SPECTRUM_VARS};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonlinearityResult {
    pub n: u32,
    pub r: u32,
    /// `N_r(f)`.
    pub value: u64,
    /// Message word of a closest codeword.
    pub best_message: u64,
    /// `Y_n = 2^n - 2 N_r(f)`.
    pub y: i64,
    /// `None` when r = 0, where the normalization is not defined.
    pub lambda: Option<f64>,
    pub ratio: Option<f64>,
}

impl NonlinearityResult {
    fn new(n: u32, r: u32, value: u64, best_message: u64) -> Self {
        let y = (1i64 << n) - 2 * value as i64;
        let lambda = lambda_n(n, r).ok();
        NonlinearityResult {
            n,
            r,
            value,
            best_message,
            y,
            lambda,
            ratio: lambda.map(|l| y as f64 / l),
        }
    }

    pub fn k(&self) -> u32 {
        crate::rmcode::code_dimension(self.n, self.r) as u32
    }

    pub fn best_message_hex(&self) -> String {
        message_hex(self.best_message, self.k())
    }

    /// `{n, r, nonlinearity, y, lambda, ratio, best_message_hex}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "r": self.r,
            "nonlinearity": self.value,
            "y": self.y,
            "lambda": self.lambda,
            "ratio": self.ratio,
            "best_message_hex": self.best_message_hex(),
        })
    }
}

/// First-order nonlinearity from the Walsh spectrum:
/// `N_1 = 2^(n-1) - max_a |W_f(a)| / 2`.
pub fn nonlinearity_order1(f: &TruthTable) -> Result<NonlinearityResult> {
    let n = f.n();
    let spectrum = f.walsh_hadamard_capped(MAX_SPECTRUM_VARS)?;
    let (a, w) = spectrum.max_abs();
    let value = ((1i64 << n) - w.unsigned_abs() as i64) as u64 / 2;
    // RM(1, n) basis is [1, x1, ..., xn]: the constant is bit 0.
    let best_message = (a << 1) | (w < 0) as u64;
    Ok(NonlinearityResult::new(n, 1, value, best_message))
}

/// Exact `N_r(f)` by Gray enumeration of RM(r, n); ties go to the smallest
/// Gray rank.
pub fn nonlinearity_exhaustive(f: &TruthTable, r: u32) -> Result<NonlinearityResult> {
    nonlinearity_exhaustive_par(f, r, 1)
}

/// As [`nonlinearity_exhaustive`], splitting the message space over `jobs`
/// workers. The result is independent of `jobs`.
pub fn nonlinearity_exhaustive_par(f: &TruthTable, r: u32, jobs: usize) -> Result<NonlinearityResult> {
    use rayon::prelude::*;

    let n = f.n();
    let spec = RmCodeSpec::new(r, n)?;
    if spec.k() > MAX_ENUMERATION_K {
        return Err(Error::EnumerationCap {
            k: spec.k(),
            max: MAX_ENUMERATION_K,
        });
    }
    let basis = build_basis(&spec);
    let scanner = PairScanner::new(&basis);
    let len = 1u64 << n;

    // (distance, rank) of the best codeword in a block.
    let search = |block: PairBlock| -> (u64, u64) {
        let mut best = (u64::MAX, u64::MAX);
        scanner.scan(f, block, |j, d| {
            if d < best.0 {
                best = (d, 2 * j);
            }
            if len - d < best.0 {
                best = (len - d, 2 * j + 1);
            }
        });
        best
    };

    let blocks = pair_blocks(&spec, jobs_log2(jobs));
    let per_block: Vec<(u64, u64)> = if jobs > 1 {
        with_pool(jobs, || blocks.par_iter().map(|&b| search(b)).collect())
    } else {
        blocks.iter().map(|&b| search(b)).collect()
    };
    let (value, rank) = per_block.into_iter().min().expect("at least one block");
    Ok(NonlinearityResult::new(n, r, value, gray(rank)))
}

/// `N_r(f)` using the spectrum for r = 1 and enumeration otherwise.
pub fn nonlinearity(f: &TruthTable, r: u32) -> Result<NonlinearityResult> {
    if r == 1 && f.n() <= MAX_SPECTRUM_VARS {
        nonlinearity_order1(f)
    } else {
        nonlinearity_exhaustive(f, r)
    }
}

/// `(2^(n-1) - N_r) / sqrt(2^(n-1) C(n, r) ln 2)`.
pub fn normalized_statistic(res: &NonlinearityResult) -> Result<f64> {
    let (n, r) = (res.n, res.r);
    if r == 0 || r > n {
        return Err(Error::Order { r, n, min: 1 });
    }
    let half = (1u64 << (n - 1)) as f64;
    let c = crate::rmcode::binomial(n, r) as f64;
    Ok((half - res.value as f64) / (half * c * std::f64::consts::LN_2).sqrt())
}
