//! Closed-form evaluators for the tail and moment bounds used in the
//! convergence argument, plus exact and log-domain binomial tails.
//!
//! "log 2" in every normalization is the natural logarithm. Probability
//! bounds that can underflow are also available as base-2 logarithms.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rmcode::{binomial, code_dimension};
use crate::truth_table::TruthTable;

/// Largest `n` accepted by the closed-form evaluators.
pub const MAX_BOUND_VARS: u32 = 60;
/// Largest number of summands for [`binomial_tail`] and [`mgf_pair`].
pub const MAX_TAIL_LEN: u64 = 1 << 24;
/// Largest number of summands for [`binomial_tail_exact`].
pub const MAX_EXACT_TAIL_LEN: u64 = 1 << 16;
/// Largest `|t1|`, `|t2|` accepted by [`mgf_pair`].
pub const MAX_MGF_T: f64 = 10.0;

fn check_order(n: u32, r: u32, min_r: u32) -> Result<()> {
    if n == 0 || n > MAX_BOUND_VARS {
        return Err(Error::VariableCount { n, max: MAX_BOUND_VARS });
    }
    if r < min_r || r > n {
        return Err(Error::Order { r, n, min: min_r });
    }
    Ok(())
}

/// `lambda_n = sqrt(2^(n+1) C(n, r) ln 2)`.
pub fn lambda_n(n: u32, r: u32) -> Result<f64> {
    check_order(n, r, 1)?;
    Ok(((n as f64 + 1.0).exp2() * binomial(n, r) as f64 * LN_2).sqrt())
}

/// `sqrt(2^(n+1) k ln 2)` with `k = 1 + C(n,1) + ... + C(n,r)`, an upper
/// bound on `E[Y_n]`.
pub fn expectation_upper_bound(n: u32, r: u32) -> Result<f64> {
    check_order(n, r, 0)?;
    Ok(((n as f64 + 1.0).exp2() * code_dimension(n, r) as f64 * LN_2).sqrt())
}

/// `min(1, 2 exp(-theta^2 / 2^(n+1)))`.
pub fn concentration_bound(n: u32, theta: f64) -> Result<f64> {
    if n == 0 || n > MAX_BOUND_VARS {
        return Err(Error::VariableCount { n, max: MAX_BOUND_VARS });
    }
    if theta.is_nan() || theta < 0.0 {
        return Err(Error::param("theta", theta, "must be >= 0"));
    }
    Ok((2.0 * (-theta * theta / (n as f64 + 1.0).exp2()).exp()).min(1.0))
}

/// Exact joint moment generating function of two signed correlations and
/// its subgaussian bound, both as natural logarithms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MgfPair {
    pub ln_exact: f64,
    pub ln_bound: f64,
}

impl MgfPair {
    pub fn exact(&self) -> f64 {
        self.ln_exact.exp()
    }

    pub fn bound(&self) -> f64 {
        self.ln_bound.exp()
    }

    /// `exact <= bound * (1 + rel_slack)`, compared in log domain.
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.ln_exact <= self.ln_bound + rel_slack.ln_1p()
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `E[exp(t1 <X, g> + t2 <X, h>)]` for uniform `X` in `{-1, 1}^N`, where
/// `g`, `h` are the sign vectors of the tables, against
/// `exp(N (t1^2 + t2^2) / 2 + t1 t2 <g, h>)`.
pub fn mgf_pair(g: &TruthTable, h: &TruthTable, t1: f64, t2: f64) -> Result<MgfPair> {
    let inner = g.scalar_product_signs(h)?;
    mgf_pair_from_overlap(g.len(), inner, t1, t2)
}

/// [`mgf_pair`] for sign vectors of length `len` with scalar product `inner`.
pub fn mgf_pair_from_overlap(len: u64, inner: i64, t1: f64, t2: f64) -> Result<MgfPair> {
    if len == 0 || len > MAX_TAIL_LEN {
        return Err(Error::param("N", len, "must lie in 1..=2^24"));
    }
    if inner.unsigned_abs() > len || (len as i64 - inner) % 2 != 0 {
        return Err(Error::param("inner", inner, "not a scalar product of two sign vectors"));
    }
    for (name, t) in [("t1", t1), ("t2", t2)] {
        if t.is_nan() || t.abs() > MAX_MGF_T {
            return Err(Error::param(name, t, "must satisfy |t| <= 10"));
        }
    }
    // Coordinates where the signs agree contribute cosh(t1 + t2), the rest
    // cosh(t1 - t2).
    let disagree = (len as i64 - inner) / 2;
    let agree = len as i64 - disagree;
    let ln_exact = agree as f64 * ln_cosh(t1 + t2) + disagree as f64 * ln_cosh(t1 - t2);
    let ln_bound = len as f64 * (t1 * t1 + t2 * t2) / 2.0 + t1 * t2 * inner as f64;
    Ok(MgfPair { ln_exact, ln_bound })
}

/// `log2` of `4 / 4^C(n, r)`.
pub fn joint_tail_bound_log2(n: u32, r: u32) -> Result<f64> {
    check_order(n, r, 1)?;
    Ok(2.0 - 2.0 * binomial(n, r) as f64)
}

/// `4 / 4^C(n, r)`, the bound on `P[Y_g >= lambda, Y_h >= lambda]` for
/// nearly orthogonal `g`, `h`.
pub fn joint_tail_bound(n: u32, r: u32) -> Result<f64> {
    Ok(joint_tail_bound_log2(n, r)?.exp2())
}

/// `log2` of `1 / (3 2^C sqrt(C))`, `C = C(n, r)`.
pub fn pr_lb_bound_log2(n: u32, r: u32) -> Result<f64> {
    check_order(n, r, 1)?;
    let c = binomial(n, r) as f64;
    Ok(-(3f64.log2()) - c - 0.5 * c.log2())
}

/// Lower bound on `P[X_1 + ... + X_{2^n} >= lambda_n]`, valid for large n.
pub fn pr_lb_bound(n: u32, r: u32) -> Result<f64> {
    Ok(pr_lb_bound_log2(n, r)?.exp2())
}

/// `log2` of `2^-C / sqrt(4 pi C ln 2)`.
pub fn feller_tail_approx_log2(n: u32, r: u32) -> Result<f64> {
    check_order(n, r, 1)?;
    let c = binomial(n, r) as f64;
    Ok(-c - 0.5 * (4.0 * PI * c * LN_2).log2())
}

/// Normal-tail approximation of `P[X_1 + ... + X_{2^n} >= lambda_n]`.
pub fn feller_tail_approx(n: u32, r: u32) -> Result<f64> {
    Ok(feller_tail_approx_log2(n, r)?.exp2())
}

/// `sqrt(4 pi ln 2)`, which must stay below 3 for the lower bound to follow
/// from the approximation.
pub fn feller_constant() -> f64 {
    (4.0 * PI * LN_2).sqrt()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", alpha, "must lie in (0, 1)"))
    }
}

/// `log2` of `4^(-alpha C(n, r))`.
pub fn lb_event_bound_log2(n: u32, r: u32, alpha: f64) -> Result<f64> {
    check_order(n, r, 1)?;
    check_alpha(alpha)?;
    Ok(-2.0 * alpha * binomial(n, r) as f64)
}

/// `4^(-alpha C(n, r))`.
pub fn lb_event_bound(n: u32, r: u32, alpha: f64) -> Result<f64> {
    Ok(lb_event_bound_log2(n, r, alpha)?.exp2())
}

/// The two second-order inclusion–exclusion terms for a separated set of
/// size `set_size`: `(|S| pr_lb_bound, |S|^2 / 2 joint_tail_bound)`.
pub fn bonferroni_terms(n: u32, r: u32, set_size: f64) -> Result<(f64, f64)> {
    if !set_size.is_finite() || set_size < 1.0 {
        return Err(Error::param("set_size", set_size, "must be finite and >= 1"));
    }
    let s = set_size.log2();
    let first = (s + pr_lb_bound_log2(n, r)?).exp2();
    let second = (2.0 * s - 1.0 + joint_tail_bound_log2(n, r)?).exp2();
    Ok((first, second))
}

/// `2^((1 - alpha) C(n, r))`, the separated-set size the lower bound uses.
pub fn separated_set_target(n: u32, r: u32, alpha: f64) -> Result<f64> {
    check_order(n, r, 1)?;
    check_alpha(alpha)?;
    Ok(((1.0 - alpha) * binomial(n, r) as f64).exp2())
}

// ---------------------------------------------------------------------------
// Binomial tails of S_N = X_1 + ... + X_N with fair +-1 summands.

/// Smallest number of +1 summands `k` with `2k - N >= t`, or `None` when no
/// outcome reaches `t`.
fn tail_start(len: u64, t: f64) -> Result<Option<u64>> {
    if len == 0 || len > MAX_TAIL_LEN {
        return Err(Error::param("N", len, "must lie in 1..=2^24"));
    }
    if t.is_nan() {
        return Err(Error::param("t", t, "must be a number"));
    }
    let nf = len as f64;
    if t > nf {
        return Ok(None);
    }
    if t <= -nf {
        return Ok(Some(0));
    }
    Ok(Some(((nf + t) / 2.0).ceil() as u64))
}

/// Exact tail as `numerator / 2^denominator_log2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactTail {
    pub numerator: BigUint,
    pub denominator_log2: u64,
}

impl ExactTail {
    pub fn to_f64(&self) -> f64 {
        if self.numerator.is_zero() {
            return 0.0;
        }
        let bits = self.numerator.bits();
        let (top, shift) = if bits > 64 {
            ((&self.numerator >> (bits - 64)).to_u64().unwrap(), bits - 64)
        } else {
            (self.numerator.to_u64().unwrap(), 0)
        };
        let e = shift as f64 - self.denominator_log2 as f64;
        if e >= -1000.0 {
            top as f64 * e.exp2()
        } else {
            ((top as f64).ln() + e * LN_2).exp()
        }
    }
}

/// `P[S_N >= t]` computed exactly with big integers, `N <= 2^16`.
pub fn binomial_tail_exact(len: u64, t: f64) -> Result<ExactTail> {
    if len > MAX_EXACT_TAIL_LEN {
        return Err(Error::param("N", len, "exact mode needs N <= 2^16"));
    }
    let numerator = match tail_start(len, t)? {
        None => BigUint::zero(),
        Some(0) => BigUint::one() << len,
        Some(k0) if 2 * k0 > len => upper_binomial_sum(len, k0),
        Some(k0) => (BigUint::one() << len) - upper_binomial_sum(len, len - k0 + 1),
    };
    Ok(ExactTail {
        numerator,
        denominator_log2: len,
    })
}

// sum_{k >= k0} C(N, k), walking down from C(N, N) = 1.
fn upper_binomial_sum(len: u64, k0: u64) -> BigUint {
    let mut term = BigUint::one();
    let mut sum = BigUint::zero();
    let mut k = len;
    loop {
        sum += &term;
        if k == k0 || k == 0 {
            break;
        }
        term = term * k / (len - k + 1);
        k -= 1;
    }
    sum
}

/// `P[S_N >= t]` in double precision, `N <= 2^24`.
pub fn binomial_tail(len: u64, t: f64) -> Result<f64> {
    Ok(binomial_tail_ln(len, t)?.exp())
}

/// Natural log of `P[S_N >= t]`; `-inf` when no outcome reaches `t`.
pub fn binomial_tail_ln(len: u64, t: f64) -> Result<f64> {
    Ok(match tail_start(len, t)? {
        None => f64::NEG_INFINITY,
        Some(0) => 0.0,
        Some(k0) if 2 * k0 > len => ln_upper_tail(len, k0),
        Some(k0) => (-ln_upper_tail(len, len - k0 + 1).exp()).ln_1p(),
    })
}

// ln P[K >= k0] for K ~ Bin(N, 1/2) and 2 k0 > N, where terms decrease.
fn ln_upper_tail(len: u64, k0: u64) -> f64 {
    let ln_first = ln_binomial_pmf_half(len, k0);
    // Relative terms pmf(k) / pmf(k0), compensated sum.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    let mut k = k0;
    loop {
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if k == len || term < sum * 1e-18 {
            break;
        }
        term *= (len - k) as f64 / (k + 1) as f64;
        k += 1;
    }
    ln_first + sum.ln()
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

// Stirling-series remainder ln(n!) - [(n + 1/2) ln n - n + ln sqrt(2 pi)]
// at integer n; tabulated below 16.
#[allow(clippy::excessive_precision)]
const STIRLERR_SMALL: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_219_670_2,
    0.041_340_695_955_409_294_093_822_1,
    0.027_677_925_684_998_339_148_789_29,
    0.020_790_672_103_765_093_111_522_77,
    0.016_644_691_189_821_192_163_194_87,
    0.013_876_128_823_070_747_998_745_73,
    0.011_896_709_945_891_770_095_055_72,
    0.010_411_265_261_972_096_497_478_567,
    0.009_255_462_182_712_732_917_728_637,
    0.008_330_563_433_362_871_256_469_318,
    0.007_573_675_487_951_840_794_972_024,
    0.006_942_840_107_209_529_865_664_152,
    0.006_408_994_188_004_207_068_439_631,
    0.005_951_370_112_758_847_735_624_416,
    0.005_554_733_551_962_801_371_038_690,
];

fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < 16 {
        return STIRLERR_SMALL[n as usize];
    }
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

// Deviance term x ln(x / np) + np - x, accurate when x is close to np.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// ln of `C(N, k) 2^-N` via the saddle-point expansion.
fn ln_binomial_pmf_half(len: u64, k: u64) -> f64 {
    if k == 0 || k == len {
        return -(len as f64) * LN_2;
    }
    let (nf, kf) = (len as f64, k as f64);
    let half = nf / 2.0;
    let lc = stirlerr(len) - stirlerr(k) - stirlerr(len - k) - bd0(kf, half) - bd0(nf - kf, half);
    let lf = LN_2PI + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

// ---------------------------------------------------------------------------

/// One evaluated bound, optionally compared against an exact or estimated
/// value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub n: Option<u32>,
    pub r: Option<u32>,
    pub params: Vec<(String, f64)>,
    pub bound: f64,
    pub comparison: Option<f64>,
    pub satisfied: Option<bool>,
}

pub const BOUND_CSV_HEADER: &str = "name,n,r,params,bound,comparison,satisfied";

impl BoundReport {
    pub fn new(name: &str, n: Option<u32>, r: Option<u32>, bound: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            n,
            r,
            params: Vec::new(),
            bound,
            comparison: None,
            satisfied: None,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    pub fn compare(mut self, value: f64, satisfied: Option<bool>) -> Self {
        self.comparison = Some(value);
        self.satisfied = satisfied;
        self
    }

    /// One CSV row; `params` is `key=value` pairs joined by `;`.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},{},{}",
            self.name,
            opt(self.n.map(|v| v.to_string())),
            opt(self.r.map(|v| v.to_string())),
            params,
            self.bound,
            opt(self.comparison.map(|v| v.to_string())),
            opt(self.satisfied.map(|v| v.to_string())),
        )
    }
}

/// Every bound evaluated at `(n, r)`, with exact comparisons where cheap.
pub fn standard_reports(n: u32, r: u32, alpha: f64) -> Result<Vec<BoundReport>> {
    check_order(n, r, 1)?;
    check_alpha(alpha)?;
    let lambda = lambda_n(n, r)?;
    let c = binomial(n, r) as f64;
    let mut out = vec![
        BoundReport::new("lambda_n", Some(n), Some(r), lambda),
        BoundReport::new(
            "expectation_upper_bound",
            Some(n),
            Some(r),
            expectation_upper_bound(n, r)?,
        )
        .param("k", code_dimension(n, r) as f64),
        BoundReport::new("concentration_bound", Some(n), Some(r), concentration_bound(n, lambda)?)
            .param("theta", lambda),
        BoundReport::new("joint_tail_bound", Some(n), Some(r), joint_tail_bound(n, r)?),
    ];

    let exact_tail = if n <= 24 {
        Some(binomial_tail(1 << n, lambda)?)
    } else {
        None
    };
    let lb = pr_lb_bound(n, r)?;
    let feller = feller_tail_approx(n, r)?;
    let mut lb_report = BoundReport::new("pr_lb_bound", Some(n), Some(r), lb).param("t", lambda);
    let mut feller_report = BoundReport::new("feller_tail_approx", Some(n), Some(r), feller);
    if let Some(tail) = exact_tail {
        lb_report = lb_report.compare(tail, Some(tail >= lb));
        feller_report = feller_report.param("ratio", feller / tail).compare(tail, None);
    }
    out.push(lb_report);
    out.push(feller_report);
    out.push(
        BoundReport::new("feller_constant", None, None, feller_constant()).compare(3.0, Some(feller_constant() < 3.0)),
    );

    let size = separated_set_target(n, r, alpha)?;
    let (first, second) = bonferroni_terms(n, r, size)?;
    let event = lb_event_bound(n, r, alpha)?;
    out.push(
        BoundReport::new("lb_event_bound", Some(n), Some(r), event)
            .param("alpha", alpha)
            .param("set_size", size)
            .param("first_term", first)
            .param("second_term", second)
            .param("c", c)
            .compare(first - second, Some(first - second >= event)),
    );
    Ok(out)
}
