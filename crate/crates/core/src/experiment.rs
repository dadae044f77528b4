//! Monte Carlo estimation of `p(n, c, k, s)` and of the law of the number of
//! identical-list cliques.
//!
//! Trial `i` always draws its scheme from stream `(master_seed, i)` and the
//! per-trial verdicts are gathered in trial order, so every output depends
//! only on the inputs and the seed, never on the worker count.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::circulant::CyclePower;
use crate::constructive::{
    constructive_colouring, gadget_colouring, greedy_extend, GoodSchemeConfig,
};
use crate::error::{Error, Result};
use crate::scheme::{
    count_identical_list_cliques, ColourScheme, ListSampler, RngStream, SchemeParams,
};
use crate::solver::is_colourable;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Buckets of the Poisson goodness-of-fit test are pooled until each
/// expects at least this many observations.
pub const MIN_EXPECTED_PER_BUCKET: f64 = 5.0;

/// `C(k, c) t^(-c^2) (c!)^c`, the limiting mean number of identical-list
/// `(c+1)`-cliques when `s ~ t n^(1/c^2)`.
pub fn mu_limit(c: usize, k: usize, t: f64) -> Result<f64> {
    if c < 1 || c > k {
        return Err(Error::OutOfRegime(format!(
            "mu needs 1 <= c <= k (got c = {c}, k = {k})"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRegime(format!(
            "scaling constant t must be positive, got {t}"
        )));
    }
    let c_f = c as i32;
    let factorial: f64 = (1..=c).map(|i| i as f64).product();
    Ok(binomial_f64(k, c) * t.powi(-c_f * c_f) * factorial.powi(c_f))
}

/// Exact `E[X] = n C(k, c) C(s, c)^(-c)` for the number `X` of
/// identical-list `(c+1)`-cliques.
///
/// The clique count `n C(k, c)` is only right when every clique sits in a
/// window of `k + 1` consecutive vertices (`n >= 3k + 1`, or `n >= 2k + 1`
/// for `c = 1`); smaller `n` is refused.
pub fn mu_finite(n: usize, c: usize, k: usize, s: usize) -> Result<f64> {
    if c < 1 || c > k || c > s {
        return Err(Error::OutOfRegime(format!(
            "E[X] needs 1 <= c <= k and c <= s (got c = {c}, k = {k}, s = {s})"
        )));
    }
    let g = CyclePower::new(n, k)?;
    if !g.cliques_are_windowed(c + 1) {
        return Err(Error::OutOfRegime(format!(
            "n = {n} too small for the n C(k,c) clique count with k = {k}"
        )));
    }
    Ok(n as f64 * binomial_f64(k, c) * binomial_f64(s, c).powi(-(c as i32)))
}

/// `max(c, round(t n^(1/c^2)))`.
pub fn s_from_t(n: usize, c: usize, t: f64) -> Result<usize> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRegime(format!(
            "scaling constant t must be positive, got {t}"
        )));
    }
    let exponent = 1.0 / (c * c) as f64;
    Ok(((t * (n as f64).powf(exponent)).round() as usize).max(c))
}

fn binomial_f64(m: usize, r: usize) -> f64 {
    if r > m {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonPrediction {
    /// Present when a scaling constant `t` is known.
    pub mu_limit: Option<f64>,
    pub mu_finite: f64,
    /// `exp(-mu_finite)`.
    pub p_predicted: f64,
}

/// Predictions for the `c <= k` regime; `None` outside it.
pub fn predict(
    n: usize,
    c: usize,
    k: usize,
    s: usize,
    t: Option<f64>,
) -> Option<PoissonPrediction> {
    let mu = mu_finite(n, c, k, s).ok()?;
    Some(PoissonPrediction {
        mu_limit: t.and_then(|t| mu_limit(c, k, t).ok()),
        mu_finite: mu,
        p_predicted: (-mu).exp(),
    })
}

/// Wilson score interval for `successes / trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).clamp(0.0, p)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).clamp(p, 1.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact dynamic program on every trial.
    #[default]
    Exact,
    /// A constructive colouring where one applies, the exact solver otherwise.
    ConstructiveFirst,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "constructive-first" => Ok(Method::ConstructiveFirst),
            other => Err(Error::OutOfRegime(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
}

impl EstimateResult {
    pub fn from_counts(successes: u64, trials: u64, master_seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_95);
        Self {
            trials,
            successes,
            p_hat: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            ci_low,
            ci_high,
            master_seed,
        }
    }
}

/// Execution knobs that never change results.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub method: Method,
    /// Worker threads; 0 means the rayon default.
    pub jobs: usize,
    /// Spacing exponent for the constructive route; defaults to
    /// [`GoodSchemeConfig::faithful`].
    pub config: Option<GoodSchemeConfig>,
}

fn with_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::OutOfRegime(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(work))
}

/// Runs `trials` independent trials in parallel, trial `i` on stream
/// `(master_seed, i)`, and returns their outputs in trial order.
fn run_trials<T, F>(
    g: &CyclePower,
    params: SchemeParams,
    trials: u64,
    master_seed: u64,
    jobs: usize,
    per_trial: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&ColourScheme) -> Result<T> + Sync,
{
    let n = g.n();
    let outcomes = with_pool(jobs, || {
        (0..trials)
            .into_par_iter()
            .map_init(
                || (ListSampler::new(params), ColourScheme::blank(params, n)),
                |(sampler, scheme), i| {
                    let mut rng = RngStream::new(master_seed, i).rng();
                    sampler.fill(&mut rng, scheme);
                    per_trial(scheme)
                },
            )
            .collect::<Vec<Result<T>>>()
    })?;
    outcomes.into_iter().collect()
}

/// Decides one scheme, optionally trying a constructive colouring first.
/// Both routes give the same verdict: a constructive success is a verified
/// colouring, and anything else goes to the exact solver.
pub fn decide_trial(
    g: &CyclePower,
    scheme: &ColourScheme,
    method: Method,
    config: Option<GoodSchemeConfig>,
) -> Result<bool> {
    if method == Method::ConstructiveFirst && constructs(g, scheme, config)? {
        return Ok(true);
    }
    is_colourable(g, scheme)
}

fn constructs(
    g: &CyclePower,
    scheme: &ColourScheme,
    config: Option<GoodSchemeConfig>,
) -> Result<bool> {
    let (n, k, c, s) = (g.n(), g.k(), scheme.c(), scheme.s());
    if c > 2 * k {
        // every vertex has at most 2k neighbours
        let order: Vec<usize> = (0..n).collect();
        return Ok(greedy_extend(g, scheme, &vec![None; n], &order).is_some());
    }
    if c == k + 1 && s == k + 2 {
        return Ok(gadget_colouring(g, scheme)?.is_some());
    }
    if c >= 2 && c <= k && n >= 3 * k + 2 {
        let config = match config {
            Some(cfg) => cfg,
            None => GoodSchemeConfig::faithful(c)?,
        };
        return Ok(constructive_colouring(g, scheme, &config)?.is_some());
    }
    Ok(false)
}

/// Estimates `p(n, c, k, s)` from `trials` sampled schemes with a 95%
/// Wilson interval.
pub fn estimate_p(
    g: &CyclePower,
    params: SchemeParams,
    trials: u64,
    master_seed: u64,
    options: &RunOptions,
) -> Result<EstimateResult> {
    if trials == 0 {
        return Err(Error::OutOfRegime("need at least one trial".into()));
    }
    let verdicts = run_trials(g, params, trials, master_seed, options.jobs, |scheme| {
        decide_trial(g, scheme, options.method, options.config)
    })?;
    let successes = verdicts.iter().filter(|&&b| b).count() as u64;
    Ok(EstimateResult::from_counts(successes, trials, master_seed))
}

/// One pooled range of values of `X` in the goodness-of-fit table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonBucket {
    pub from: u64,
    /// Inclusive upper end; `None` for the open tail.
    pub to: Option<u64>,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonFitResult {
    pub trials: u64,
    pub mu_finite: f64,
    pub sample_mean: f64,
    /// `histogram[x]` = number of trials with `X = x`.
    pub histogram: Vec<u64>,
    pub buckets: Vec<PoissonBucket>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    /// `NaN` when pooling leaves a single bucket.
    pub p_value: f64,
    pub master_seed: u64,
}

/// Pearson chi-square of `histogram` against Poisson(`mu`), pooling
/// adjacent values until each bucket expects at least `min_expected`.
pub fn poisson_chi_square(
    histogram: &[u64],
    mu: f64,
    min_expected: f64,
) -> (Vec<PoissonBucket>, f64, usize, f64) {
    let total: u64 = histogram.iter().sum();
    let n = total as f64;
    let observed_from = |from: usize, to: Option<usize>| -> u64 {
        let end = to.map_or(histogram.len(), |t| (t + 1).min(histogram.len()));
        histogram.get(from..end).map_or(0, |xs| xs.iter().sum())
    };
    let mut buckets = Vec::new();
    let mut pmf = (-mu).exp();
    let mut cdf = 0.0;
    let mut from = 0usize;
    let mut acc = 0.0;
    let mut x = 0usize;
    loop {
        acc += n * pmf;
        cdf += pmf;
        let tail = n * (1.0 - cdf).max(0.0);
        if tail < min_expected || (x >= histogram.len() && tail < 1e-12) {
            break;
        }
        if acc >= min_expected {
            buckets.push(PoissonBucket {
                from: from as u64,
                to: Some(x as u64),
                observed: observed_from(from, Some(x)),
                expected: acc,
            });
            from = x + 1;
            acc = 0.0;
        }
        x += 1;
        pmf *= mu / x as f64;
    }
    // open tail from `from`, expected n * P(X >= from)
    let below: f64 = buckets.iter().map(|b| b.expected).sum();
    buckets.push(PoissonBucket {
        from: from as u64,
        to: None,
        observed: observed_from(from, None),
        expected: (n - below).max(0.0),
    });
    if buckets.len() > 1 && buckets.last().is_some_and(|b| b.expected < min_expected) {
        let tail = buckets.pop().expect("len > 1");
        let prev = buckets.last_mut().expect("len > 1");
        prev.to = None;
        prev.observed += tail.observed;
        prev.expected += tail.expected;
    }
    let chi: f64 = buckets
        .iter()
        .map(|b| {
            if b.expected > 0.0 {
                (b.observed as f64 - b.expected).powi(2) / b.expected
            } else if b.observed > 0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    let df = buckets.len() - 1;
    let p_value = if df == 0 {
        f64::NAN
    } else if chi.is_infinite() {
        0.0
    } else {
        ChiSquared::new(df as f64).map_or(f64::NAN, |d| d.sf(chi))
    };
    (buckets, chi, df, p_value)
}

/// Samples the number `X` of identical-list `(c+1)`-cliques over `trials`
/// schemes and tests it against Poisson(`E[X]`).
pub fn sample_clique_counts(
    g: &CyclePower,
    params: SchemeParams,
    trials: u64,
    master_seed: u64,
    jobs: usize,
) -> Result<PoissonFitResult> {
    if trials == 0 {
        return Err(Error::OutOfRegime("need at least one trial".into()));
    }
    let mu = mu_finite(g.n(), params.c(), g.k(), params.s())?;
    let counts = run_trials(g, params, trials, master_seed, jobs, |scheme| {
        Ok(count_identical_list_cliques(g, scheme))
    })?;
    let max = counts.iter().copied().max().unwrap_or(0) as usize;
    let mut histogram = vec![0u64; max + 1];
    for &x in &counts {
        histogram[x as usize] += 1;
    }
    let sample_mean = counts.iter().map(|&x| x as f64).sum::<f64>() / trials as f64;
    let (buckets, chi_square, degrees_of_freedom, p_value) =
        poisson_chi_square(&histogram, mu, MIN_EXPECTED_PER_BUCKET);
    Ok(PoissonFitResult {
        trials,
        mu_finite: mu,
        sample_mean,
        histogram,
        buckets,
        chi_square,
        degrees_of_freedom,
        p_value,
        master_seed,
    })
}

/// How the palette size of each sweep cell is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PaletteRule {
    /// `s = max(c, round(t n^(1/c^2)))` for each `t`.
    Scaling(Vec<f64>),
    /// Fixed palette sizes.
    Fixed(Vec<usize>),
}

/// One CSV row: an estimate with its predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub c: usize,
    pub s: usize,
    pub t: Option<f64>,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mu_finite: Option<f64>,
    pub mu_limit: Option<f64>,
    pub p_predicted: Option<f64>,
    pub master_seed: u64,
}

pub const CSV_HEADER: &str =
    "n,k,c,s,t,trials,successes,p_hat,ci_low,ci_high,mu_finite,mu_limit,p_predicted,master_seed";

/// Estimate for a single cell, with predictions where the regime has them.
#[allow(clippy::too_many_arguments)]
pub fn estimate_cell(
    n: usize,
    k: usize,
    c: usize,
    s: usize,
    t: Option<f64>,
    trials: u64,
    master_seed: u64,
    options: &RunOptions,
) -> Result<SweepRow> {
    let g = CyclePower::new(n, k)?;
    let params = SchemeParams::new(c, s)?;
    let est = estimate_p(&g, params, trials, master_seed, options)?;
    let prediction = predict(n, c, k, s, t);
    Ok(SweepRow {
        n,
        k,
        c,
        s,
        t,
        trials: est.trials,
        successes: est.successes,
        p_hat: est.p_hat,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        mu_finite: prediction.map(|p| p.mu_finite),
        mu_limit: prediction.and_then(|p| p.mu_limit),
        p_predicted: prediction.map(|p| p.p_predicted),
        master_seed,
    })
}

/// One row per `(n, palette)` cell, `n` outermost, both in the given order.
pub fn regime_sweep(
    c: usize,
    k: usize,
    n_list: &[usize],
    rule: &PaletteRule,
    trials: u64,
    master_seed: u64,
    options: &RunOptions,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        match rule {
            PaletteRule::Scaling(ts) => {
                for &t in ts {
                    let s = s_from_t(n, c, t)?;
                    rows.push(estimate_cell(
                        n,
                        k,
                        c,
                        s,
                        Some(t),
                        trials,
                        master_seed,
                        options,
                    )?);
                }
            }
            PaletteRule::Fixed(ss) => {
                for &s in ss {
                    rows.push(estimate_cell(
                        n,
                        k,
                        c,
                        s,
                        None,
                        trials,
                        master_seed,
                        options,
                    )?);
                }
            }
        }
    }
    Ok(rows)
}

/// Header plus one line per row, fixed column order, empty cells for
/// quantities the regime does not define.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    fn opt(x: Option<f64>) -> String {
        x.map(|v| v.to_string()).unwrap_or_default()
    }
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.k,
            r.c,
            r.s,
            opt(r.t),
            r.trials,
            r.successes,
            r.p_hat,
            r.ci_low,
            r.ci_high,
            opt(r.mu_finite),
            opt(r.mu_limit),
            opt(r.p_predicted),
            r.master_seed
        );
    }
    out
}
