//! Sample correlation and the one-sided Wilcoxon signed-rank test.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Smallest number of paired observations accepted by [`wilcoxon_p`].
pub const MIN_PAIRS: usize = 6;

/// Largest sample size for which the exact null distribution is used.
pub const EXACT_MAX_N: usize = 25;

/// Pearson sample correlation with `n - 1` normalization.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Size(format!("correlation of vectors of length {} and {}", a.len(), b.len())));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Size(format!("correlation needs at least 2 values, got {n}")));
    }
    let nf = n as f64;
    let ma = a.iter().sum::<f64>() / nf;
    let mb = b.iter().sum::<f64>() / nf;
    let sa = (a.iter().map(|v| (v - ma).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let sb = (b.iter().map(|v| (v - mb).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    if !(sa > 0.0 && sb > 0.0) {
        return Err(Error::UndefinedCorrelation("one of the vectors has zero variance".into()));
    }
    let cross: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    Ok((cross / ((nf - 1.0) * sa * sb)).clamp(-1.0, 1.0))
}

/// Average ranks (1-based) with ties sharing their mean rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Lower-tail p-value `P(T+ <= t_obs)` of the signed-rank statistic.
///
/// Zero differences are ranked with the rest and then dropped from the sums
/// (Pratt). For `n <= 25` the exact permutation distribution is computed over
/// the observed (mid)ranks; above that the normal approximation with tie and
/// zero corrections and a continuity correction of 0.5 is used.
pub fn signed_rank_lower_p(diffs: &[f64]) -> f64 {
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let t_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let nonzero: Vec<f64> = diffs.iter().zip(&ranks).filter(|(d, _)| **d != 0.0).map(|(_, r)| *r).collect();

    if n <= EXACT_MAX_N {
        // Midranks are multiples of 1/2, so doubled ranks are exact integers.
        let doubled: Vec<usize> = nonzero.iter().map(|r| (2.0 * r).round() as usize).collect();
        let total: usize = doubled.iter().sum();
        let mut counts = vec![0f64; total + 1];
        counts[0] = 1.0;
        for &r in &doubled {
            for s in (r..=total).rev() {
                counts[s] += counts[s - r];
            }
        }
        let observed = (2.0 * t_plus).round() as usize;
        let below: f64 = counts[..=observed.min(total)].iter().sum();
        return (below / 2f64.powi(doubled.len() as i32)).clamp(0.0, 1.0);
    }

    let nf = n as f64;
    let zeros = (n - nonzero.len()) as f64;
    let mean = (nf * (nf + 1.0) - zeros * (zeros + 1.0)) / 4.0;
    let mut var_num = nf * (nf + 1.0) * (2.0 * nf + 1.0) - zeros * (zeros + 1.0) * (2.0 * zeros + 1.0);
    let mut sorted = nonzero.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        var_num -= 0.5 * t * (t * t - 1.0);
        i = j;
    }
    let sd = (var_num / 24.0).sqrt();
    if !(sd > 0.0) {
        return if t_plus >= mean { 1.0 } else { 0.0 };
    }
    let z = (t_plus - mean + 0.5) / sd;
    Normal::new(0.0, 1.0).expect("standard normal").cdf(z)
}

/// One-sided signed-rank p-value that `candidate` is no worse than
/// `competitor` up to `tolerance`.
///
/// The test is run on `candidate_k - competitor_k + tolerance` with the
/// alternative that the candidate is worse, so a large p-value means the
/// candidate is higher or within `tolerance` of the competitor.
pub fn wilcoxon_p(candidate: &[f64], competitor: &[f64], tolerance: f64) -> Result<f64> {
    if candidate.len() != competitor.len() {
        return Err(Error::Size(format!(
            "paired samples differ in length ({} vs {})",
            candidate.len(),
            competitor.len()
        )));
    }
    if candidate.len() < MIN_PAIRS {
        return Err(Error::StatisticalPower { got: candidate.len(), min: MIN_PAIRS });
    }
    if candidate.iter().chain(competitor).any(|v| !v.is_finite()) {
        return Err(Error::Data("paired samples contain non-finite values".into()));
    }
    let diffs: Vec<f64> = candidate.iter().zip(competitor).map(|(a, b)| a - b + tolerance).collect();
    Ok(signed_rank_lower_p(&diffs))
}
