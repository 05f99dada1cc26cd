//! Rank-based comparison of configurations across problems.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Rows are problems, columns are configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl ResultMatrix {
    pub fn new(rows: Vec<String>, columns: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 || columns.len() < 2 {
            return Err(Error::InvalidInput(
                "a result matrix needs at least 2 rows and 2 columns".into(),
            ));
        }
        if values.len() != rows.len()
            || values
                .iter()
                .any(|r| r.len() != columns.len() || r.iter().any(|v| v.is_nan()))
        {
            return Err(Error::InvalidInput("result matrix has missing entries".into()));
        }
        Ok(ResultMatrix { rows, columns, values })
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }
}

/// Ascending ranks starting at 1; ties share the mean of their positions.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Mean rank of every configuration, rank 1 being the lowest value.
pub fn average_ranking(m: &ResultMatrix) -> Vec<f64> {
    let k = m.columns.len();
    let mut sums = vec![0.0; k];
    for row in &m.values {
        for (s, r) in sums.iter_mut().zip(mid_ranks(row)) {
            *s += r;
        }
    }
    sums.iter().map(|s| s / m.values.len() as f64).collect()
}

/// Friedman statistic and its chi-square p-value.
pub fn friedman_test(m: &ResultMatrix) -> Result<(f64, f64)> {
    let n = m.values.len() as f64;
    let k = m.columns.len() as f64;
    let mean_ranks = average_ranking(m);
    let sum_sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let stat = 12.0 * n / (k * (k + 1.0)) * sum_sq - 3.0 * n * (k + 1.0);
    let stat = if stat.abs() < 1e-9 { 0.0 } else { stat };
    if stat <= 0.0 {
        return Ok((0.0, 1.0));
    }
    let chi = ChiSquared::new(k - 1.0).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok((stat, chi.sf(stat)))
}

/// Largest sample handled by exact enumeration.
pub const WILCOXON_EXACT_MAX: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wilcoxon {
    /// The smaller of the positive and negative rank sums.
    pub statistic: f64,
    pub p_value: f64,
    /// Non-zero differences used.
    pub n: usize,
    pub exact: bool,
}

/// Two-sided paired Wilcoxon signed-rank test. Zero differences are dropped
/// and tied magnitudes get mid-ranks. Exact for up to
/// [`WILCOXON_EXACT_MAX`] pairs, normal approximation with continuity and
/// tie correction above.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<Wilcoxon> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 && !a.is_empty() {
        return Ok(Wilcoxon {
            statistic: 0.0,
            p_value: 1.0,
            n: 0,
            exact: true,
        });
    }
    if n < 5 {
        return Err(Error::InsufficientSamples { needed: 5, got: n });
    }
    let ranks = mid_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = n as f64 * (n as f64 + 1.0) / 2.0;
    let w = w_plus.min(total - w_plus);

    if n <= WILCOXON_EXACT_MAX {
        // mid-ranks are multiples of 1/2, so doubled ranks are integers
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let max: usize = doubled.iter().sum();
        let mut counts = vec![0f64; max + 1];
        counts[0] = 1.0;
        let mut reach = 0;
        for &r in &doubled {
            for s in (0..=reach).rev() {
                if counts[s] > 0.0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let limit = (2.0 * w).round() as usize;
        let tail: f64 = counts[..=limit].iter().sum();
        let p = (2.0 * tail / 2f64.powi(n as i32)).min(1.0);
        return Ok(Wilcoxon {
            statistic: w,
            p_value: p,
            n,
            exact: true,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(Wilcoxon {
        statistic: w,
        p_value: (2.0 * normal.sf(z)).min(1.0),
        n,
        exact: false,
    })
}

/// Holm step-down adjustment, returned in input order.
pub fn holm_correction(p_values: &[f64]) -> Result<Vec<f64>> {
    if p_values.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidInput("p-values must lie in [0, 1]".into()));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|a, b| p_values[*a].total_cmp(&p_values[*b]));
    let mut adjusted = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (j, &idx) in order.iter().enumerate() {
        let v = ((m - j) as f64 * p_values[idx]).min(1.0);
        running = running.max(v);
        adjusted[idx] = running;
    }
    Ok(adjusted)
}

#[cfg(test)]
mod tests {
    use rand::{Rng as _, SeedableRng};

    use super::*;
    use crate::domain::Rng;

    fn matrix(values: Vec<Vec<f64>>) -> ResultMatrix {
        let rows = (0..values.len()).map(|i| format!("r{i}")).collect();
        let cols = (0..values[0].len()).map(|j| format!("c{j}")).collect();
        ResultMatrix::new(rows, cols, values).unwrap()
    }

    #[test]
    fn ranking_examples() {
        assert_eq!(
            average_ranking(&matrix(vec![vec![1.0, 2.0], vec![0.0, 5.0]])),
            vec![1.0, 2.0]
        );
        assert_eq!(
            average_ranking(&matrix(vec![vec![3.0, 3.0], vec![3.0, 3.0]])),
            vec![1.5, 1.5]
        );
        let m = matrix(vec![vec![1.0, 2.0, 3.0]; 4]);
        assert_eq!(average_ranking(&m), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn friedman_examples() {
        assert_eq!(friedman_test(&matrix(vec![vec![1.0; 3]; 4])).unwrap(), (0.0, 1.0));
        let m = matrix(vec![
            vec![1.0, 2.0, 3.0],
            vec![1.0, 3.0, 2.0],
            vec![1.0, 2.0, 3.0],
            vec![1.0, 3.0, 2.0],
        ]);
        let (stat, p) = friedman_test(&m).unwrap();
        assert!((stat - 6.0).abs() < 1e-12);
        assert!((p - (-3.0f64).exp()).abs() < 1e-9);

        let m = matrix(vec![vec![1.0, 2.0, 3.0]; 4]);
        let (stat, p) = friedman_test(&m).unwrap();
        assert!((stat - 8.0).abs() < 1e-12);
        assert!((p - 0.0183).abs() < 1e-4);
        let swapped = matrix(vec![vec![3.0, 1.0, 2.0]; 4]);
        assert_eq!(friedman_test(&swapped).unwrap().0, stat);
    }

    fn brute_force_p(diffs: &[f64]) -> f64 {
        let n = diffs.len();
        let ranks = mid_ranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
        let total: f64 = ranks.iter().sum();
        let w_plus: f64 = diffs
            .iter()
            .zip(&ranks)
            .filter(|(d, _)| **d > 0.0)
            .map(|(_, r)| r)
            .sum();
        let w = w_plus.min(total - w_plus);
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s <= w + 1e-9 {
                hits += 1;
            }
        }
        (2.0 * hits as f64 / (1u64 << n) as f64).min(1.0)
    }

    #[test]
    fn wilcoxon_examples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 0.03125);
        assert_eq!(wilcoxon_signed_rank(&a, &a).unwrap().p_value, 1.0);
        assert_eq!(wilcoxon_signed_rank(&b, &a).unwrap().p_value, r.p_value);
        assert!(wilcoxon_signed_rank(&a[..4], &b[..4]).is_err());
    }

    #[test]
    fn wilcoxon_matches_enumeration() {
        let mut rng = Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(5..=12);
            let a: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(-4i32..5))).collect();
            let b: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(-4i32..5))).collect();
            let nz = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            if nz < 5 {
                continue;
            }
            let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
            assert_eq!(wilcoxon_signed_rank(&a, &b).unwrap().p_value, brute_force_p(&diffs));
        }
    }

    #[test]
    fn wilcoxon_normal_branch() {
        let a: Vec<f64> = (0..40).map(|i| i as f64 + 0.3).collect();
        let b: Vec<f64> = (0..40)
            .map(|i| i as f64 + if i % 3 == 0 { 1.0 } else { -0.1 * i as f64 })
            .collect();
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(!r.exact);
        assert!(r.p_value > 0.0 && r.p_value <= 1.0);
    }

    #[test]
    fn holm_examples() {
        assert_eq!(holm_correction(&[0.01, 0.04]).unwrap(), vec![0.02, 0.04]);
        assert_eq!(holm_correction(&[0.5]).unwrap(), vec![0.5]);
        let h = holm_correction(&[0.03, 0.03, 0.03]).unwrap();
        for v in h {
            assert!((v - 0.09).abs() < 1e-15);
        }
        assert_eq!(holm_correction(&[0.04, 0.01]).unwrap(), vec![0.04, 0.02]);
        assert!(holm_correction(&[1.5]).is_err());
    }
}
