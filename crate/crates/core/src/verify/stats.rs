use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::VerifyError;

const MIN_KS_SAMPLES: usize = 10;
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // theta-function form converges fast for small x
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * x * x)).exp();
        let sum: f64 = (0..20).map(|k| y.powi((2 * k + 1) * (2 * k + 1))).sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * sum).clamp(0.0, 1.0)
    } else {
        let mut total = 0.0;
        for k in 1..=100 {
            let term = (-2.0 * (k * k) as f64 * x * x).exp();
            total += if k % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * total).clamp(0.0, 1.0)
    }
}

fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let root = effective_n.sqrt();
    kolmogorov_survival((root + 0.12 + 0.11 / root) * d)
}

/// One-sample Kolmogorov-Smirnov test of `samples` against `cdf`, with the
/// asymptotic p-value.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestResult, VerifyError> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(VerifyError::InsufficientData {
            needed: MIN_KS_SAMPLES,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(TestResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    })
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestResult, VerifyError> {
    let smaller = a.len().min(b.len());
    if smaller < MIN_KS_SAMPLES {
        return Err(VerifyError::InsufficientData {
            needed: MIN_KS_SAMPLES,
            got: smaller,
        });
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(TestResult {
        statistic: d,
        p_value: ks_p_value(d, na * nb / (na + nb)),
    })
}

fn chi_square_p(statistic: f64, cells: usize) -> Result<f64, VerifyError> {
    if cells < 2 {
        return Err(VerifyError::InsufficientData { needed: 2, got: cells });
    }
    let dist = ChiSquared::new((cells - 1) as f64).expect("positive degrees of freedom");
    Ok(dist.sf(statistic))
}

/// Pearson goodness-of-fit of `observed` counts against cell `probabilities`.
/// Neighbouring cells are merged until every expected count is at least 5.
pub fn chi_square(observed: &[u64], probabilities: &[f64]) -> Result<TestResult, VerifyError> {
    assert_eq!(observed.len(), probabilities.len(), "one probability per cell");
    let n: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probabilities) {
        obs += o as f64;
        exp += p * n as f64;
        if exp >= MIN_EXPECTED {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    let statistic = cells
        .iter()
        .map(|(o, e)| if *e > 0.0 { (o - e).powi(2) / e } else { 0.0 })
        .sum();
    Ok(TestResult {
        statistic,
        p_value: chi_square_p(statistic, cells.len())?,
    })
}

/// Chi-square test that two samples of categories come from the same
/// distribution. Categories are merged, rarest first, until both expected
/// counts in every cell are at least 5.
pub fn chi_square_homogeneity<K: Ord + Clone>(
    a: &BTreeMap<K, u64>,
    b: &BTreeMap<K, u64>,
) -> Result<TestResult, VerifyError> {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    let total = (na + nb) as f64;
    let mut pooled: Vec<(u64, u64)> = a
        .keys()
        .chain(b.keys())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0)))
        .collect();
    pooled.sort_by_key(|(x, y)| std::cmp::Reverse(x + y));
    let share_a = na as f64 / total;
    let expected_ok = |count: f64| count * share_a.min(1.0 - share_a) >= MIN_EXPECTED;
    let mut cells: Vec<(u64, u64)> = Vec::new();
    let mut pending = (0, 0);
    for (x, y) in pooled {
        pending = (pending.0 + x, pending.1 + y);
        if expected_ok((pending.0 + pending.1) as f64) {
            cells.push(pending);
            pending = (0, 0);
        }
    }
    if pending != (0, 0) {
        match cells.last_mut() {
            Some(last) => *last = (last.0 + pending.0, last.1 + pending.1),
            None => cells.push(pending),
        }
    }
    let statistic = cells
        .iter()
        .map(|&(x, y)| {
            let pooled = (x + y) as f64;
            let ea = pooled * share_a;
            let eb = pooled - ea;
            (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb
        })
        .sum();
    Ok(TestResult {
        statistic,
        p_value: chi_square_p(statistic, cells.len())?,
    })
}

/// Half the L1 distance between two distributions given as maps.
pub fn total_variation<K: Ord>(p: &BTreeMap<K, f64>, q: &BTreeMap<K, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, pv) in p {
        sum += (pv - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, qv) in q {
        if !p.contains_key(k) {
            sum += qv.abs();
        }
    }
    0.5 * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::ClockRng;

    #[test]
    fn trivial_statistics() {
        let grid: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
        let r = ks_statistic(&grid, |x| x).unwrap();
        assert!(r.statistic <= 0.05 + 1e-15);
        let r = chi_square(&[50, 50], &[0.5, 0.5]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert!(matches!(
            ks_statistic(&[0.5; 9], |x| x),
            Err(VerifyError::InsufficientData { needed: 10, got: 9 })
        ));
    }

    #[test]
    fn kolmogorov_tail_values() {
        // two branches meet continuously
        assert!((kolmogorov_survival(1.18 - 1e-9) - kolmogorov_survival(1.18 + 1e-9)).abs() < 1e-7);
        // tabulated: P(K > 1.36) = 0.049, P(K > 1.63) = 0.0098
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 5e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    #[test]
    fn p_values_are_uniform_under_the_null() {
        let mut rng = ClockRng::from_seed(0x9e11);
        let ps: Vec<f64> = (0..1000)
            .map(|_| {
                let xs: Vec<f64> = (0..200).map(|_| rng.uniform()).collect();
                ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value
            })
            .collect();
        let meta = ks_statistic(&ps, |p| p.clamp(0.0, 1.0)).unwrap();
        assert!(meta.p_value > 0.01, "{meta:?}");
    }

    #[test]
    fn cells_merge_until_expected_counts_suffice() {
        // the three rare cells are merged into one
        let r = chi_square(&[90, 4, 3, 3], &[0.9, 0.04, 0.03, 0.03]).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for (k, x, y) in [(0, 500, 480), (1, 300, 320), (2, 3, 1), (3, 197, 199)] {
            a.insert(k, x);
            b.insert(k, y);
        }
        let r = chi_square_homogeneity(&a, &b).unwrap();
        assert!(r.p_value > 0.3, "{r:?}");
        let two = ks_two_sample(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0], &[11.0; 10]).unwrap();
        assert_eq!(two.statistic, 1.0);
    }

    #[test]
    fn total_variation_of_disjoint_supports_is_one() {
        let p = BTreeMap::from([(0, 1.0)]);
        let q = BTreeMap::from([(1, 1.0)]);
        assert_eq!(total_variation(&p, &q), 1.0);
        assert_eq!(total_variation(&p, &p), 0.0);
    }
}
