use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// `tc / (tc + fc)`.
pub fn accuracy(tc: usize, fc: usize) -> Result<f64> {
    if tc + fc == 0 {
        return Err(Error::arg("accuracy of zero predictions"));
    }
    Ok(tc as f64 / (tc + fc) as f64)
}

/// Ranks within one row: the best value gets `K`, the worst `1`, ties share
/// the mean of the positions they occupy. With `higher_is_better == false`
/// the smallest value is best.
pub fn rank_row(values: &[f64], higher_is_better: bool) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::arg("ranking needs at least two values"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::arg("cannot rank NaN"));
    }
    let key = |v: f64| if higher_is_better { v } else { -v };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| key(values[a]).total_cmp(&key(values[b])));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && key(values[order[end]]) == key(values[order[start]]) {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let r = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    Ok(ranks)
}

/// Upper tail `P(χ²_dof > x)`.
pub fn chi2_upper_tail(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, x / 2.0)
}

/// `χ²_F = 12N/(K(K+1)) (Σ R_j² − K(K+1)²/4)` from average ranks over `n`
/// datasets; returns `(χ²_F, K − 1, p)`.
pub fn friedman_chi2(avg_ranks: &[f64], n: usize) -> Result<(f64, usize, f64)> {
    let k = avg_ranks.len();
    if k < 2 {
        return Err(Error::arg("Friedman test needs at least two classifiers"));
    }
    if n == 0 {
        return Err(Error::arg("Friedman test needs at least one dataset"));
    }
    if avg_ranks.iter().any(|r| !r.is_finite()) {
        return Err(Error::arg("non-finite average rank"));
    }
    let kf = k as f64;
    let sum_sq: f64 = avg_ranks.iter().map(|r| r * r).sum();
    let chi2 =
        (12.0 * n as f64 / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0)).max(0.0);
    Ok((chi2, k - 1, chi2_upper_tail(chi2, k - 1)))
}

// Two-tailed Nemenyi critical values q_α (Studentized range / √2) for
// K = 2..=10, from Demšar (2006), "Statistical comparisons of classifiers
// over multiple data sets", JMLR 7, Table 5.
const Q_05: [f64; 9] = [
    1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
];
const Q_10: [f64; 9] = [
    1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920,
];

/// Critical value `q_α` for `k` classifiers; `alpha` is 0.05 or 0.10.
pub fn nemenyi_q(k: usize, alpha: f64) -> Result<f64> {
    if !(2..=10).contains(&k) {
        return Err(Error::arg(format!(
            "Nemenyi table covers 2 to 10 classifiers, got {k}"
        )));
    }
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_10
    } else {
        return Err(Error::arg(format!(
            "alpha must be 0.05 or 0.10, got {alpha}"
        )));
    };
    Ok(table[k - 2])
}

/// `CD = q_α sqrt(K(K+1)/(6N))`.
pub fn nemenyi_cd(k: usize, n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("critical difference needs at least one dataset"));
    }
    let q = nemenyi_q(k, alpha)?;
    let kf = k as f64;
    Ok(q * (kf * (kf + 1.0) / (6.0 * n as f64)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(88, 12).unwrap(), 0.88);
        assert_eq!(accuracy(5, 0).unwrap(), 1.0);
        assert!(accuracy(0, 0).is_err());
    }

    #[test]
    fn ranks_with_ties() {
        let r = rank_row(&[53.69, 53.69, 65.72, 63.50, 62.79, 63.79], true).unwrap();
        assert_eq!(r, vec![1.5, 1.5, 6.0, 4.0, 3.0, 5.0]);
        assert_eq!(rank_row(&[2.0; 4], true).unwrap(), vec![2.5; 4]);
        assert_eq!(
            rank_row(&[1.0, 2.0, 3.0], true).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(
            rank_row(&[1.0, 2.0, 3.0], false).unwrap(),
            vec![3.0, 2.0, 1.0]
        );
        assert!(rank_row(&[1.0], true).is_err());
    }

    #[test]
    fn friedman_null_and_hand_value() {
        let (c, d, p) = friedman_chi2(&[3.5; 6], 10).unwrap();
        assert_eq!((c, d, p), (0.0, 5, 1.0));
        let (c, d, _) = friedman_chi2(&[1.0, 2.0], 1).unwrap();
        assert!((c - 1.0).abs() < 1e-15);
        assert_eq!(d, 1);
    }

    #[test]
    fn chi2_known_values() {
        // P(χ²_1 > 3.841459) = 0.05, P(χ²_2 > x) = exp(−x/2)
        assert!((chi2_upper_tail(3.841458820694124, 1) - 0.05).abs() < 1e-12);
        assert!((chi2_upper_tail(5.0, 2) - (-2.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn nemenyi_values() {
        assert!((nemenyi_cd(2, 9, 0.05).unwrap() - 1.960 / 3.0).abs() < 1e-12);
        assert!((nemenyi_cd(6, 21, 0.05).unwrap() - 1.6455).abs() < 1e-4);
        assert!(nemenyi_cd(11, 5, 0.05).is_err());
        assert!(nemenyi_cd(3, 5, 0.01).is_err());
    }
}
