//! Loss functions, empirical risk and loss-variance estimation.
//!
//! Binary labels live in {0,1} throughout the crate; exponential-loss code
//! maps to {-1,+1} at the call site. Linear models carry an explicit
//! intercept as their last coordinate, acting on a constant feature 1.

use crate::data::Dataset;
use crate::{Error, Result};

/// Mean 0-1 loss of a {0,1} prediction vector.
pub fn zero_one_risk(pred: &[u8], labels: &[u8]) -> Result<f64> {
    if pred.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            got: pred.len(),
        });
    }
    if pred.iter().any(|&p| p > 1) {
        return Err(Error::NonBinaryPrediction);
    }
    let mistakes = pred.iter().zip(labels).filter(|(p, y)| p != y).count();
    Ok(mistakes as f64 / labels.len() as f64)
}

/// Population-style variance of the per-sample 0-1 loss: L(1-L).
pub fn empirical_loss_variance(pred: &[u8], labels: &[u8]) -> Result<f64> {
    let l = zero_one_risk(pred, labels)?;
    Ok(l * (1.0 - l))
}

fn signed_margin(weights: &[f64], row: &[f64]) -> f64 {
    let (w, b) = weights.split_at(row.len());
    row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() + b[0]
}

fn check_weights(weights: &[f64], m: usize) -> Result<()> {
    if weights.len() != m + 1 {
        return Err(Error::LengthMismatch {
            expected: m + 1,
            got: weights.len(),
        });
    }
    Ok(())
}

/// Mean exponential loss `exp(-y (w.x + b))` with labels mapped to {-1,+1}.
pub fn exponential_risk(weights: &[f64], d: &Dataset) -> Result<f64> {
    check_weights(weights, d.m())?;
    let mut acc = 0.0;
    for i in 0..d.n() {
        let y = if d.labels()[i] == 1 { 1.0 } else { -1.0 };
        acc += (-y * signed_margin(weights, d.row(i))).exp();
    }
    Ok(acc / d.n() as f64)
}

/// Mean squared error of the intercept-augmented linear model against an
/// arbitrary real target vector.
pub fn squared_risk_with_targets(weights: &[f64], d: &Dataset, targets: &[f64]) -> Result<f64> {
    check_weights(weights, d.m())?;
    if targets.len() != d.n() {
        return Err(Error::LengthMismatch {
            expected: d.n(),
            got: targets.len(),
        });
    }
    let mut acc = 0.0;
    for (i, &target) in targets.iter().enumerate() {
        let r = signed_margin(weights, d.row(i)) - target;
        acc += r * r;
    }
    Ok(acc / d.n() as f64)
}

/// Mean squared error with the dataset's {0,1} labels as targets.
pub fn squared_risk(weights: &[f64], d: &Dataset) -> Result<f64> {
    let targets: Vec<f64> = d.labels().iter().map(|&y| y as f64).collect();
    squared_risk_with_targets(weights, d, &targets)
}

/// Squared risk plus an l2 penalty `c * w.w` on the feature weights (the
/// intercept is not penalized).
pub fn squared_risk_regularized(weights: &[f64], d: &Dataset, c: f64) -> Result<f64> {
    let base = squared_risk(weights, d)?;
    let penalty: f64 = weights[..d.m()].iter().map(|w| w * w).sum();
    Ok(base + c * penalty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;

    fn ds(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Dataset {
        let m = rows[0].len();
        Dataset::new(rows, labels, (0..m).map(|j| format!("x{j}")).collect()).unwrap()
    }

    #[test]
    fn zero_one_basics() {
        let y = [0u8, 0, 1, 1];
        assert_eq!(zero_one_risk(&y, &y).unwrap(), 0.0);
        let comp: Vec<u8> = y.iter().map(|&v| 1 - v).collect();
        assert_eq!(zero_one_risk(&comp, &y).unwrap(), 1.0);
        assert_eq!(zero_one_risk(&[0, 1, 1, 1], &y).unwrap(), 0.25);
        assert!(zero_one_risk(&[0, 2, 0, 0], &y).is_err());
        assert!(zero_one_risk(&[0, 1], &y).is_err());
    }

    #[test]
    fn zero_one_invariant_under_label_recoding() {
        // mapping both pred and labels through y -> 1-y keeps the risk
        let y = [0u8, 1, 1, 0, 1];
        let p = [1u8, 1, 0, 0, 1];
        let y2: Vec<u8> = y.iter().map(|&v| 1 - v).collect();
        let p2: Vec<u8> = p.iter().map(|&v| 1 - v).collect();
        assert_eq!(
            zero_one_risk(&p, &y).unwrap(),
            zero_one_risk(&p2, &y2).unwrap()
        );
    }

    #[test]
    fn loss_variance_values() {
        let y = [0u8, 0, 1, 1, 0];
        assert_eq!(empirical_loss_variance(&y, &y).unwrap(), 0.0);
        let y = [0u8, 1, 0, 1];
        let p = [1u8, 0, 0, 1];
        // risk 0.5 -> variance 0.25
        assert_eq!(empirical_loss_variance(&p, &y).unwrap(), 0.25);
        let y = [0u8, 0, 0, 0, 1];
        let p = [1u8, 0, 0, 0, 1];
        // risk 0.2 -> 0.16
        assert!((empirical_loss_variance(&p, &y).unwrap() - 0.16).abs() < 1e-15);
    }

    #[test]
    fn exponential_risk_values() {
        let d = ds(vec![vec![0.0], vec![1.0]], vec![0, 1]);
        assert_eq!(exponential_risk(&[0.0, 0.0], &d).unwrap(), 1.0);

        let single = ds(vec![vec![1.0]], vec![1]);
        let ln2 = std::f64::consts::LN_2;
        assert!((exponential_risk(&[ln2, 0.0], &single).unwrap() - 0.5).abs() < 1e-15);

        // separable data: scaling the weights drives the risk to 0 monotonically
        let d = ds(vec![vec![-1.0], vec![1.0]], vec![0, 1]);
        let mut prev = f64::INFINITY;
        for t in 1..30 {
            let r = exponential_risk(&[t as f64, 0.0], &d).unwrap();
            assert!(r < prev);
            prev = r;
        }
        assert!(prev < 1e-10);
        assert!(exponential_risk(&[1.0], &d).is_err());
    }

    #[test]
    fn exponential_dominates_zero_one() {
        let d = ds(
            vec![vec![0.3], vec![-1.2], vec![2.0], vec![0.1]],
            vec![1, 0, 0, 1],
        );
        for w in [-2.0, -0.5, 0.0, 0.7, 3.0] {
            for b in [-1.0, 0.0, 0.4] {
                for i in 0..d.n() {
                    let y = if d.labels()[i] == 1 { 1.0 } else { -1.0 };
                    let yf = y * (w * d.value(i, 0) + b);
                    let expl = (-yf).exp();
                    assert!(expl >= (yf < 0.0) as u8 as f64);
                    if yf != 0.0 {
                        assert!(expl >= (yf <= 0.0) as u8 as f64);
                    }
                }
            }
        }
    }

    #[test]
    fn squared_risk_values() {
        let d = ds(vec![vec![1.0], vec![2.0]], vec![1, 1]);
        assert_eq!(squared_risk(&[0.0, 1.0], &d).unwrap(), 0.0);
        // w = 0: (1/n) sum y_i^2
        assert_eq!(squared_risk(&[0.0, 0.0], &d).unwrap(), 1.0);
        // 1-D hand arithmetic with regression targets: x=(1,2), y=(1,2)
        let targets = [1.0, 2.0];
        assert_eq!(
            squared_risk_with_targets(&[1.0, 0.0], &d, &targets).unwrap(),
            0.0
        );
        assert!(
            (squared_risk_with_targets(&[0.5, 0.0], &d, &targets).unwrap() - 0.625).abs() < 1e-15
        );
        // regularized variant reduces to plain mean at c = 0
        assert_eq!(
            squared_risk_regularized(&[0.3, 0.1], &d, 0.0).unwrap(),
            squared_risk(&[0.3, 0.1], &d).unwrap()
        );
        assert!(
            squared_risk_regularized(&[0.3, 0.1], &d, 1.0).unwrap()
                > squared_risk(&[0.3, 0.1], &d).unwrap()
        );
        assert!(squared_risk_with_targets(&[1.0, 0.0], &d, &[1.0]).is_err());
    }
}
