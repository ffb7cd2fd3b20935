//! Metrics over pattern sets: diversity, sample agreement, bounds and
//! expected pairwise disagreement.
//!
//! Diversity and disagreement use the ordered-pair, self-inclusive
//! normalization `1/(n Pi Pi)`; the agreement identity only holds under
//! that convention.

use crate::pattern::Pattern;
use crate::special::binomial_sum;
use crate::{Error, Result};
use num_bigint::BigUint;

/// Per-sample fraction of patterns predicting the sample correctly.
#[derive(Clone, Debug, PartialEq)]
pub struct AgreementVector(pub Vec<f64>);

impl AgreementVector {
    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }
}

fn check_same_length<'a>(patterns: impl IntoIterator<Item = &'a Pattern>) -> Result<Option<usize>> {
    let mut n = None;
    for p in patterns {
        match n {
            None => n = Some(p.len()),
            Some(len) if len != p.len() => {
                return Err(Error::LengthMismatch {
                    expected: len,
                    got: p.len(),
                })
            }
            _ => {}
        }
    }
    Ok(n)
}

/// Average Hamming distance over all ordered pattern pairs (including a
/// pattern with itself), normalized by the sample count:
/// `1/(n Pi Pi) * sum_jk H(p_j, p_k)`. Empty and singleton sets give 0.
pub fn pattern_diversity(patterns: &[Pattern]) -> Result<f64> {
    let n = match check_same_length(patterns)? {
        None => return Ok(0.0),
        Some(n) => n,
    };
    let pi = patterns.len();
    if pi <= 1 {
        return Ok(0.0);
    }
    let mut acc = 0u128;
    for j in 0..pi {
        for k in (j + 1)..pi {
            acc += patterns[j].hamming(&patterns[k])? as u128;
        }
    }
    // ordered pairs double the upper triangle; the diagonal adds zero
    Ok(2.0 * acc as f64 / (n as f64 * pi as f64 * pi as f64))
}

/// Diversity from sample agreements: `(2/n) sum_i a_i (1 - a_i)`.
pub fn pattern_diversity_from_agreement(a: &AgreementVector) -> Result<f64> {
    for &v in &a.0 {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                name: "agreement",
                value: v,
                range: "[0,1]",
            });
        }
    }
    let n = a.0.len() as f64;
    Ok(2.0 / n * a.0.iter().map(|&v| v * (1.0 - v)).sum::<f64>())
}

/// Per-sample fraction of patterns matching the labels.
pub fn sample_agreement(patterns: &[Pattern], labels: &Pattern) -> Result<AgreementVector> {
    if patterns.is_empty() {
        return Err(Error::EmptyPatternSet);
    }
    check_same_length(patterns.iter().chain(std::iter::once(labels)))?;
    let n = labels.len();
    let pi = patterns.len() as f64;
    let mut counts = vec![0usize; n];
    for p in patterns {
        for (i, count) in counts.iter_mut().enumerate() {
            *count += (p.get(i) == labels.get(i)) as usize;
        }
    }
    Ok(AgreementVector(
        counts.into_iter().map(|c| c as f64 / pi).collect(),
    ))
}

/// Closed-form diversity ceiling `2 (L+t)(1-(L+t)) + 2t` for a pattern
/// Rashomon set with anchor loss `L` and parameter `t`.
pub fn diversity_upper_bound(erm_loss: f64, theta: f64) -> f64 {
    let s = erm_loss + theta;
    2.0 * s * (1.0 - s) + 2.0 * theta
}

/// Ceiling on the pattern count: `sum_{k=1..ceil(n L + n t)} C(n, k)`.
pub fn pattern_count_bound(n: usize, erm_loss: f64, theta: f64) -> BigUint {
    let hi = (n as f64 * (erm_loss + theta) - 1e-9).ceil().max(0.0) as u64;
    binomial_sum(n as u64, 1, hi)
}

/// Expected pairwise disagreement under a probability weighting of the
/// patterns: `sum_jk w_j w_k H(p_j, p_k) / n` over ordered pairs.
pub fn expected_pairwise_disagreement(patterns: &[Pattern], weights: &[f64]) -> Result<f64> {
    if weights.len() != patterns.len() {
        return Err(Error::LengthMismatch {
            expected: patterns.len(),
            got: weights.len(),
        });
    }
    if let Some(&w) = weights.iter().find(|&&w| w < 0.0) {
        return Err(Error::OutOfRange {
            name: "weight",
            value: w,
            range: "[0,1]",
        });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::WeightSum(sum));
    }
    let n = match check_same_length(patterns)? {
        None => return Ok(0.0),
        Some(n) => n,
    };
    let mut acc = 0.0;
    for j in 0..patterns.len() {
        for k in (j + 1)..patterns.len() {
            acc += 2.0 * weights[j] * weights[k] * patterns[j].hamming(&patterns[k])? as f64;
        }
    }
    Ok(acc / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pats(rows: &[&str]) -> Vec<Pattern> {
        rows.iter()
            .map(|r| Pattern::from_bits(&r.bytes().map(|b| b - b'0').collect::<Vec<u8>>()))
            .collect()
    }

    #[test]
    fn diversity_values() {
        assert_eq!(pattern_diversity(&pats(&["1111"])).unwrap(), 0.0);
        assert_eq!(pattern_diversity(&[]).unwrap(), 0.0);
        let two = pats(&["1111", "1001"]);
        assert!((pattern_diversity(&two).unwrap() - 0.25).abs() < 1e-15);
        let three = pats(&["0111", "0011", "0001"]);
        assert!((pattern_diversity(&three).unwrap() - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn agreement_values() {
        let labels = Pattern::from_bits(&[0, 0, 1, 1]);
        let three = pats(&["0111", "0011", "0001"]);
        let a = sample_agreement(&three, &labels).unwrap();
        let want = [1.0, 2.0 / 3.0, 2.0 / 3.0, 1.0];
        for (got, want) in a.0.iter().zip(want) {
            assert!((got - want).abs() < 1e-15);
        }
        // identity with the Hamming form
        let via_agreement = pattern_diversity_from_agreement(&a).unwrap();
        assert!((via_agreement - pattern_diversity(&three).unwrap()).abs() < 1e-15);

        let exact = pats(&["0011"]);
        assert_eq!(
            sample_agreement(&exact, &labels).unwrap().0,
            vec![1.0, 1.0, 1.0, 1.0]
        );
        let complement = pats(&["1100"]);
        assert_eq!(
            sample_agreement(&complement, &labels).unwrap().0,
            vec![0.0, 0.0, 0.0, 0.0]
        );
        assert!(sample_agreement(&[], &labels).is_err());
    }

    #[test]
    fn agreement_form_values() {
        let a = AgreementVector(vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(pattern_diversity_from_agreement(&a).unwrap(), 0.0);
        let a = AgreementVector(vec![1.0, 0.5, 0.5, 1.0]);
        assert!((pattern_diversity_from_agreement(&a).unwrap() - 0.25).abs() < 1e-15);
        let bad = AgreementVector(vec![0.5, 1.2]);
        assert!(pattern_diversity_from_agreement(&bad).is_err());
    }

    #[test]
    fn upper_bound_values() {
        assert_eq!(diversity_upper_bound(0.0, 0.0), 0.0);
        assert!((diversity_upper_bound(0.1, 0.05) - 0.355).abs() < 1e-15);
        assert!((diversity_upper_bound(0.5, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn upper_bound_strictly_increasing_below_half() {
        for theta in [0.0, 0.05, 0.1] {
            let mut prev = f64::NEG_INFINITY;
            let mut l = 0.0;
            while l < 0.5 - theta {
                let v = diversity_upper_bound(l, theta);
                assert!(v > prev, "bound not increasing at L={l}, theta={theta}");
                prev = v;
                l += 0.01;
            }
        }
    }

    #[test]
    fn count_bound_values() {
        assert_eq!(pattern_count_bound(4, 0.25, 0.0), BigUint::from(4u32));
        assert_eq!(pattern_count_bound(4, 0.0, 0.25), BigUint::from(4u32));
        // L + t >= 1 saturates at 2^n - 1
        assert_eq!(pattern_count_bound(4, 0.8, 0.3), BigUint::from(15u32));
    }

    #[test]
    fn disagreement_values() {
        let three = pats(&["0111", "0011", "0001"]);
        let uniform = vec![1.0 / 3.0; 3];
        let epd = expected_pairwise_disagreement(&three, &uniform).unwrap();
        assert!((epd - pattern_diversity(&three).unwrap()).abs() < 1e-12);
        let point_mass = vec![1.0, 0.0, 0.0];
        assert_eq!(
            expected_pairwise_disagreement(&three, &point_mass).unwrap(),
            0.0
        );
        assert!(expected_pairwise_disagreement(&three, &[0.5, 0.5]).is_err());
        assert!(expected_pairwise_disagreement(&three, &[0.9, 0.2, -0.1]).is_err());
        assert!(expected_pairwise_disagreement(&three, &[0.5, 0.3, 0.1]).is_err());
    }

    #[test]
    fn heavy_weighting_kills_disagreement_but_not_diversity() {
        let three = pats(&["0111", "0011", "0001"]);
        let div_before = pattern_diversity(&three).unwrap();
        let d = 1e6;
        let pi = three.len() as f64;
        let mut weights = vec![1.0 / d; three.len()];
        weights[0] = (d - pi + 1.0) / d;
        let epd = expected_pairwise_disagreement(&three, &weights).unwrap();
        assert!(epd < 1e-4, "epd {epd}");
        assert!((pattern_diversity(&three).unwrap() - div_before).abs() < 1e-12);
    }

    #[test]
    fn diversity_invariant_under_complement() {
        let three = pats(&["0111", "0011", "0001"]);
        let flipped: Vec<Pattern> = three.iter().map(|p| p.complement()).collect();
        assert_eq!(
            pattern_diversity(&three).unwrap(),
            pattern_diversity(&flipped).unwrap()
        );
        let labels = Pattern::from_bits(&[0, 0, 1, 1]);
        let a1 = sample_agreement(&three, &labels).unwrap();
        let a2 = sample_agreement(&flipped, &labels.complement()).unwrap();
        assert_eq!(a1, a2);
    }

    proptest! {
        /// Diversity computed from Hamming distances equals the agreement
        /// form for arbitrary pattern sets and labels.
        #[test]
        fn identity_hamming_vs_agreement(
            n in 1usize..32,
            pi in 1usize..64,
            seed in 0u64..5000,
        ) {
            use rand::Rng;
            let mut rng = crate::rng::master(seed);
            let patterns: Vec<Pattern> = (0..pi)
                .map(|_| {
                    Pattern::from_bits(
                        &(0..n).map(|_| rng.gen_range(0..2u8)).collect::<Vec<_>>(),
                    )
                })
                .collect();
            let labels = Pattern::from_bits(
                &(0..n).map(|_| rng.gen_range(0..2u8)).collect::<Vec<_>>(),
            );
            let direct = pattern_diversity(&patterns).unwrap();
            let a = sample_agreement(&patterns, &labels).unwrap();
            let via = pattern_diversity_from_agreement(&a).unwrap();
            prop_assert!((direct - via).abs() < 1e-12, "direct {direct} via {via}");
        }
    }
}
