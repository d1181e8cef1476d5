use crate::error::{Error, Result};

/// Type-7 empirical quantile: linear interpolation between order statistics
/// at 1-based position `h = (len - 1) * prob + 1`.
pub fn empirical_quantile(samples: &[f64], prob: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("quantile of an empty sample".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("sample contains NaN".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, prob)
}

/// Same as [`empirical_quantile`] for an already ascending sample.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InvalidInput("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::InvalidInput(format!("probability {prob} outside [0, 1]")));
    }
    let pos = (sorted.len() - 1) as f64 * prob;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    if frac == 0.0 || lo == hi {
        return Ok(sorted[lo]);
    }
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn median_of_one_to_hundred() {
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(empirical_quantile(&xs, 0.5).unwrap(), 50.5);
    }

    #[test]
    fn constant_sample() {
        let xs = vec![3.25; 17];
        for p in [0.0, 0.1, 0.5, 0.99, 1.0] {
            assert_eq!(empirical_quantile(&xs, p).unwrap(), 3.25);
        }
    }

    #[test]
    fn upper_limit_is_maximum() {
        let xs = [2.0, 3.0, 1.0];
        let q = empirical_quantile(&xs, 1.0 - 1e-12).unwrap();
        assert!((q - 3.0).abs() < 1e-9);
        assert_eq!(empirical_quantile(&xs, 1.0).unwrap(), 3.0);
    }

    #[test]
    fn empty_and_out_of_range() {
        assert!(empirical_quantile(&[], 0.5).is_err());
        assert!(empirical_quantile(&[1.0], 1.5).is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_affine_equivariant(
            xs in proptest::collection::vec(-100.0f64..100.0, 1..60),
            p1 in 0.0f64..1.0,
            p2 in 0.0f64..1.0,
            a in 0.01f64..10.0,
            b in -50.0f64..50.0,
        ) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            prop_assert!(empirical_quantile(&xs, lo).unwrap() <= empirical_quantile(&xs, hi).unwrap());
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let lhs = empirical_quantile(&ys, p1).unwrap();
            let rhs = a * empirical_quantile(&xs, p1).unwrap() + b;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }
}
