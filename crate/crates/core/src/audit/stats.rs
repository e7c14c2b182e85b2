use crate::error::{Error, Result};

/// Probability of at least one detection in `n` independent pair tests that
/// each detect with probability `p`.
pub fn confidence(p: f64, n: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("detection rate {p} is outside [0, 1]")));
    }
    if p == 1.0 {
        return Ok(if n == 0 { 0.0 } else { 1.0 });
    }
    let exponent = (n as f64) * (-p).ln_1p();
    Ok(-exponent.exp_m1())
}

/// Smallest `n` with `confidence(p, n) >= target`.
pub fn queries_needed(p: f64, target: f64) -> Result<u64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "detection rate {p} is degenerate; it must lie strictly between 0 and 1"
        )));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target confidence {target} must lie strictly between 0 and 1"
        )));
    }
    let estimate = ((-target).ln_1p() / (-p).ln_1p()).ceil().max(1.0) as u64;
    // The closed form can land one off after rounding; settle on the exact
    // boundary.
    let mut n = estimate.saturating_sub(1).max(1);
    while confidence(p, n)? < target {
        n += 1;
    }
    while n > 1 && confidence(p, n - 1)? >= target {
        n -= 1;
    }
    Ok(n)
}

/// Mean and population standard deviation.
pub fn mean_and_stddev(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confidence_examples() {
        assert_eq!(confidence(1.0, 1).unwrap(), 1.0);
        assert!((confidence(0.5, 2).unwrap() - 0.75).abs() < 1e-15);
        assert!(confidence(0.0425, 107).unwrap() >= 0.99);
        assert!(confidence(0.0425, 106).unwrap() < 0.99);
        assert_eq!(confidence(0.3, 0).unwrap(), 0.0);
        assert!(confidence(-0.1, 3).is_err());
        assert!(confidence(1.5, 3).is_err());
    }

    #[test]
    fn queries_needed_examples() {
        assert_eq!(queries_needed(0.5, 0.75).unwrap(), 2);
        assert_eq!(queries_needed(0.0425, 0.99).unwrap(), 107);
        assert!(queries_needed(0.0, 0.9).is_err());
        assert!(queries_needed(1.0, 0.9).is_err());
        assert!(queries_needed(0.2, 1.0).is_err());
    }

    #[test]
    fn mean_and_stddev_of_known_values() {
        let (m, s) = mean_and_stddev(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert_eq!(s, 2.0);
        assert_eq!(mean_and_stddev(&[]), (0.0, 0.0));
    }
}
