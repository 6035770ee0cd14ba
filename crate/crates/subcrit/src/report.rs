//! Shared text formatting for CSV and report output.

/// Fifteen significant digits in scientific notation; `inf`, `-inf` and
/// `nan` for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.14e}")
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(num(1.0 / 3.0), "3.33333333333333e-1");
        assert_eq!(num(-2.0), "-2.00000000000000e0");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
