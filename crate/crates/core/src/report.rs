//! Plain-text number formatting shared by the CSV writers.

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, f64::MAX] {
            let s = fmt_num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }
}
