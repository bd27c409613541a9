//! Locale-free number formatting for CSV cells.

/// Twelve significant digits, `%g` style: fixed notation for exponents in
/// `-4..12`, scientific otherwise, trailing zeros dropped. Non-finite values
/// are spelled `inf`, `-inf` and `nan`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn examples() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(2.0 / 3.0 * 1e6), "666666.666667");
        assert_eq!(num(123456789012.0), "123456789012");
        assert_eq!(num(1234567890123.0), "1.23456789012e+12");
        assert_eq!(num(1e-9), "1e-09");
        assert_eq!(num(-2.5e-5), "-2.5e-05");
        assert_eq!(num(0.0001), "0.0001");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
        assert_eq!(num(f64::NAN), "nan");
        // Rounding that bumps the exponent.
        assert_eq!(num(999999999999.9), "1e+12");
        assert_eq!(num(0.99999999999999), "1");
    }
}
