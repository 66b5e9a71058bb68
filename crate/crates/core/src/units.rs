//! Unit-suffixed quantity parsing.
//!
//! Configuration files state quantities with explicit units ("80 MHz",
//! "35 uK", "4.5 lambda"). Everything internal is SI: frequencies are
//! angular (rad/s, with Hz-family inputs multiplied by 2*pi at this
//! boundary), lengths are meters, times seconds, temperatures kelvin.

use crate::error::{Error, Result};

pub const TWO_PI: f64 = std::f64::consts::TAU;

fn split(text: &str) -> Result<(f64, &str)> {
    let t = text.trim();
    let idx = t
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .ok_or_else(|| Error::UnitParse(format!("missing unit suffix in {t:?}")))?;
    let (num, unit) = t.split_at(idx);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::UnitParse(format!("bad number in {t:?}")))?;
    Ok((value, unit.trim()))
}

/// Parse an ordinary frequency and return it as an angular frequency in rad/s.
pub fn parse_frequency(text: &str) -> Result<f64> {
    let (v, unit) = split(text)?;
    let hz = match unit {
        "Hz" => v,
        "kHz" => v * 1e3,
        "MHz" => v * 1e6,
        "GHz" => v * 1e9,
        other => return Err(Error::UnitParse(format!("unknown frequency unit {other:?}"))),
    };
    Ok(TWO_PI * hz)
}

/// Parse a time in seconds.
pub fn parse_time(text: &str) -> Result<f64> {
    let (v, unit) = split(text)?;
    Ok(match unit {
        "s" => v,
        "ms" => v * 1e-3,
        "us" => v * 1e-6,
        "ns" => v * 1e-9,
        other => return Err(Error::UnitParse(format!("unknown time unit {other:?}"))),
    })
}

/// Parse a length in meters. `lambda`-suffixed values are multiples of the
/// supplied wavelength.
pub fn parse_length(text: &str, wavelength: Option<f64>) -> Result<f64> {
    let (v, unit) = split(text)?;
    Ok(match unit {
        "m" => v,
        "mm" => v * 1e-3,
        "um" => v * 1e-6,
        "nm" => v * 1e-9,
        "lambda" => {
            let lam = wavelength.ok_or_else(|| {
                Error::UnitParse("lambda-unit length used before wavelength is known".into())
            })?;
            v * lam
        }
        other => return Err(Error::UnitParse(format!("unknown length unit {other:?}"))),
    })
}

/// Parse a temperature in kelvin.
pub fn parse_temperature(text: &str) -> Result<f64> {
    let (v, unit) = split(text)?;
    Ok(match unit {
        "K" => v,
        "mK" => v * 1e-3,
        "uK" => v * 1e-6,
        "nK" => v * 1e-9,
        other => {
            return Err(Error::UnitParse(format!(
                "unknown temperature unit {other:?}"
            )))
        }
    })
}

/// Format an angular frequency as an ordinary frequency with a suitable unit.
pub fn format_frequency(rad_s: f64) -> String {
    let hz = rad_s / TWO_PI;
    let a = hz.abs();
    if a >= 1e9 {
        format!("{} GHz", hz / 1e9)
    } else if a >= 1e6 {
        format!("{} MHz", hz / 1e6)
    } else if a >= 1e3 {
        format!("{} kHz", hz / 1e3)
    } else {
        format!("{hz} Hz")
    }
}

pub fn format_time(s: f64) -> String {
    let a = s.abs();
    if a >= 1.0 || a == 0.0 {
        format!("{s} s")
    } else if a >= 1e-3 {
        format!("{} ms", s / 1e-3)
    } else if a >= 1e-6 {
        format!("{} us", s / 1e-6)
    } else {
        format!("{} ns", s / 1e-9)
    }
}

pub fn format_temperature(k: f64) -> String {
    let a = k.abs();
    if a >= 1.0 || a == 0.0 {
        format!("{k} K")
    } else if a >= 1e-3 {
        format!("{} mK", k / 1e-3)
    } else {
        format!("{} uK", k / 1e-6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn frequency_is_angular() {
        assert_relative_eq!(parse_frequency("80 MHz").unwrap(), TWO_PI * 80e6);
        assert_relative_eq!(parse_frequency("-1.9 MHz").unwrap(), -TWO_PI * 1.9e6);
        assert_relative_eq!(parse_frequency("93 kHz").unwrap(), TWO_PI * 93e3);
    }

    #[test]
    fn lengths_and_lambda() {
        assert_relative_eq!(parse_length("780 nm", None).unwrap(), 780e-9);
        assert_relative_eq!(
            parse_length("4.5 lambda", Some(780e-9)).unwrap(),
            4.5 * 780e-9
        );
        assert!(parse_length("4.5 lambda", None).is_err());
    }

    #[test]
    fn times_and_temperatures() {
        assert_relative_eq!(parse_time("50 us").unwrap(), 50e-6);
        assert_relative_eq!(parse_time("20 ns").unwrap(), 20e-9);
        assert_relative_eq!(parse_temperature("35 uK").unwrap(), 35e-6);
    }

    #[test]
    fn exponent_notation_is_not_a_unit() {
        assert_relative_eq!(parse_time("2e-6 s").unwrap(), 2e-6);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_frequency("80").is_err());
        assert!(parse_frequency("80 m").is_err());
        assert!(parse_time("fast").is_err());
    }

    #[test]
    fn round_trip_formatting() {
        for text in ["80 MHz", "-1.9 MHz", "530 kHz"] {
            let v = parse_frequency(text).unwrap();
            let v2 = parse_frequency(&format_frequency(v)).unwrap();
            assert_relative_eq!(v, v2, max_relative = 1e-12);
        }
        let t = parse_time(&format_time(50e-6)).unwrap();
        assert_relative_eq!(t, 50e-6);
    }
}
