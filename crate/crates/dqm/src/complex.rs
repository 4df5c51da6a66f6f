//! Complex literals of the form `re+imi`.

use dqm_core::C64;

use crate::error::CliError;

/// Parses `1.5`, `-2i`, `0.3-0.4i`, `1e-3+2.5e-1i`, `i`, `-i`. A trailing
/// `j` is accepted in place of `i`.
pub fn parse_complex(text: &str) -> Result<C64, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Usage(format!("invalid complex literal '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().ok().filter(|re| re.is_finite()).map(|re| C64::new(re, 0.0)).ok_or_else(bad);
    };
    // split at the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

/// Shortest round-trip text for `v`, readable by [`parse_complex`].
pub fn format_complex(v: C64) -> String {
    if v.im == 0.0 {
        format!("{}", v.re)
    } else if v.im < 0.0 {
        format!("{}{}i", v.re, v.im)
    } else {
        format!("{}+{}i", v.re, v.im)
    }
}
