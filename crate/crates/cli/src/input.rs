//! Matrix documents: `{"d": 2, "alpha": ["0", "1"], "beta": ["1/10"], "gamma": ["1/10"]}`.
//!
//! Entries are integers or `"num/den"` strings. Decimal numbers are accepted
//! only in float mode, where they are converted to their exact binary value.

use jacobi_series::series::parse_rational;
use jacobi_series::{JacobiMatrix, Rational};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

fn entry(v: &Value, field: &str, i: usize, mode: Mode) -> Result<Rational, CliError> {
    let bad = |why: &str| CliError::Parse(format!("{field}[{i}]: {why}"));
    let float = |x: f64| -> Result<Rational, CliError> {
        if mode == Mode::Exact {
            return Err(bad("floats are rejected in exact mode; write num/den"));
        }
        Rational::from_float(x).ok_or_else(|| bad("not a finite number"))
    };
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(k) => Ok(Rational::from_integer(k.into())),
            None => float(n.as_f64().ok_or_else(|| bad("not a number"))?),
        },
        Value::String(s) => match parse_rational(s) {
            Some(r) => Ok(r),
            None => match s.trim().parse::<f64>() {
                Ok(x) => float(x),
                Err(_) => Err(bad(&format!("{s:?} is not a rational"))),
            },
        },
        _ => Err(bad("expected an integer or a \"num/den\" string")),
    }
}

fn array(doc: &Value, field: &str, mode: Mode) -> Result<Vec<Rational>, CliError> {
    let items = doc
        .get(field)
        .ok_or_else(|| CliError::Parse(format!("missing field {field}")))?
        .as_array()
        .ok_or_else(|| CliError::Parse(format!("{field} must be an array")))?;
    items
        .iter()
        .enumerate()
        .map(|(i, v)| entry(v, field, i, mode))
        .collect()
}

pub fn parse_matrix(text: &str, mode: Mode) -> Result<JacobiMatrix, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
    let alpha = array(&doc, "alpha", mode)?;
    let beta = array(&doc, "beta", mode)?;
    let gamma = array(&doc, "gamma", mode)?;
    if let Some(d) = doc.get("d") {
        let d = d
            .as_u64()
            .ok_or_else(|| CliError::Parse("d must be a positive integer".into()))?;
        if d as usize != alpha.len() {
            return Err(CliError::Matrix(format!(
                "d = {d} but alpha has {} entries",
                alpha.len()
            )));
        }
    }
    Ok(JacobiMatrix::new(alpha, beta, gamma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use jacobi_series::scalar::rat;

    #[test]
    fn integers_and_fractions() {
        let m = parse_matrix(
            r#"{"d": 2, "alpha": [0, "1"], "beta": ["1/10"], "gamma": [" -3/6 "]}"#,
            Mode::Exact,
        )
        .unwrap();
        assert_eq!(m.beta()[0], rat(1, 10));
        assert_eq!(m.gamma()[0], rat(-1, 2));
    }

    #[test]
    fn floats_only_in_float_mode() {
        let doc = r#"{"alpha": [0, 1], "beta": [0.5], "gamma": ["0.25"]}"#;
        let e = parse_matrix(doc, Mode::Exact).unwrap_err();
        assert!(matches!(e, CliError::Parse(ref s) if s.starts_with("beta[0]")), "{e:?}");
        let m = parse_matrix(doc, Mode::Float).unwrap();
        assert_eq!(m.gamma()[0], rat(1, 4));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_matrix("{", Mode::Exact), Err(CliError::Parse(_))));
        assert!(matches!(
            parse_matrix(r#"{"alpha": [1]}"#, Mode::Exact),
            Err(CliError::Parse(_))
        ));
        let dup = r#"{"alpha": [1, 1], "beta": [0], "gamma": [0]}"#;
        assert!(matches!(parse_matrix(dup, Mode::Exact), Err(CliError::Matrix(_))));
        let wrong_d = r#"{"d": 3, "alpha": [1, 2], "beta": [0], "gamma": [0]}"#;
        assert!(matches!(parse_matrix(wrong_d, Mode::Exact), Err(CliError::Matrix(_))));
    }
}
