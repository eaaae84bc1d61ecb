//! Lossless decimal output: every float is written with 17 significant digits.

use std::str::FromStr;

use serde_json::{Number, Value};

use crate::algebra::Mat4;

/// Formats a double with 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// JSON number carrying 17 significant digits; non-finite values become `null`.
pub fn num17(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&fmt17(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// `serialize_with` adapter writing a float through [`num17`].
pub fn serialize_f64<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&num17(*x), s)
}

/// `serialize_with` adapter for float sequences.
pub fn serialize_f64_seq<S: serde::Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&xs.iter().map(|x| num17(*x)).collect::<Vec<_>>(), s)
}

/// Debug dump of a 4×4 complex matrix as `{"re": [[...]], "im": [[...]]}`.
pub fn matrix_json(m: &Mat4) -> Value {
    let part = |f: fn(&num_complex::Complex64) -> f64| {
        Value::Array(
            (0..4)
                .map(|r| Value::Array((0..4).map(|c| num17(f(&m[(r, c)]))).collect()))
                .collect(),
        )
    };
    let mut obj = serde_json::Map::new();
    obj.insert("re".into(), part(|z| z.re));
    obj.insert("im".into(), part(|z| z.im));
    Value::Object(obj)
}

/// Parses a matrix dump back; `None` when the layout is not 4×4.
pub fn matrix_from_json(v: &Value) -> Option<Mat4> {
    let grid = |key: &str| -> Option<Vec<Vec<f64>>> {
        v.get(key)?
            .as_array()?
            .iter()
            .map(|row| row.as_array()?.iter().map(|x| x.as_f64()).collect())
            .collect()
    };
    let re = grid("re")?;
    let im = grid("im")?;
    if re.len() != 4 || im.len() != 4 || re.iter().chain(&im).any(|r| r.len() != 4) {
        return None;
    }
    Some(Mat4::from_fn(|r, c| num_complex::Complex64::new(re[r][c], im[r][c])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::dirac;

    #[test]
    fn seventeen_digits_round_trip() {
        let x = 0.1 + 0.2;
        let s = fmt17(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(s, "3.0000000000000004e-1");
        assert_eq!(num17(f64::NAN), Value::Null);
    }

    #[test]
    fn matrix_dump_round_trips() {
        let m = dirac::alpha(1) * dirac::beta();
        let text = serde_json::to_string(&matrix_json(&m)).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(matrix_from_json(&back).unwrap(), m);
    }
}
