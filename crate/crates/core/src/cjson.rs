//! Serde adapters that encode `Complex64` values as two-element arrays
//! `[re, im]` in JSON, which keeps artifacts readable and language-neutral.
//!
//! Usage: `#[serde(with = "cjson::c")]`, `#[serde(with = "cjson::vec_c")]`,
//! or `#[serde(with = "cjson::opt_c")]` on struct fields.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Adapter for a single `Complex64` field.
pub mod c {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Adapter for `Vec<Complex64>` fields.
pub mod vec_c {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

/// Adapter for `Option<Complex64>` fields.
pub mod opt_c {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|z| [z.re, z.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        let pair = Option::<[f64; 2]>::deserialize(d)?;
        Ok(pair.map(|[re, im]| Complex64::new(re, im)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "c")]
        one: Complex64,
        #[serde(with = "vec_c")]
        many: Vec<Complex64>,
        #[serde(with = "opt_c")]
        maybe: Option<Complex64>,
    }

    #[test]
    fn complex_round_trips_as_pair_arrays() {
        let h = Holder {
            one: Complex64::new(1.5, -2.0),
            many: vec![Complex64::new(0.0, 1.0), Complex64::new(3.0, 4.0)],
            maybe: Some(Complex64::new(-0.25, 0.0)),
        };
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(
            text,
            r#"{"one":[1.5,-2.0],"many":[[0.0,1.0],[3.0,4.0]],"maybe":[-0.25,0.0]}"#
        );
        let back: Holder = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn missing_option_round_trips_as_null() {
        let h = Holder {
            one: Complex64::new(0.0, 0.0),
            many: vec![],
            maybe: None,
        };
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.contains(r#""maybe":null"#));
        let back: Holder = serde_json::from_str(&text).unwrap();
        assert_eq!(back.maybe, None);
    }
}
