//! JSON-safe floats: non-finite values are written as the strings `"inf"`,
//! `"-inf"` and `"NaN"` instead of `null`, and read back losslessly.

use indexmap::IndexMap;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy)]
struct F(f64);

impl Serialize for F {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            v if v.is_finite() => s.serialize_f64(v),
            v if v.is_nan() => s.serialize_str("NaN"),
            v if v > 0.0 => s.serialize_str("inf"),
            _ => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for F {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(F(v)),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(F(f64::INFINITY)),
                "-inf" => Ok(F(f64::NEG_INFINITY)),
                "NaN" => Ok(F(f64::NAN)),
                other => Err(D::Error::custom(format!("expected a number, got `{other}`"))),
            },
        }
    }
}

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    F(*v).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    F::deserialize(d).map(|f| f.0)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| F(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<F>::deserialize(d)?.into_iter().map(|f| f.0).collect())
    }
}

pub mod nested {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|row| row.iter().map(|&x| F(x)).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        Ok(Vec::<Vec<F>>::deserialize(d)?.into_iter().map(|r| r.into_iter().map(|f| f.0).collect()).collect())
    }
}

pub mod pairs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[(String, f64)], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|(k, x)| (k, F(*x))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(String, f64)>, D::Error> {
        Ok(Vec::<(String, F)>::deserialize(d)?.into_iter().map(|(k, f)| (k, f.0)).collect())
    }
}

pub mod map {
    use super::*;

    pub fn serialize<S: Serializer>(v: &IndexMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(v.iter().map(|(k, x)| (k, F(*x))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IndexMap<String, f64>, D::Error> {
        Ok(IndexMap::<String, F>::deserialize(d)?.into_iter().map(|(k, f)| (k, f.0)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Row {
        #[serde(with = "super")]
        x: f64,
        #[serde(with = "super::pairs")]
        top: Vec<(String, f64)>,
    }

    #[test]
    fn non_finite_round_trip() {
        let row = Row { x: f64::NEG_INFINITY, top: vec![("a".into(), f64::INFINITY), ("b".into(), 0.5)] };
        let text = serde_json::to_string(&row).unwrap();
        assert_eq!(text, r#"{"x":"-inf","top":[["a","inf"],["b",0.5]]}"#);
        let back: Row = serde_json::from_str(&text).unwrap();
        assert_eq!(back.x, f64::NEG_INFINITY);
        assert_eq!(back.top[0].1, f64::INFINITY);
        let nan: f64 = deserialize(&mut serde_json::Deserializer::from_str(r#""NaN""#)).unwrap();
        assert!(nan.is_nan());
    }
}
