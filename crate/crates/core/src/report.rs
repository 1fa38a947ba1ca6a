//! Ratio arithmetic and the `"inf"` JSON encoding shared by reports and
//! certificates.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `opt / rev`, with `+inf` when nothing is earned against a positive optimum
/// and `1` when both vanish.
pub fn ratio(opt: f64, rev: f64) -> f64 {
    if rev > 0.0 {
        opt / rev
    } else if opt > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

pub(crate) fn serialize_ratio<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_infinite() && *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

pub(crate) fn deserialize_ratio<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(x) => Ok(x),
        Repr::Text(s) if s == "inf" => Ok(f64::INFINITY),
        Repr::Text(s) => Err(serde::de::Error::custom(format!(
            "expected a number or \"inf\", got {s:?}"
        ))),
    }
}

#[derive(Serialize, Deserialize)]
struct MaybeInfinite(
    #[serde(
        serialize_with = "serialize_ratio",
        deserialize_with = "deserialize_ratio"
    )]
    f64,
);

pub(crate) fn serialize_params<S: Serializer>(
    m: &BTreeMap<String, f64>,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k, MaybeInfinite(*v))))
}

pub(crate) fn deserialize_params<'de, D: Deserializer<'de>>(
    d: D,
) -> Result<BTreeMap<String, f64>, D::Error> {
    let m = BTreeMap::<String, MaybeInfinite>::deserialize(d)?;
    Ok(m.into_iter().map(|(k, v)| (k, v.0)).collect())
}
