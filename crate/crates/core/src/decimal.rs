//! Serde adapter writing integers as decimal strings.
//!
//! Accepts either a string or a JSON integer on input.

use std::fmt::Display;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serializer};

pub fn serialize<T: Display, S: Serializer>(value: &T, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Text(String),
    Signed(i64),
    Unsigned(u64),
}

pub fn deserialize<'de, T, D>(deserializer: D) -> Result<T, D::Error>
where
    T: FromStr,
    T::Err: Display,
    D: Deserializer<'de>,
{
    let text = match Repr::deserialize(deserializer)? {
        Repr::Text(s) => s,
        Repr::Signed(v) => v.to_string(),
        Repr::Unsigned(v) => v.to_string(),
    };
    text.trim().parse().map_err(de::Error::custom)
}

/// Same adapter for sequences.
pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<T: Display, S: Serializer>(
        values: &[T],
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, T, D>(deserializer: D) -> Result<Vec<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let raw = Vec::<Repr>::deserialize(deserializer)?;
        raw.into_iter()
            .map(|r| {
                let text = match r {
                    Repr::Text(s) => s,
                    Repr::Signed(v) => v.to_string(),
                    Repr::Unsigned(v) => v.to_string(),
                };
                text.trim().parse().map_err(de::Error::custom)
            })
            .collect()
    }
}
