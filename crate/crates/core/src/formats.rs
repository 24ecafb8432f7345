//! JSON exchange formats.
//!
//! Matrices are `{rows, cols, entries}` with `entries` a flat row-major list
//! of `[re, im]` pairs. Ensembles are a list of `{weight, state}`. Every
//! float is written in scientific notation with 17 significant digits, so a
//! write/read cycle is bit-exact.

use std::fs;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::{Error as _, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::ensemble::{Ensemble, EnsembleMember};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PureState, C64};
use crate::tomography::CorrelationSet;

/// Float serialized with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Precise(pub f64);

impl Serialize for Precise {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("non-finite value {}", self.0)));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Precise {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Precise)
    }
}

/// `#[serde(with = "precise")]` for `f64` fields.
pub mod precise {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        Precise(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

/// `#[serde(with = "precise_complex")]` for `Vec<C64>` fields as `[[re, im], …]`.
pub mod precise_complex {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| [Precise(z.re), Precise(z.im)]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

struct Entries<'a>(&'a [C64]);

impl Serialize for Entries<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        precise_complex::serialize(self.0, s)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ComplexMatrix", 3)?;
        st.serialize_field("rows", &self.rows())?;
        st.serialize_field("cols", &self.cols())?;
        st.serialize_field("entries", &Entries(self.as_slice()))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            rows: usize,
            cols: usize,
            #[serde(with = "precise_complex")]
            entries: Vec<C64>,
        }
        let raw = Raw::deserialize(d)?;
        ComplexMatrix::new(raw.rows, raw.cols, raw.entries).map_err(de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct MemberRecord {
    #[serde(with = "precise")]
    weight: f64,
    #[serde(with = "precise_complex")]
    state: Vec<C64>,
}

/// Pretty JSON with arrays of plain values kept on one line.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let pretty = serde_json::to_string_pretty(value)?;
    let lines: Vec<&str> = pretty.lines().collect();
    let mut out = Vec::with_capacity(lines.len());
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i];
        if line.ends_with('[') {
            let close = lines[i + 1..]
                .iter()
                .position(|l| l.trim_start().starts_with(']'));
            if let Some(k) = close {
                let items = &lines[i + 1..i + 1 + k];
                if !items.is_empty() && items.iter().all(|l| !l.ends_with('[') && !l.ends_with('{'))
                {
                    let joined: Vec<&str> = items
                        .iter()
                        .map(|l| l.trim().trim_end_matches(','))
                        .collect();
                    out.push(format!(
                        "{line}{}{}",
                        joined.join(", "),
                        lines[i + 1 + k].trim_start()
                    ));
                    i += k + 2;
                    continue;
                }
            }
        }
        out.push(line.to_string());
        i += 1;
    }
    Ok(out.join("\n"))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    to_json(m).expect("finite matrices serialize")
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    Ok(serde_json::from_str(text)?)
}

pub fn ensemble_to_json(e: &Ensemble) -> String {
    let records: Vec<MemberRecord> = e
        .members()
        .iter()
        .map(|m| MemberRecord {
            weight: m.weight,
            state: m.state.amplitudes().to_vec(),
        })
        .collect();
    to_json(&records).expect("finite ensembles serialize")
}

/// Parses an ensemble file; states must be normalized and weights must sum to 1.
pub fn ensemble_from_json(text: &str) -> Result<Ensemble> {
    let records: Vec<MemberRecord> = serde_json::from_str(text)?;
    let members = records
        .into_iter()
        .map(|r| {
            Ok(EnsembleMember {
                weight: r.weight,
                state: PureState::new(r.state)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(members)
}

pub fn correlations_to_json(set: &CorrelationSet) -> String {
    to_json(set).expect("finite records serialize")
}

pub fn correlations_from_json(text: &str) -> Result<CorrelationSet> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_to_string(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    matrix_from_json(&read_to_string(path)?)
}

pub fn read_ensemble(path: impl AsRef<Path>) -> Result<Ensemble> {
    ensemble_from_json(&read_to_string(path)?)
}

pub fn read_correlations(path: impl AsRef<Path>) -> Result<CorrelationSet> {
    correlations_from_json(&read_to_string(path)?)
}

/// Writes `text` plus a trailing newline.
pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n"))?;
    Ok(())
}
