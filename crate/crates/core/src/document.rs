//! JSON documents for quivers and Gram matrices (1-based vertices).

use crate::cyclo::{AngleLabel, CycloField, CycloReal};
use crate::error::{QmutError, Result};
use crate::quiver::Quiver;
use crate::rational::Rational;
use crate::realization::Realization;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub const SCHEMA_VERSION: u32 = 1;

/// A value given by its angle label or by power-basis coefficients over the ambient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<AngleLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowEntry {
    pub from: usize,
    pub to: usize,
    #[serde(flatten)]
    pub value: ValueEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverDocument {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub rank: usize,
    pub ambient: u32,
    pub arrows: Vec<ArrowEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramDocument {
    pub schema_version: u32,
    pub rank: usize,
    pub ambient: u32,
    pub gram: Vec<Vec<ValueEntry>>,
}

fn parse_err(msg: impl Into<String>) -> QmutError {
    QmutError::Parse(msg.into())
}

impl ValueEntry {
    /// Label when the value has one, coefficients otherwise.
    pub fn from_value(x: &CycloReal) -> ValueEntry {
        match x.to_label() {
            Some(l) => ValueEntry { label: Some(l), coeffs: None },
            None => ValueEntry { label: None, coeffs: Some(x.coeffs().iter().map(|c| c.to_string()).collect()) },
        }
    }

    pub fn to_value(&self, ambient: u32) -> Result<CycloReal> {
        match (&self.label, &self.coeffs) {
            (Some(l), None) => {
                if l.rational_value().is_none() && ambient % l.den() != 0 {
                    return Err(QmutError::IncompatibleAmbient { ambient, required: l.den() });
                }
                CycloReal::from_label(*l, ambient)
            }
            (None, Some(cs)) => {
                if cs.len() > CycloField::get(ambient).degree() {
                    return Err(parse_err(format!("{} coefficients exceed the field degree", cs.len())));
                }
                let cs = cs.iter().map(|c| c.parse::<Rational>().map_err(|e| parse_err(e.to_string()))).collect::<Result<Vec<_>>>()?;
                Ok(CycloReal::from_coeffs(&cs, ambient))
            }
            _ => Err(parse_err("an entry needs exactly one of \"label\" and \"coeffs\"")),
        }
    }
}

fn check_header(version: u32, ambient: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(parse_err(format!("unsupported schema_version {version}")));
    }
    if ambient == 0 {
        return Err(parse_err("ambient must be positive"));
    }
    Ok(())
}

impl QuiverDocument {
    pub fn from_json(s: &str) -> Result<QuiverDocument> {
        serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn to_quiver(&self) -> Result<Quiver> {
        check_header(self.schema_version, self.ambient)?;
        if self.rank == 0 {
            return Err(QmutError::EmptyVertexSet);
        }
        let mut pairs = HashSet::new();
        let mut arrows = Vec::with_capacity(self.arrows.len());
        for a in &self.arrows {
            for v in [a.from, a.to] {
                if v == 0 || v > self.rank {
                    return Err(QmutError::VertexOutOfRange { vertex: v, rank: self.rank });
                }
            }
            if a.from == a.to {
                return Err(parse_err(format!("loop at vertex {}", a.from)));
            }
            if !pairs.insert((a.from.min(a.to), a.from.max(a.to))) {
                return Err(parse_err(format!("duplicate arrow between {} and {}", a.from, a.to)));
            }
            let w = a.value.to_value(self.ambient)?;
            if w.sign() <= 0 {
                return Err(parse_err(format!("arrow {}->{} needs a positive weight", a.from, a.to)));
            }
            arrows.push((a.from - 1, a.to - 1, w));
        }
        Quiver::from_weights(self.rank, self.ambient, &arrows)
    }

    /// Arrows sorted by (from, to); labels whenever the weight has one.
    pub fn from_quiver(q: &Quiver) -> QuiverDocument {
        let arrows = q
            .arrows()
            .into_iter()
            .map(|(i, j)| ArrowEntry { from: i + 1, to: j + 1, value: ValueEntry::from_value(q.entry(i, j)) })
            .collect();
        QuiverDocument { schema_version: SCHEMA_VERSION, name: None, provenance: None, rank: q.rank(), ambient: q.ambient(), arrows }
    }
}

impl GramDocument {
    pub fn from_json(s: &str) -> Result<GramDocument> {
        serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn from_realization(r: &Realization, ambient: u32) -> GramDocument {
        let gram = r.rows().iter().map(|row| row.iter().map(ValueEntry::from_value).collect()).collect();
        GramDocument { schema_version: SCHEMA_VERSION, rank: r.rank(), ambient, gram }
    }

    pub fn to_realization(&self) -> Result<Realization> {
        check_header(self.schema_version, self.ambient)?;
        if self.gram.len() != self.rank {
            return Err(QmutError::WrongRank { expected: self.rank, got: self.gram.len() });
        }
        let rows = self
            .gram
            .iter()
            .map(|row| row.iter().map(|e| e.to_value(self.ambient)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Realization::from_rows(&rows)
    }
}
