use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Identifier of an integration variable.
///
/// `Point(0)` is the observation point `y` of the interacting field.
/// Slot indices are one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Point(u32),
    Stamp(u32),
    Slot { stamp: u32, index: u32 },
}

impl Label {
    pub const Y: Label = Label::Point(0);

    pub fn slot(stamp: u32, index: u32) -> Label {
        Label::Slot { stamp, index }
    }

    /// The vertex a label hangs off: slots belong to their stamp, everything
    /// else is its own vertex.
    pub fn vertex(self) -> Label {
        match self {
            Label::Slot { stamp, .. } => Label::Stamp(stamp),
            other => other,
        }
    }

    pub fn is_slot(self) -> bool {
        matches!(self, Label::Slot { .. })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Point(0) => write!(f, "y"),
            Label::Point(p) => write!(f, "p{p}"),
            Label::Stamp(s) => write!(f, "x{s}"),
            Label::Slot { stamp, index } => write!(f, "x{stamp}.{index}"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed label `{s}`"));
        if s == "y" {
            return Ok(Label::Y);
        }
        if let Some(rest) = s.strip_prefix('p') {
            return rest.parse().map(Label::Point).map_err(|_| bad());
        }
        let rest = s.strip_prefix('x').ok_or_else(bad)?;
        match rest.split_once('.') {
            Some((st, ix)) => Ok(Label::slot(st.parse().map_err(|_| bad())?, ix.parse().map_err(|_| bad())?)),
            None => rest.parse().map(Label::Stamp).map_err(|_| bad()),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A factor entering a time-ordered product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    /// Non-local interaction `∫ dx̲ⁿ Γₙ(x̲; x) φ(x̲)ⁿ` with time stamp `x`.
    Stamp { id: u32, n: u32 },
    /// A single field `φ(p)`; `External { id: 0 }` is the observable `φ(y)`.
    External { id: u32 },
}

impl Vertex {
    pub fn time_label(&self) -> Label {
        match *self {
            Vertex::Stamp { id, .. } => Label::Stamp(id),
            Vertex::External { id } => Label::Point(id),
        }
    }

    pub fn fields(&self) -> Vec<Label> {
        match *self {
            Vertex::Stamp { id, n } => (1..=n).map(|i| Label::slot(id, i)).collect(),
            Vertex::External { id } => vec![Label::Point(id)],
        }
    }
}
