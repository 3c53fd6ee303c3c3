//! Conjugacy classes of closed subgroups of SO(3).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default cap on the parameter of `Cyclic(n)` and `Dihedral(n)`.
pub const DEFAULT_N_CAP: u32 = 100;

/// A conjugacy class of closed subgroups of SO(3).
///
/// The derived ordering lists families from small to large, so sorting a set
/// of tags always yields a linear extension of subconjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassTag {
    Trivial,
    Cyclic(u32),
    Dihedral(u32),
    Tetra,
    Octa,
    Icosa,
    /// SO(2): rotations about one axis.
    Circle,
    /// O(2): axial rotations plus the π-flips about perpendicular axes.
    OrthCircle,
    /// SO(3) itself.
    Full,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TagError {
    #[error("unknown class kind {0:?}")]
    UnknownKind(String),
    #[error("class {kind} needs an integer parameter n >= 2")]
    MissingParameter { kind: String },
    #[error("class parameter n = {n} outside [2, {cap}]")]
    ParameterOutOfRange { n: u32, cap: u32 },
}

impl ClassTag {
    /// Order of the subgroup for finite classes.
    pub fn finite_order(self) -> Option<usize> {
        match self {
            ClassTag::Trivial => Some(1),
            ClassTag::Cyclic(n) => Some(n as usize),
            ClassTag::Dihedral(n) => Some(2 * n as usize),
            ClassTag::Tetra => Some(12),
            ClassTag::Octa => Some(24),
            ClassTag::Icosa => Some(60),
            ClassTag::Circle | ClassTag::OrthCircle | ClassTag::Full => None,
        }
    }

    pub fn is_finite(self) -> bool {
        self.finite_order().is_some()
    }

    /// Dimension of the Lie algebra.
    pub fn lie_algebra_dim(self) -> usize {
        match self {
            ClassTag::Circle | ClassTag::OrthCircle => 1,
            ClassTag::Full => 3,
            _ => 0,
        }
    }

    pub fn check_cap(self, n_cap: u32) -> Result<ClassTag, TagError> {
        match self {
            ClassTag::Cyclic(n) | ClassTag::Dihedral(n) if n < 2 || n > n_cap => {
                Err(TagError::ParameterOutOfRange { n, cap: n_cap })
            }
            t => Ok(t),
        }
    }

    /// Short kind code used in JSON.
    pub fn kind_code(self) -> &'static str {
        match self {
            ClassTag::Trivial => "1",
            ClassTag::Cyclic(_) => "C",
            ClassTag::Dihedral(_) => "D",
            ClassTag::Tetra => "T",
            ClassTag::Octa => "O",
            ClassTag::Icosa => "I",
            ClassTag::Circle => "SO2",
            ClassTag::OrthCircle => "O2",
            ClassTag::Full => "SO3",
        }
    }

    pub fn parameter(self) -> Option<u32> {
        match self {
            ClassTag::Cyclic(n) | ClassTag::Dihedral(n) => Some(n),
            _ => None,
        }
    }

    pub fn from_kind(kind: &str, n: Option<u32>) -> Result<ClassTag, TagError> {
        let need_n = || n.filter(|&n| n >= 2).ok_or(TagError::MissingParameter { kind: kind.to_string() });
        Ok(match kind {
            "1" => ClassTag::Trivial,
            "C" => ClassTag::Cyclic(need_n()?),
            "D" => ClassTag::Dihedral(need_n()?),
            "T" => ClassTag::Tetra,
            "O" => ClassTag::Octa,
            "I" => ClassTag::Icosa,
            "SO2" => ClassTag::Circle,
            "O2" => ClassTag::OrthCircle,
            "SO3" => ClassTag::Full,
            other => return Err(TagError::UnknownKind(other.to_string())),
        })
    }

    /// All tags with `Cyclic`/`Dihedral` parameter at most `n_max`.
    pub fn catalog(n_max: u32) -> Vec<ClassTag> {
        let mut tags = vec![ClassTag::Trivial];
        tags.extend((2..=n_max).map(ClassTag::Cyclic));
        tags.extend((2..=n_max).map(ClassTag::Dihedral));
        tags.extend([
            ClassTag::Tetra,
            ClassTag::Octa,
            ClassTag::Icosa,
            ClassTag::Circle,
            ClassTag::OrthCircle,
            ClassTag::Full,
        ]);
        tags
    }

    /// The finite tags with parameter at most `n_max`.
    pub fn finite_catalog(n_max: u32) -> Vec<ClassTag> {
        ClassTag::catalog(n_max).into_iter().filter(|t| t.is_finite()).collect()
    }
}

/// `(t1) ≤ (t2)`: some conjugate of a `t1` subgroup lies inside a `t2` subgroup.
pub fn is_subconjugate(t1: ClassTag, t2: ClassTag) -> bool {
    use ClassTag::*;
    if t1 == t2 {
        return true;
    }
    match (t1, t2) {
        (Trivial, _) => true,
        (_, Full) => true,
        (Cyclic(m), Cyclic(n)) => n % m == 0,
        (Cyclic(m), Dihedral(n)) => n % m == 0 || m == 2,
        (Cyclic(m), Tetra) => matches!(m, 2 | 3),
        (Cyclic(m), Octa) => matches!(m, 2..=4),
        (Cyclic(m), Icosa) => matches!(m, 2 | 3 | 5),
        (Cyclic(_), Circle | OrthCircle) => true,
        (Dihedral(m), Dihedral(n)) => n % m == 0,
        (Dihedral(m), Tetra) => m == 2,
        (Dihedral(m), Octa) => matches!(m, 2..=4),
        (Dihedral(m), Icosa) => matches!(m, 2 | 3 | 5),
        (Dihedral(_), OrthCircle) => true,
        (Tetra, Octa | Icosa) => true,
        (Circle, OrthCircle) => true,
        _ => false,
    }
}

/// Strict subconjugation `(t1) < (t2)`.
pub fn is_strictly_subconjugate(t1: ClassTag, t2: ClassTag) -> bool {
    t1 != t2 && is_subconjugate(t1, t2)
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::Trivial => write!(f, "1"),
            ClassTag::Cyclic(n) => write!(f, "C{n}"),
            ClassTag::Dihedral(n) => write!(f, "D{n}"),
            ClassTag::Tetra => write!(f, "T"),
            ClassTag::Octa => write!(f, "O"),
            ClassTag::Icosa => write!(f, "I"),
            ClassTag::Circle => write!(f, "SO(2)"),
            ClassTag::OrthCircle => write!(f, "O(2)"),
            ClassTag::Full => write!(f, "SO(3)"),
        }
    }
}

/// Parses display names (`C4`, `D3`, `T`, `SO(2)`, ...) as well as the JSON
/// kind codes (`SO2`, `O2`, `SO3`).
impl FromStr for ClassTag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<ClassTag, TagError> {
        let s = s.trim();
        match s {
            "SO(2)" | "SO2" => return Ok(ClassTag::Circle),
            "O(2)" | "O2" => return Ok(ClassTag::OrthCircle),
            "SO(3)" | "SO3" => return Ok(ClassTag::Full),
            _ => {}
        }
        let (kind, rest) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        if rest.is_empty() {
            return ClassTag::from_kind(kind, None);
        }
        let n = rest.parse::<u32>().map_err(|_| TagError::UnknownKind(s.to_string()))?;
        match kind {
            "C" | "D" => ClassTag::from_kind(kind, Some(n)),
            _ => Err(TagError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TagRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    n: Option<u32>,
}

impl Serialize for ClassTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TagRepr { kind: self.kind_code().to_string(), n: self.parameter() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClassTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<ClassTag, D::Error> {
        let repr = TagRepr::deserialize(deserializer)?;
        ClassTag::from_kind(&repr.kind, repr.n).map_err(serde::de::Error::custom)
    }
}
