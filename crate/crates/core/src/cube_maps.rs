//! Faces, degeneracies, connections and the shuffle of hypercubes `[0,1]^n`
//! with exact rational coordinates.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Label = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubeError {
    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },
    #[error("coordinate {0} outside [0,1]")]
    Range(String),
    #[error("invalid rational {0:?}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Minus,
    Plus,
}

/// A point of `[0,1]^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CubePoint(Vec<Label>);

impl CubePoint {
    pub fn new(coords: Vec<Label>) -> Result<Self, CubeError> {
        if let Some(bad) = coords.iter().find(|c| !in_unit_interval(c)) {
            return Err(CubeError::Range(bad.to_string()));
        }
        Ok(CubePoint(coords))
    }

    /// The unique point of `[0,1]^0`.
    pub fn empty() -> Self {
        CubePoint(Vec::new())
    }

    /// Parses coordinates written as `p/q` or integers.
    pub fn parse<S: AsRef<str>>(coords: &[S]) -> Result<Self, CubeError> {
        let v = coords
            .iter()
            .map(|s| parse_label(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        CubePoint::new(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Label] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Label> {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for CubePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CubePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        CubePoint::parse(&v).map_err(serde::de::Error::custom)
    }
}

pub fn in_unit_interval(x: &Label) -> bool {
    *x >= Label::zero() && *x <= Label::one()
}

/// Parses `p/q` or an integer into a reduced rational.
pub fn parse_label(s: &str) -> Result<Label, CubeError> {
    let s = s.trim();
    let r = BigRational::from_str(s).map_err(|_| CubeError::Parse(s.to_string()))?;
    if !in_unit_interval(&r) {
        return Err(CubeError::Range(s.to_string()));
    }
    Ok(r)
}

fn check(index: usize, max: usize) -> Result<usize, CubeError> {
    if index == 0 || index > max {
        Err(CubeError::Index { index, max })
    } else {
        Ok(index - 1)
    }
}

/// `∂_i^±`: inserts 0 or 1 at position `i` (1-based) of a point of
/// `[0,1]^{n-1}`.
pub fn face(sign: Sign, i: usize, x: &CubePoint) -> Result<CubePoint, CubeError> {
    let k = check(i, x.dim() + 1)?;
    let mut v = x.0.clone();
    let val = match sign {
        Sign::Minus => Label::zero(),
        Sign::Plus => Label::one(),
    };
    v.insert(k, val);
    Ok(CubePoint(v))
}

/// `π_i`: deletes coordinate `i`.
pub fn degeneracy(i: usize, x: &CubePoint) -> Result<CubePoint, CubeError> {
    let k = check(i, x.dim())?;
    let mut v = x.0.clone();
    v.remove(k);
    Ok(CubePoint(v))
}

/// `γ_i`: replaces coordinates `i, i+1` by their maximum.
pub fn connection(i: usize, x: &CubePoint) -> Result<CubePoint, CubeError> {
    let k = check(i, x.dim().saturating_sub(1))?;
    let mut v = x.0.clone();
    let b = v.remove(k + 1);
    if b > v[k] {
        v[k] = b;
    }
    Ok(CubePoint(v))
}

/// `σ_i(x, y) = (x_1..x_{i-1}, y_1..y_t, x_i..x_s)`.
pub fn shuffle(i: usize, x: &CubePoint, y: &CubePoint) -> Result<CubePoint, CubeError> {
    let k = check(i, x.dim() + 1)?;
    let mut v = Vec::with_capacity(x.dim() + y.dim());
    v.extend_from_slice(&x.0[..k]);
    v.extend_from_slice(&y.0);
    v.extend_from_slice(&x.0[k..]);
    Ok(CubePoint(v))
}
