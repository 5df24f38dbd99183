//! Complex numbers on the wire are `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Pair = [f64; 2];

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| to_pair(*z)).collect::<Vec<_>>().serialize(s)
    }

    /// Accepts `[re, im]` pairs or plain reals.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let nums = Vec::<Number>::deserialize(d)?;
        Ok(nums.into_iter().map(Number::into_complex).collect())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Real(f64),
    Pair(Pair),
}

impl Number {
    fn into_complex(self) -> Complex64 {
        match self {
            Number::Real(x) => Complex64::new(x, 0.0),
            Number::Pair(p) => from_pair(p),
        }
    }
}

pub mod opt_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|z| to_pair(*z)).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Complex64>>, D::Error> {
        let pairs = Option::<Vec<Pair>>::deserialize(d)?;
        Ok(pairs.map(|p| p.into_iter().map(from_pair).collect()))
    }
}

pub mod mat {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|row| row.iter().map(|z| to_pair(*z)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
        let rows = Vec::<Vec<Pair>>::deserialize(d)?;
        Ok(rows
            .into_iter()
            .map(|r| r.into_iter().map(from_pair).collect())
            .collect())
    }
}

pub mod tensor3 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Vec<Complex64>>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|z| to_pair(*z)).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Vec<Vec<Vec<Complex64>>>, D::Error> {
        let t = Vec::<Vec<Vec<Pair>>>::deserialize(d)?;
        Ok(t.into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|r| r.into_iter().map(from_pair).collect())
                    .collect()
            })
            .collect())
    }
}

/// Dense complex matrix as nested rows of pairs.
pub mod dmat {
    use super::*;
    use nalgebra::DMatrix;

    pub fn serialize<S: Serializer>(m: &DMatrix<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        m.row_iter()
            .map(|row| row.iter().map(|z| to_pair(*z)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

/// Complex vector as a list of pairs.
pub mod dvec {
    use super::*;
    use nalgebra::DVector;

    pub fn serialize<S: Serializer>(v: &DVector<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| to_pair(*z)).collect::<Vec<_>>().serialize(s)
    }
}

pub mod opt_dvec {
    use super::*;
    use nalgebra::DVector;

    pub fn serialize<S: Serializer>(v: &Option<DVector<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|z| to_pair(*z)).collect::<Vec<_>>())
            .serialize(s)
    }
}
