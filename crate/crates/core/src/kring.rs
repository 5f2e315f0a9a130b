//! Grothendieck-ring value models.
//!
//! A [`RingModel`] describes a commutative unital ring with integer
//! coordinates; a [`RingValue`] is an element of it. Three shapes are
//! available:
//!
//! * `Integers`: the ring ℤ, the numerical K₀ of a point.
//! * `TruncatedCurve(M)`: ℤ ⊕ M with M² = 0, the K₀ of a smooth projective
//!   curve written as (rank, determinant). The first free coordinate of M is
//!   the degree; anything after it stands in for Pic₀.
//! * `Product(..)`: componentwise products of the above.
//!
//! Coordinates are `i64`; torsion coordinates are kept in `0..order`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely generated abelian group ℤ^free_rank ⊕ ⊕ ℤ/nᵢ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroupDescriptor {
    pub free_rank: usize,
    pub torsion_orders: Vec<i64>,
}

impl AbelianGroupDescriptor {
    pub fn new(free_rank: usize, torsion_orders: Vec<i64>) -> Result<Self> {
        if let Some(&bad) = torsion_orders.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidTorsionOrder(bad));
        }
        Ok(Self {
            free_rank,
            torsion_orders,
        })
    }

    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion_orders: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.free_rank + self.torsion_orders.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RingModelRepr", into = "RingModelRepr")]
pub enum RingModel {
    Integers,
    TruncatedCurve(AbelianGroupDescriptor),
    Product(Vec<RingModel>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RingModelRepr {
    Integers,
    Curve {
        free_rank: usize,
        #[serde(default)]
        torsion: Vec<i64>,
    },
    Product {
        factors: Vec<RingModel>,
    },
}

impl TryFrom<RingModelRepr> for RingModel {
    type Error = Error;

    fn try_from(repr: RingModelRepr) -> Result<Self> {
        Ok(match repr {
            RingModelRepr::Integers => RingModel::Integers,
            RingModelRepr::Curve { free_rank, torsion } => {
                RingModel::TruncatedCurve(AbelianGroupDescriptor::new(free_rank, torsion)?)
            }
            RingModelRepr::Product { factors } => RingModel::Product(factors),
        })
    }
}

impl From<RingModel> for RingModelRepr {
    fn from(model: RingModel) -> Self {
        match model {
            RingModel::Integers => RingModelRepr::Integers,
            RingModel::TruncatedCurve(m) => RingModelRepr::Curve {
                free_rank: m.free_rank,
                torsion: m.torsion_orders,
            },
            RingModel::Product(factors) => RingModelRepr::Product { factors },
        }
    }
}

impl fmt::Display for RingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingModel::Integers => write!(f, "Z"),
            RingModel::TruncatedCurve(m) => {
                write!(f, "Z+(Z^{}", m.free_rank)?;
                for n in &m.torsion_orders {
                    write!(f, "+Z/{n}")?;
                }
                write!(f, ")")
            }
            RingModel::Product(factors) => {
                write!(f, "[")?;
                for (i, factor) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{factor}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl RingModel {
    /// ℤ ⊕ ℤ: the K₀ of the projective line.
    pub fn projective_line() -> Self {
        RingModel::TruncatedCurve(AbelianGroupDescriptor::free(1))
    }

    /// Number of integer coordinates of an element.
    pub fn arity(&self) -> usize {
        match self {
            RingModel::Integers => 1,
            RingModel::TruncatedCurve(m) => 1 + m.arity(),
            RingModel::Product(factors) => factors.iter().map(RingModel::arity).sum(),
        }
    }

    /// Per-coordinate modulus, 0 meaning a free coordinate.
    pub fn moduli(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.arity());
        self.push_moduli(&mut out);
        out
    }

    fn push_moduli(&self, out: &mut Vec<i64>) {
        match self {
            RingModel::Integers => out.push(0),
            RingModel::TruncatedCurve(m) => {
                out.extend(std::iter::repeat_n(0, 1 + m.free_rank));
                out.extend(m.torsion_orders.iter().copied());
            }
            RingModel::Product(factors) => factors.iter().for_each(|f| f.push_moduli(out)),
        }
    }

    fn reduce(&self, coords: &mut [i64]) {
        for (c, n) in coords.iter_mut().zip(self.moduli()) {
            if n != 0 {
                *c = c.rem_euclid(n);
            }
        }
    }

    fn push_one(&self, out: &mut Vec<i64>) {
        match self {
            RingModel::Integers => out.push(1),
            RingModel::TruncatedCurve(m) => {
                out.push(1);
                out.extend(std::iter::repeat_n(0, m.arity()));
            }
            RingModel::Product(factors) => factors.iter().for_each(|f| f.push_one(out)),
        }
    }

    fn mul_into(&self, a: &[i64], b: &[i64], out: &mut Vec<i64>) {
        match self {
            RingModel::Integers => out.push(a[0] * b[0]),
            RingModel::TruncatedCurve(_) => {
                let (ra, rb) = (a[0], b[0]);
                out.push(ra * rb);
                // (r₁, m₁)(r₂, m₂) = (r₁r₂, r₁m₂ + r₂m₁); m₁m₂ = 0
                out.extend(
                    a[1..]
                        .iter()
                        .zip(&b[1..])
                        .map(|(&ma, &mb)| ra * mb + rb * ma),
                );
            }
            RingModel::Product(factors) => {
                let mut offset = 0;
                for factor in factors {
                    let k = factor.arity();
                    factor.mul_into(&a[offset..offset + k], &b[offset..offset + k], out);
                    offset += k;
                }
            }
        }
    }

    fn dual_into(&self, a: &[i64], out: &mut Vec<i64>) {
        match self {
            RingModel::Integers => out.push(a[0]),
            RingModel::TruncatedCurve(_) => {
                out.push(a[0]);
                out.extend(a[1..].iter().map(|&m| -m));
            }
            RingModel::Product(factors) => {
                let mut offset = 0;
                for factor in factors {
                    let k = factor.arity();
                    factor.dual_into(&a[offset..offset + k], out);
                    offset += k;
                }
            }
        }
    }

    fn curve_with_degree(&self, op: &'static str) -> Result<()> {
        match self {
            RingModel::TruncatedCurve(m) if m.free_rank >= 1 => Ok(()),
            _ => Err(Error::UnsupportedModel {
                op,
                model: self.to_string(),
            }),
        }
    }

    pub fn supports_fm(&self) -> bool {
        self.curve_with_degree("fm").is_ok()
    }
}

/// An element of a [`RingModel`].
#[derive(Debug, Clone)]
pub struct RingValue {
    model: Arc<RingModel>,
    coords: Vec<i64>,
}

impl PartialEq for RingValue {
    fn eq(&self, other: &Self) -> bool {
        same_model(&self.model, &other.model) && self.coords == other.coords
    }
}

impl Eq for RingValue {}

pub(crate) fn same_model(a: &Arc<RingModel>, b: &Arc<RingModel>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let RingModel::Integers = *self.model {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl RingValue {
    /// Builds a value, checking arity and reducing torsion coordinates.
    pub fn new(model: &Arc<RingModel>, coords: Vec<i64>) -> Result<Self> {
        let expected = model.arity();
        if coords.len() != expected {
            return Err(Error::Arity {
                expected,
                got: coords.len(),
            });
        }
        Ok(Self::from_raw(model, coords))
    }

    fn from_raw(model: &Arc<RingModel>, mut coords: Vec<i64>) -> Self {
        model.reduce(&mut coords);
        Self {
            model: Arc::clone(model),
            coords,
        }
    }

    pub fn zero(model: &Arc<RingModel>) -> Self {
        Self {
            model: Arc::clone(model),
            coords: vec![0; model.arity()],
        }
    }

    pub fn one(model: &Arc<RingModel>) -> Self {
        let mut coords = Vec::with_capacity(model.arity());
        model.push_one(&mut coords);
        Self {
            model: Arc::clone(model),
            coords,
        }
    }

    /// The image of an integer under ℤ → R.
    pub fn from_int(model: &Arc<RingModel>, n: i64) -> Self {
        Self::one(model).scale(n)
    }

    pub fn model(&self) -> &Arc<RingModel> {
        &self.model
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_model(&self.model, &other.model) {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                left: self.model.to_string(),
                right: other.model.to_string(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_raw(&self.model, coords))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_raw(&self.model, self.coords.iter().map(|c| -c).collect())
    }

    /// Integer multiple `n · self`.
    pub fn scale(&self, n: i64) -> Self {
        Self::from_raw(&self.model, self.coords.iter().map(|c| n * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut coords = Vec::with_capacity(self.coords.len());
        self.model
            .mul_into(&self.coords, &other.coords, &mut coords);
        Ok(Self::from_raw(&self.model, coords))
    }

    /// Duality: identity on ranks, negation on the determinant part.
    pub fn dual(&self) -> Self {
        let mut coords = Vec::with_capacity(self.coords.len());
        self.model.dual_into(&self.coords, &mut coords);
        Self::from_raw(&self.model, coords)
    }

    /// Fourier–Mukai action on the K₀ of a genus-one curve:
    /// `(r, d, a) ↦ (d, −r, −a)`.
    pub fn fm(&self) -> Result<Self> {
        self.model.curve_with_degree("fm")?;
        let mut coords = Vec::with_capacity(self.coords.len());
        coords.push(self.coords[1]);
        coords.push(-self.coords[0]);
        coords.extend(self.coords[2..].iter().map(|a| -a));
        Ok(Self::from_raw(&self.model, coords))
    }

    /// Inverse of [`RingValue::fm`]: `(r, d, a) ↦ (−d, r, −a)`.
    pub fn fm_inverse(&self) -> Result<Self> {
        self.model.curve_with_degree("fm_inverse")?;
        let mut coords = Vec::with_capacity(self.coords.len());
        coords.push(-self.coords[1]);
        coords.push(self.coords[0]);
        coords.extend(self.coords[2..].iter().map(|a| -a));
        Ok(Self::from_raw(&self.model, coords))
    }

    /// Pullback along the group inversion of the curve, `(r, d, a) ↦ (r, d, −a)`.
    /// The composite `fm ∘ fm` equals `neg ∘ antipode`.
    pub fn antipode(&self) -> Result<Self> {
        self.model.curve_with_degree("antipode")?;
        let mut coords = self.coords.clone();
        coords[2..].iter_mut().for_each(|a| *a = -*a);
        Ok(Self::from_raw(&self.model, coords))
    }
}

pub fn ring_zero(model: &Arc<RingModel>) -> RingValue {
    RingValue::zero(model)
}

pub fn ring_one(model: &Arc<RingModel>) -> RingValue {
    RingValue::one(model)
}

pub fn ring_add(a: &RingValue, b: &RingValue) -> Result<RingValue> {
    a.add(b)
}

pub fn ring_neg(a: &RingValue) -> RingValue {
    a.neg()
}

pub fn ring_mul(a: &RingValue, b: &RingValue) -> Result<RingValue> {
    a.mul(b)
}

pub fn ring_dual(a: &RingValue) -> RingValue {
    a.dual()
}

pub fn fm_value(a: &RingValue) -> Result<RingValue> {
    a.fm()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RingValueRepr {
    model: RingModel,
    coords: Vec<i64>,
}

impl Serialize for RingValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RingValueRepr {
            model: (*self.model).clone(),
            coords: self.coords.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RingValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RingValueRepr::deserialize(deserializer)?;
        RingValue::new(&Arc::new(repr.model), repr.coords).map_err(serde::de::Error::custom)
    }
}
