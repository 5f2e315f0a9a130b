//! Ring-valued constructible functions on a cell complex.
//!
//! A [`CFunction`] assigns a ring value to every cell. Integration is the
//! compact-support Euler integral `Σ (−1)^{dim σ} φ(σ)`; pushforward along a
//! product projection integrates over the fibre.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cellspace::{
    ensure_same, CellComplex, CellIdx, CellSet, CellularMap, LocallyClosedSet, ProductComplex,
};
use crate::error::{Error, Result};
use crate::kring::{same_model, RingModel, RingValue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFunction {
    complex: Arc<CellComplex>,
    ring: Arc<RingModel>,
    values: Vec<RingValue>,
}

fn ensure_ring(a: &Arc<RingModel>, b: &Arc<RingModel>) -> Result<()> {
    if same_model(a, b) {
        Ok(())
    } else {
        Err(Error::ModelMismatch {
            left: a.to_string(),
            right: b.to_string(),
        })
    }
}

impl CFunction {
    pub fn zero(complex: &Arc<CellComplex>, ring: &Arc<RingModel>) -> Self {
        Self::const_fn(complex, ring, &RingValue::zero(ring)).expect("zero lies in its own ring")
    }

    pub fn one(complex: &Arc<CellComplex>, ring: &Arc<RingModel>) -> Self {
        Self::const_fn(complex, ring, &RingValue::one(ring)).expect("one lies in its own ring")
    }

    pub fn const_fn(
        complex: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        y: &RingValue,
    ) -> Result<Self> {
        ensure_ring(ring, y.model())?;
        Ok(Self {
            complex: Arc::clone(complex),
            ring: Arc::clone(ring),
            values: vec![y.clone(); complex.len()],
        })
    }

    /// `y · I_A`.
    pub fn indicator(set: &LocallyClosedSet, y: &RingValue) -> Self {
        let complex = set.complex();
        let ring = y.model();
        let zero = RingValue::zero(ring);
        Self {
            complex: Arc::clone(complex),
            ring: Arc::clone(ring),
            values: complex
                .cells()
                .map(|c| {
                    if set.contains(c) {
                        y.clone()
                    } else {
                        zero.clone()
                    }
                })
                .collect(),
        }
    }

    /// Like [`CFunction::indicator`] but rejects sets that are not locally closed.
    pub fn indicator_of(set: &CellSet, y: &RingValue) -> Result<Self> {
        Ok(Self::indicator(
            &LocallyClosedSet::try_from(set.clone())?,
            y,
        ))
    }

    /// Builds a function from per-cell values.
    pub fn from_values(
        complex: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        values: Vec<RingValue>,
    ) -> Result<Self> {
        if values.len() != complex.len() {
            return Err(Error::Arity {
                expected: complex.len(),
                got: values.len(),
            });
        }
        for v in &values {
            ensure_ring(ring, v.model())?;
        }
        Ok(Self {
            complex: Arc::clone(complex),
            ring: Arc::clone(ring),
            values,
        })
    }

    /// Builds a function from `(cell id, value)` pairs; omitted cells are zero.
    pub fn from_pairs<S: AsRef<str>>(
        complex: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        pairs: impl IntoIterator<Item = (S, RingValue)>,
    ) -> Result<Self> {
        let mut out = Self::zero(complex, ring);
        for (id, v) in pairs {
            ensure_ring(ring, v.model())?;
            let c = complex.index_of(id.as_ref())?;
            out.values[c] = v;
        }
        Ok(out)
    }

    pub fn from_fn(
        complex: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        mut f: impl FnMut(CellIdx) -> RingValue,
    ) -> Self {
        let values = complex.cells().map(&mut f).collect();
        Self {
            complex: Arc::clone(complex),
            ring: Arc::clone(ring),
            values,
        }
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn values(&self) -> &[RingValue] {
        &self.values
    }

    pub fn at(&self, cell: CellIdx) -> &RingValue {
        &self.values[cell]
    }

    pub fn value(&self, id: &str) -> Result<&RingValue> {
        Ok(&self.values[self.complex.index_of(id)?])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(RingValue::is_zero)
    }

    fn check(&self, other: &CFunction) -> Result<()> {
        ensure_same(&self.complex, &other.complex)?;
        ensure_ring(&self.ring, &other.ring)
    }

    fn zip_with(
        &self,
        other: &CFunction,
        op: impl Fn(&RingValue, &RingValue) -> Result<RingValue>,
    ) -> Result<Self> {
        self.check(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| op(a, b))
            .collect::<Result<_>>()?;
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    /// Applies `f` to every value, keeping complex and ring.
    pub fn map_values(&self, f: impl Fn(&RingValue) -> Result<RingValue>) -> Result<Self> {
        let values = self.values.iter().map(f).collect::<Result<_>>()?;
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &CFunction) -> Result<Self> {
        self.zip_with(other, RingValue::add)
    }

    pub fn sub(&self, other: &CFunction) -> Result<Self> {
        self.zip_with(other, RingValue::sub)
    }

    pub fn mul(&self, other: &CFunction) -> Result<Self> {
        self.zip_with(other, RingValue::mul)
    }

    pub fn neg(&self) -> Self {
        Self {
            values: self.values.iter().map(RingValue::neg).collect(),
            ..self.clone()
        }
    }

    /// `y · φ`.
    pub fn scale(&self, y: &RingValue) -> Result<Self> {
        ensure_ring(&self.ring, y.model())?;
        self.map_values(|v| y.mul(v))
    }

    /// Integer multiple.
    pub fn times(&self, n: i64) -> Self {
        Self {
            values: self.values.iter().map(|v| v.scale(n)).collect(),
            ..self.clone()
        }
    }

    /// Nonzero values `(cell id, φ(σ))`, sorted by cell id:
    /// `φ = Σ φ(σ) · I_{{σ}}`.
    pub fn to_open_basis(&self) -> Vec<(String, RingValue)> {
        sorted_nonzero(&self.complex, self.values.iter().cloned().enumerate())
    }

    pub fn from_open_basis<S: AsRef<str>>(
        complex: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        basis: impl IntoIterator<Item = (S, RingValue)>,
    ) -> Result<Self> {
        let mut out = Self::zero(complex, ring);
        for (id, v) in basis {
            let c = complex.index_of(id.as_ref())?;
            out.values[c] = out.values[c].add(&v)?;
        }
        Ok(out)
    }

    /// Coefficients `c_σ` with `φ = Σ c_σ · I_{cl σ}`, nonzero ones only, sorted by id.
    ///
    /// `φ(τ) = Σ_{σ ≥ τ} c_σ`, so the system is triangular and is solved from
    /// the top dimension down.
    pub fn to_closed_basis(&self) -> Vec<(String, RingValue)> {
        let complex = &self.complex;
        let mut order: Vec<CellIdx> = complex.cells().collect();
        order.sort_by_key(|&c| std::cmp::Reverse(complex.dim(c)));
        let mut coeffs: Vec<RingValue> = vec![RingValue::zero(&self.ring); complex.len()];
        for &tau in &order {
            let mut c = self.values[tau].clone();
            for &sigma in complex.above(tau) {
                if sigma != tau {
                    c = c.sub(&coeffs[sigma]).expect("shared ring");
                }
            }
            coeffs[tau] = c;
        }
        sorted_nonzero(complex, coeffs.into_iter().enumerate())
    }

    pub fn from_closed_basis<S: AsRef<str>>(
        complex: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        basis: impl IntoIterator<Item = (S, RingValue)>,
    ) -> Result<Self> {
        let mut out = Self::zero(complex, ring);
        for (id, v) in basis {
            ensure_ring(ring, v.model())?;
            let sigma = complex.index_of(id.as_ref())?;
            for &tau in complex.below(sigma) {
                out.values[tau] = out.values[tau].add(&v)?;
            }
        }
        Ok(out)
    }

    /// `Σ_σ (−1)^{dim σ} φ(σ)`.
    pub fn integrate(&self) -> RingValue {
        signed_sum(
            self.complex
                .cells()
                .map(|c| (self.complex.sign(c), &self.values[c])),
            &self.ring,
        )
    }

    /// `φ ∘ f`.
    pub fn pullback(&self, f: &CellularMap) -> Result<CFunction> {
        ensure_same(f.target(), &self.complex)?;
        Ok(Self::from_fn(f.source(), &self.ring, |c| {
            self.values[f.apply(c)].clone()
        }))
    }

    /// `φ · I_A` read off on the cells of `A`, in increasing cell order.
    pub fn restrict(&self, set: &LocallyClosedSet) -> Result<Vec<RingValue>> {
        ensure_same(set.complex(), &self.complex)?;
        Ok(set.iter().map(|c| self.values[c].clone()).collect())
    }

    /// Inverse of [`CFunction::restrict`]: places `values` on `A` and zero elsewhere.
    pub fn extend_by_zero(
        set: &LocallyClosedSet,
        ring: &Arc<RingModel>,
        values: &[RingValue],
    ) -> Result<CFunction> {
        if values.len() != set.len() {
            return Err(Error::Arity {
                expected: set.len(),
                got: values.len(),
            });
        }
        let mut out = Self::zero(set.complex(), ring);
        for (c, v) in set.iter().zip(values) {
            ensure_ring(ring, v.model())?;
            out.values[c] = v.clone();
        }
        Ok(out)
    }

    /// Combinatorial Verdier dual:
    /// `(Dφ)(σ) = Σ_{τ ≥ σ} (−1)^{dim τ} · dual(φ(τ))`.
    pub fn verdier_dual(&self) -> CFunction {
        let complex = &self.complex;
        let duals: Vec<RingValue> = self.values.iter().map(RingValue::dual).collect();
        Self::from_fn(complex, &self.ring, |sigma| {
            signed_sum(
                complex
                    .above(sigma)
                    .iter()
                    .map(|&t| (complex.sign(t), &duals[t])),
                &self.ring,
            )
        })
    }
}

fn signed_sum<'a>(
    terms: impl Iterator<Item = (i64, &'a RingValue)>,
    ring: &Arc<RingModel>,
) -> RingValue {
    // Accumulate coordinates directly; all values share `ring`.
    let mut acc = vec![0i64; ring.arity()];
    for (s, v) in terms {
        for (a, c) in acc.iter_mut().zip(v.coords()) {
            *a += s * c;
        }
    }
    RingValue::new(ring, acc).expect("arity matches ring")
}

fn sorted_nonzero(
    complex: &CellComplex,
    values: impl Iterator<Item = (CellIdx, RingValue)>,
) -> Vec<(String, RingValue)> {
    let map: BTreeMap<String, RingValue> = values
        .filter(|(_, v)| !v.is_zero())
        .map(|(c, v)| (complex.id(c).to_owned(), v))
        .collect();
    map.into_iter().collect()
}

/// Fibre integral onto the right factor: `(q_!K)(τ) = Σ_σ (−1)^{dim σ} K(σ×τ)`.
pub fn pushforward_proj(product: &ProductComplex, kernel: &CFunction) -> Result<CFunction> {
    ensure_same(product.complex(), kernel.complex())?;
    let left = product.left();
    Ok(CFunction::from_fn(product.right(), kernel.ring(), |tau| {
        signed_sum(
            left.cells()
                .map(|s| (left.sign(s), kernel.at(product.pair(s, tau)))),
            kernel.ring(),
        )
    }))
}

/// Fibre integral onto the left factor.
pub fn pushforward_left(product: &ProductComplex, kernel: &CFunction) -> Result<CFunction> {
    ensure_same(product.complex(), kernel.complex())?;
    let right = product.right();
    Ok(CFunction::from_fn(product.left(), kernel.ring(), |sigma| {
        signed_sum(
            right
                .cells()
                .map(|t| (right.sign(t), kernel.at(product.pair(sigma, t)))),
            kernel.ring(),
        )
    }))
}

/// `(φ ⊠ ψ)(σ×τ) = φ(σ) · ψ(τ)`.
pub fn external_product(
    product: &ProductComplex,
    phi: &CFunction,
    psi: &CFunction,
) -> Result<CFunction> {
    ensure_same(product.left(), phi.complex())?;
    ensure_same(product.right(), psi.complex())?;
    ensure_ring(phi.ring(), psi.ring())?;
    let values = product
        .complex()
        .cells()
        .map(|c| {
            let (s, t) = product.split(c);
            phi.at(s).mul(psi.at(t))
        })
        .collect::<Result<_>>()?;
    CFunction::from_values(product.complex(), phi.ring(), values)
}

pub fn integrate(phi: &CFunction) -> RingValue {
    phi.integrate()
}

pub fn verdier_dual(phi: &CFunction) -> CFunction {
    phi.verdier_dual()
}
