//! Virtual relative sheaves and their Euler–Poincaré index.
//!
//! A [`VirtualSheaf`] is an integer combination of elementary terms
//! `I_Z ⊠ G` (a locally closed support `Z` carrying a K₀ class `G`). Its
//! index is the constructible function `Σ coeff · G · I_Z`. Because the
//! index is an isomorphism onto constructible functions, the open-cell
//! expansion of the index is a complete invariant: [`normal_form`].

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cellspace::{ensure_same, CellComplex, CellIdx, LocallyClosedSet};
use crate::cfun::CFunction;
use crate::error::{Error, Result};
use crate::kring::{same_model, RingModel, RingValue};

/// `I_Z ⊠ G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryTerm {
    pub support: LocallyClosedSet,
    pub klass: RingValue,
}

impl ElementaryTerm {
    pub fn new(support: LocallyClosedSet, klass: RingValue) -> Self {
        Self { support, klass }
    }

    pub fn is_trivial(&self) -> bool {
        self.support.is_empty() || self.klass.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualSheaf {
    complex: Arc<CellComplex>,
    ring: Arc<RingModel>,
    terms: Vec<(i64, ElementaryTerm)>,
}

/// Canonical listing: nonzero `(cell id, class)` pairs sorted by id.
pub type NormalForm = Vec<(String, RingValue)>;

impl VirtualSheaf {
    pub fn zero(complex: &Arc<CellComplex>, ring: &Arc<RingModel>) -> Self {
        Self {
            complex: Arc::clone(complex),
            ring: Arc::clone(ring),
            terms: Vec::new(),
        }
    }

    /// The unit `[p⁻¹O_S]`: whole complex, class one.
    pub fn unit(complex: &Arc<CellComplex>, ring: &Arc<RingModel>) -> Self {
        let mut v = Self::zero(complex, ring);
        v.terms.push((
            1,
            ElementaryTerm::new(LocallyClosedSet::all(complex), RingValue::one(ring)),
        ));
        v
    }

    pub fn new(
        complex: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        terms: impl IntoIterator<Item = (i64, ElementaryTerm)>,
    ) -> Result<Self> {
        let mut v = Self::zero(complex, ring);
        for (coeff, term) in terms {
            v.push(coeff, term)?;
        }
        Ok(v)
    }

    pub fn push(&mut self, coeff: i64, term: ElementaryTerm) -> Result<()> {
        ensure_same(&self.complex, term.support.complex())?;
        if !same_model(&self.ring, term.klass.model()) {
            return Err(Error::ModelMismatch {
                left: self.ring.to_string(),
                right: term.klass.model().to_string(),
            });
        }
        self.terms.push((coeff, term));
        Ok(())
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn terms(&self) -> &[(i64, ElementaryTerm)] {
        &self.terms
    }

    fn check(&self, other: &VirtualSheaf) -> Result<()> {
        ensure_same(&self.complex, &other.complex)?;
        if same_model(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            })
        }
    }

    /// Formal sum (concatenation of terms).
    pub fn add(&self, other: &VirtualSheaf) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(c, t)| (-c, t.clone())).collect(),
            ..self.clone()
        }
    }

    /// Drops zero coefficients, empty supports and zero classes.
    pub fn simplify(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(c, t)| *c != 0 && !t.is_trivial())
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// Replaces term `index` by the two pieces of [`split_term`].
    pub fn split_at(&self, index: usize, open_part: &LocallyClosedSet) -> Result<Self> {
        let (coeff, term) = self.terms.get(index).ok_or(Error::BadAssignment)?;
        let (open, rest) = split_term(term, open_part)?;
        let mut out = self.clone();
        out.terms
            .splice(index..=index, [(*coeff, open), (*coeff, rest)]);
        Ok(out)
    }
}

/// Cellwise graded K₀ classes `H^j(F|_{{x}×S})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellwiseComplex {
    complex: Arc<CellComplex>,
    ring: Arc<RingModel>,
    degrees: Vec<BTreeMap<i32, RingValue>>,
}

impl CellwiseComplex {
    pub fn new(complex: &Arc<CellComplex>, ring: &Arc<RingModel>) -> Self {
        Self {
            complex: Arc::clone(complex),
            ring: Arc::clone(ring),
            degrees: vec![BTreeMap::new(); complex.len()],
        }
    }

    /// Sets the class of `H^degree` on `cell`.
    pub fn set(&mut self, cell: CellIdx, degree: i32, klass: RingValue) -> Result<()> {
        if !same_model(&self.ring, klass.model()) {
            return Err(Error::ModelMismatch {
                left: self.ring.to_string(),
                right: klass.model().to_string(),
            });
        }
        self.degrees[cell].insert(degree, klass);
        Ok(())
    }

    pub fn set_by_id(&mut self, id: &str, degree: i32, klass: RingValue) -> Result<()> {
        let cell = self.complex.index_of(id)?;
        self.set(cell, degree, klass)
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        &self.ring
    }

    pub fn degrees(&self, cell: CellIdx) -> &BTreeMap<i32, RingValue> {
        &self.degrees[cell]
    }
}

/// Cellwise alternating sum `Σ_j (−1)^j [H^j]`.
pub fn chi_of_cellwise(c: &CellwiseComplex) -> CFunction {
    CFunction::from_fn(&c.complex, &c.ring, |cell| {
        c.degrees[cell]
            .iter()
            .fold(RingValue::zero(&c.ring), |acc, (&j, klass)| {
                let term = if j % 2 == 0 {
                    klass.clone()
                } else {
                    klass.neg()
                };
                acc.add(&term).expect("shared ring")
            })
    })
}

/// Euler–Poincaré index `Σ coeff · klass · I_support`.
pub fn chi(v: &VirtualSheaf) -> CFunction {
    let mut acc: Vec<RingValue> = vec![RingValue::zero(&v.ring); v.complex.len()];
    for (coeff, term) in &v.terms {
        let contribution = term.klass.scale(*coeff);
        for cell in term.support.iter() {
            acc[cell] = acc[cell].add(&contribution).expect("shared ring");
        }
    }
    CFunction::from_values(&v.complex, &v.ring, acc).expect("values built in ring")
}

pub fn normal_form(v: &VirtualSheaf) -> NormalForm {
    chi(v).to_open_basis()
}

/// Equality in K: normal forms agree.
pub fn k_equal(v: &VirtualSheaf, w: &VirtualSheaf) -> Result<bool> {
    v.check(w)?;
    Ok(normal_form(v) == normal_form(w))
}

/// One unit-coefficient term per cell with nonzero value, supported on that cell.
pub fn realize(phi: &CFunction) -> VirtualSheaf {
    let complex = phi.complex();
    let terms = complex
        .cells()
        .filter(|&c| !phi.at(c).is_zero())
        .map(|c| {
            (
                1,
                ElementaryTerm::new(LocallyClosedSet::single(complex, c), phi.at(c).clone()),
            )
        })
        .collect();
    VirtualSheaf {
        complex: Arc::clone(complex),
        ring: Arc::clone(phi.ring()),
        terms,
    }
}

/// Splits `t` along a relatively open `U ⊆ support` into terms on `U` and on
/// `support ∖ U`, both with the class of `t`.
pub fn split_term(
    t: &ElementaryTerm,
    open_part: &LocallyClosedSet,
) -> Result<(ElementaryTerm, ElementaryTerm)> {
    let support = &t.support;
    ensure_same(support.complex(), open_part.complex())?;
    if let Some(w) = open_part.iter().find(|&c| !support.contains(c)) {
        return Err(Error::NotASubset {
            witness: support.complex().id(w).to_owned(),
        });
    }
    let complex = support.complex();
    for c in open_part.iter() {
        if let Some(&w) = complex
            .above(c)
            .iter()
            .find(|&&up| support.contains(up) && !open_part.contains(up))
        {
            return Err(Error::NotRelativelyOpen {
                witness: complex.id(w).to_owned(),
            });
        }
    }
    let rest = support.difference(open_part)?;
    // support ∖ U is closed in the support, hence order-convex.
    let rest = LocallyClosedSet::try_from(rest)?;
    Ok((
        ElementaryTerm::new(open_part.clone(), t.klass.clone()),
        ElementaryTerm::new(rest, t.klass.clone()),
    ))
}

/// Bilinear expansion with intersected supports and multiplied classes.
pub fn tensor(v: &VirtualSheaf, w: &VirtualSheaf) -> Result<VirtualSheaf> {
    v.check(w)?;
    let mut out = VirtualSheaf::zero(&v.complex, &v.ring);
    for (a, s) in &v.terms {
        for (b, t) in &w.terms {
            let support = s.support.intersect(&t.support)?;
            let klass = s.klass.mul(&t.klass)?;
            out.terms.push((a * b, ElementaryTerm::new(support, klass)));
        }
    }
    Ok(out)
}

/// `realize(D(chi(v)))`.
pub fn dual_sheaf(v: &VirtualSheaf) -> VirtualSheaf {
    realize(&chi(v).verdier_dual())
}
