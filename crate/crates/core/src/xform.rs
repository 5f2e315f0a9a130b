//! Integral transforms with kernels on constructible functions.
//!
//! `Φ_K φ = q_{Y!}(K · q_X^* φ)`, i.e.
//! `(Φ_K φ)(τ) = Σ_σ (−1)^{dim σ} K(σ×τ) φ(σ)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cellspace::{
    ensure_same, same_complex, CellComplex, CellIdx, CellularMap, LocallyClosedSet, ProductComplex,
};
use crate::cfun::{pushforward_proj, CFunction};
use crate::error::{Error, Result};
use crate::kring::{RingModel, RingValue};

/// A constructible function on `X × Y` used as a transform kernel.
#[derive(Debug, Clone)]
pub struct Kernel {
    product: Arc<ProductComplex>,
    function: CFunction,
}

impl Kernel {
    pub fn new(product: &Arc<ProductComplex>, function: CFunction) -> Result<Self> {
        if !same_complex(product.complex(), function.complex()) {
            return Err(Error::FactorMismatch(
                "kernel function does not live on the product",
            ));
        }
        Ok(Self {
            product: Arc::clone(product),
            function,
        })
    }

    /// Kernel with value `f(σ, τ)` at `σ×τ`.
    pub fn from_fn(
        left: &Arc<CellComplex>,
        right: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        mut f: impl FnMut(CellIdx, CellIdx) -> RingValue,
    ) -> Self {
        let product = Arc::new(ProductComplex::new(left, right));
        let function = CFunction::from_fn(product.complex(), ring, |c| {
            let (s, t) = product.split(c);
            f(s, t)
        });
        Self { product, function }
    }

    pub fn product(&self) -> &Arc<ProductComplex> {
        &self.product
    }

    pub fn function(&self) -> &CFunction {
        &self.function
    }

    pub fn left(&self) -> &Arc<CellComplex> {
        self.product.left()
    }

    pub fn right(&self) -> &Arc<CellComplex> {
        self.product.right()
    }

    pub fn ring(&self) -> &Arc<RingModel> {
        self.function.ring()
    }

    pub fn at(&self, sigma: CellIdx, tau: CellIdx) -> &RingValue {
        self.function.at(self.product.pair(sigma, tau))
    }

    /// Value at `(left id, right id)`.
    pub fn value(&self, left_id: &str, right_id: &str) -> Result<&RingValue> {
        let s = self.left().index_of(left_id)?;
        let t = self.right().index_of(right_id)?;
        Ok(self.at(s, t))
    }

    pub fn add(&self, other: &Kernel) -> Result<Kernel> {
        ensure_same(self.product.complex(), other.product.complex())?;
        Kernel::new(&self.product, self.function.add(&other.function)?)
    }

    /// `y · K`.
    pub fn scale(&self, y: &RingValue) -> Result<Kernel> {
        Kernel::new(&self.product, self.function.scale(y)?)
    }
}

/// `Φ_K φ`, a function on the right factor of `K`.
pub fn transform(kernel: &Kernel, phi: &CFunction) -> Result<CFunction> {
    if !same_complex(kernel.left(), phi.complex()) {
        return Err(Error::FactorMismatch(
            "function does not live on the kernel's first factor",
        ));
    }
    let pulled = phi.pullback(&kernel.product.left_projection())?;
    pushforward_proj(&kernel.product, &kernel.function.mul(&pulled)?)
}

/// `(K2 ∘ K1)(σ×ρ) = Σ_τ (−1)^{dim τ} K1(σ×τ) K2(τ×ρ)`.
pub fn compose_kernels(k1: &Kernel, k2: &Kernel) -> Result<Kernel> {
    if !same_complex(k1.right(), k2.left()) {
        return Err(Error::FactorMismatch("middle factors differ"));
    }
    if k1.ring() != k2.ring() {
        return Err(Error::ModelMismatch {
            left: k1.ring().to_string(),
            right: k2.ring().to_string(),
        });
    }
    let middle = k1.right();
    let ring = k1.ring();
    let arity = ring.arity();
    let mut err = None;
    let out = Kernel::from_fn(k1.left(), k2.right(), ring, |s, r| {
        let mut acc = vec![0i64; arity];
        for t in middle.cells() {
            let a = k1.at(s, t);
            if a.is_zero() {
                continue;
            }
            match a.mul(k2.at(t, r)) {
                Ok(p) => {
                    let sign = middle.sign(t);
                    acc.iter_mut()
                        .zip(p.coords())
                        .for_each(|(x, c)| *x += sign * c);
                }
                Err(e) => err = Some(e),
            }
        }
        RingValue::new(ring, acc).expect("arity matches ring")
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Identity kernel on `X × X`: `(−1)^{dim σ}` times the unit on each `σ×σ`,
/// zero elsewhere. On a 0-dimensional complex this is the unit class on the
/// diagonal pairs.
pub fn diagonal_kernel(complex: &Arc<CellComplex>, ring: &Arc<RingModel>) -> Kernel {
    let one = RingValue::one(ring);
    let zero = RingValue::zero(ring);
    Kernel::from_fn(complex, complex, ring, |s, t| {
        if s == t {
            one.scale(complex.sign(s))
        } else {
            zero.clone()
        }
    })
}

/// Operator matrix of a linear map on constructible functions, in the open-cell
/// bases: `entries[row][col]` is the value at target cell `row` of the image of
/// `I_{{col}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub entries: Vec<Vec<RingValue>>,
}

impl OperatorMatrix {
    pub fn of(
        source: &Arc<CellComplex>,
        target: &Arc<CellComplex>,
        ring: &Arc<RingModel>,
        op: impl Fn(&CFunction) -> Result<CFunction>,
    ) -> Result<Self> {
        let one = RingValue::one(ring);
        let mut entries = vec![Vec::with_capacity(source.len()); target.len()];
        for col in source.cells() {
            let image = op(&CFunction::indicator(
                &LocallyClosedSet::single(source, col),
                &one,
            ))?;
            ensure_same(image.complex(), target)?;
            for (row, v) in image.values().iter().enumerate() {
                entries[row].push(v.clone());
            }
        }
        Ok(Self {
            rows: target.cells().map(|c| target.id(c).to_owned()).collect(),
            cols: source.cells().map(|c| source.id(c).to_owned()).collect(),
            entries,
        })
    }

    /// Matrix of `Φ_K`.
    pub fn of_kernel(kernel: &Kernel) -> Result<Self> {
        Self::of(kernel.left(), kernel.right(), kernel.ring(), |phi| {
            transform(kernel, phi)
        })
    }
}

/// A finite incidence geometry: `points` labelled `p0..`, lines as point sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGeometry {
    points: usize,
    lines: Vec<BTreeSet<usize>>,
}

impl IncidenceGeometry {
    pub fn new(points: usize, lines: Vec<Vec<usize>>) -> Result<Self> {
        if points == 0 {
            return Err(Error::MalformedGeometry("no points".into()));
        }
        if lines.is_empty() {
            return Err(Error::MalformedGeometry("no lines".into()));
        }
        let mut out = Vec::with_capacity(lines.len());
        for (i, line) in lines.into_iter().enumerate() {
            if line.is_empty() {
                return Err(Error::MalformedGeometry(format!("line {i} is empty")));
            }
            if let Some(&p) = line.iter().find(|&&p| p >= points) {
                return Err(Error::MalformedGeometry(format!(
                    "line {i} names point {p} of {points}"
                )));
            }
            let set: BTreeSet<usize> = line.iter().copied().collect();
            if set.len() != line.len() {
                return Err(Error::MalformedGeometry(format!(
                    "line {i} repeats a point"
                )));
            }
            if out.contains(&set) {
                return Err(Error::MalformedGeometry(format!("line {i} is a duplicate")));
            }
            out.push(set);
        }
        Ok(Self { points, lines: out })
    }

    /// The Fano plane PG(2, 2).
    pub fn fano() -> Self {
        Self::new(
            7,
            vec![
                vec![0, 1, 2],
                vec![0, 3, 4],
                vec![0, 5, 6],
                vec![1, 3, 5],
                vec![1, 4, 6],
                vec![2, 3, 6],
                vec![2, 4, 5],
            ],
        )
        .expect("Fano plane is well formed")
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn lines(&self) -> &[BTreeSet<usize>] {
        &self.lines
    }

    pub fn incident(&self, point: usize, line: usize) -> bool {
        self.lines[line].contains(&point)
    }

    pub fn point_complex(&self) -> CellComplex {
        CellComplex::discrete((0..self.points).map(|p| format!("p{p}"))).expect("distinct ids")
    }

    pub fn line_complex(&self) -> CellComplex {
        CellComplex::discrete((0..self.lines.len()).map(|l| format!("l{l}"))).expect("distinct ids")
    }
}

/// Unit class on the non-incident pairs of `points × lines`.
pub fn incidence_kernel(
    geometry: &IncidenceGeometry,
    points: &Arc<CellComplex>,
    lines: &Arc<CellComplex>,
    ring: &Arc<RingModel>,
) -> Result<Kernel> {
    if points.len() != geometry.points() || lines.len() != geometry.lines().len() {
        return Err(Error::MalformedGeometry(
            "complexes do not match the geometry".into(),
        ));
    }
    let (one, zero) = (RingValue::one(ring), RingValue::zero(ring));
    Ok(Kernel::from_fn(points, lines, ring, |p, l| {
        if geometry.incident(p, l) {
            zero.clone()
        } else {
            one.clone()
        }
    }))
}

/// Non-incidence kernels in both directions: `K` on points × lines and `K'`
/// on lines × points.
#[derive(Debug, Clone)]
pub struct RadonPair {
    pub forward: Kernel,
    pub backward: Kernel,
}

impl RadonPair {
    /// Matrix of `Φ_{K'} ∘ Φ_K` on functions over the points.
    pub fn composite_matrix(&self) -> Result<OperatorMatrix> {
        OperatorMatrix::of(
            self.forward.left(),
            self.backward.right(),
            self.forward.ring(),
            |phi| transform(&self.backward, &transform(&self.forward, phi)?),
        )
    }

    pub fn composite_kernel(&self) -> Result<Kernel> {
        compose_kernels(&self.forward, &self.backward)
    }
}

pub fn radon_pair(geometry: &IncidenceGeometry, ring: &Arc<RingModel>) -> Result<RadonPair> {
    let points = Arc::new(geometry.point_complex());
    let lines = Arc::new(geometry.line_complex());
    let forward = incidence_kernel(geometry, &points, &lines, ring)?;
    let (one, zero) = (RingValue::one(ring), RingValue::zero(ring));
    let backward = Kernel::from_fn(&lines, &points, ring, |l, p| {
        if geometry.incident(p, l) {
            zero.clone()
        } else {
            one.clone()
        }
    });
    Ok(RadonPair { forward, backward })
}

/// Pointwise Fourier–Mukai action on values.
pub fn fm_transform(phi: &CFunction) -> Result<CFunction> {
    phi.map_values(RingValue::fm)
}

/// Inverse of [`fm_transform`].
pub fn fm_inverse_transform(phi: &CFunction) -> Result<CFunction> {
    phi.map_values(RingValue::fm_inverse)
}

/// Pointwise pullback along the group inversion of the base curve.
pub fn antipode_transform(phi: &CFunction) -> Result<CFunction> {
    phi.map_values(RingValue::antipode)
}

/// `fm_transform` commutes with pullback along any cellular map.
pub fn fm_pullback(f: &CellularMap, phi: &CFunction) -> Result<CFunction> {
    fm_transform(&phi.pullback(f)?)
}
