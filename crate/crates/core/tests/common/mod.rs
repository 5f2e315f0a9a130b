//! Random instance generators and brute-force oracles shared by the
//! integration suites. The oracles only use cell ids, dims and cover lists,
//! never the library's closure tables or algebra.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use relcf_core::cellspace::ComplexSpec;
use relcf_core::ksheaf::ElementaryTerm;
use relcf_core::{
    AbelianGroupDescriptor, CFunction, CellComplex, CellSet, LocallyClosedSet, RingModel,
    RingValue, VirtualSheaf,
};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn p1() -> Arc<RingModel> {
    Arc::new(RingModel::projective_line())
}

pub fn ring_zoo() -> Vec<Arc<RingModel>> {
    vec![
        Arc::new(RingModel::Integers),
        p1(),
        Arc::new(RingModel::TruncatedCurve(
            AbelianGroupDescriptor::new(1, vec![2]).unwrap(),
        )),
        Arc::new(RingModel::TruncatedCurve(
            AbelianGroupDescriptor::new(2, vec![3, 4]).unwrap(),
        )),
        Arc::new(RingModel::Product(vec![
            RingModel::Integers,
            RingModel::projective_line(),
        ])),
    ]
}

pub fn random_value(rng: &mut StdRng, ring: &Arc<RingModel>, span: i64) -> RingValue {
    let coords = (0..ring.arity())
        .map(|_| rng.gen_range(-span..=span))
        .collect();
    RingValue::new(ring, coords).unwrap()
}

/// Value that is zero about a third of the time.
pub fn sparse_value(rng: &mut StdRng, ring: &Arc<RingModel>) -> RingValue {
    if rng.gen_bool(0.3) {
        RingValue::zero(ring)
    } else {
        random_value(rng, ring, 6)
    }
}

fn simplex_id(vs: &[usize]) -> String {
    let parts: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
    format!("s{}", parts.join("_"))
}

/// Random simplicial complex given by its face poset: the down-closure of a
/// few random simplices on `vertices` vertices, capped at `max_cells` cells.
pub fn random_simplicial_spec(
    rng: &mut StdRng,
    vertices: usize,
    max_facet: usize,
    max_cells: usize,
) -> ComplexSpec {
    let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
    let all: Vec<usize> = (0..vertices).collect();
    let facets = rng.gen_range(1..=2 * vertices + 2);
    for _ in 0..facets {
        let size = rng.gen_range(1..=max_facet.min(vertices));
        let mut vs: Vec<usize> = all.choose_multiple(rng, size).copied().collect();
        vs.sort_unstable();
        let mut closure = BTreeSet::new();
        for mask in 1u32..(1 << vs.len()) {
            let face: Vec<usize> = vs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect();
            if !simplices.contains(&face) {
                closure.insert(face);
            }
        }
        if simplices.len() + closure.len() > max_cells {
            continue;
        }
        simplices.extend(closure);
    }
    if simplices.is_empty() {
        simplices.insert(vec![0]);
    }
    let cells = simplices
        .iter()
        .map(|s| relcf_core::cellspace::CellSpec {
            id: simplex_id(s),
            dim: s.len() - 1,
        })
        .collect();
    let mut covers = Vec::new();
    for s in &simplices {
        if s.len() < 2 {
            continue;
        }
        for skip in 0..s.len() {
            let face: Vec<usize> = s
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            covers.push((simplex_id(&face), simplex_id(s)));
        }
    }
    ComplexSpec { cells, covers }
}

pub fn random_complex(rng: &mut StdRng, max_cells: usize) -> Arc<CellComplex> {
    let vertices = rng.gen_range(1..=7);
    let max_facet = rng.gen_range(1..=4);
    let spec = random_simplicial_spec(rng, vertices, max_facet, max_cells);
    Arc::new(CellComplex::from_spec(&spec).expect("simplicial complexes are regular"))
}

pub fn random_function(
    rng: &mut StdRng,
    complex: &Arc<CellComplex>,
    ring: &Arc<RingModel>,
) -> CFunction {
    CFunction::from_fn(complex, ring, |_| sparse_value(rng, ring))
}

pub fn random_subset(rng: &mut StdRng, complex: &Arc<CellComplex>, p: f64) -> CellSet {
    CellSet::new(complex, complex.cells().filter(|_| rng.gen_bool(p)))
}

/// Closed ∩ open, hence locally closed.
pub fn random_locally_closed(rng: &mut StdRng, complex: &Arc<CellComplex>) -> LocallyClosedSet {
    let closed = random_subset(rng, complex, 0.4).down_closure();
    let open = random_subset(rng, complex, 0.4).up_closure();
    LocallyClosedSet::try_from(closed.intersection(&open).unwrap())
        .expect("closed ∩ open is convex")
}

pub fn random_vsheaf(
    rng: &mut StdRng,
    complex: &Arc<CellComplex>,
    ring: &Arc<RingModel>,
    terms: usize,
) -> VirtualSheaf {
    let terms: Vec<_> = (0..terms)
        .map(|_| {
            let coeff = rng.gen_range(-3..=3);
            (
                coeff,
                ElementaryTerm::new(
                    random_locally_closed(rng, complex),
                    random_value(rng, ring, 4),
                ),
            )
        })
        .collect();
    VirtualSheaf::new(complex, ring, terms).unwrap()
}

/// Face order recomputed from the cover lists of a spec, by depth-first search.
pub struct Poset {
    pub ids: Vec<String>,
    pub dims: Vec<usize>,
    /// `leq[a][b]` iff `a ≤ b`.
    pub leq: Vec<Vec<bool>>,
}

impl Poset {
    pub fn of(complex: &CellComplex) -> Self {
        let spec = complex.to_spec();
        let ids: Vec<String> = spec.cells.iter().map(|c| c.id.clone()).collect();
        let dims: Vec<usize> = spec.cells.iter().map(|c| c.dim).collect();
        let pos: BTreeMap<&str, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let n = ids.len();
        let mut up = vec![Vec::new(); n];
        for (a, b) in &spec.covers {
            up[pos[a.as_str()]].push(pos[b.as_str()]);
        }
        let mut leq = vec![vec![false; n]; n];
        for start in 0..n {
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                if !leq[start][x] {
                    leq[start][x] = true;
                    stack.extend(up[x].iter().copied());
                }
            }
        }
        Self { ids, dims, leq }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn sign(&self, c: usize) -> i64 {
        if self.dims[c] % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Möbius function of the face poset from its recursive definition.
    pub fn mobius(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&c| self.dims[c]);
        let mut mu = vec![vec![0i64; n]; n];
        for a in 0..n {
            for &b in &order {
                if !self.leq[a][b] {
                    continue;
                }
                if a == b {
                    mu[a][b] = 1;
                } else {
                    let s: i64 = (0..n)
                        .filter(|&c| self.leq[a][c] && self.leq[c][b] && c != b)
                        .map(|c| mu[a][c])
                        .sum();
                    mu[a][b] = -s;
                }
            }
        }
        mu
    }
}

/// Coordinatewise sum of scaled coordinate vectors.
pub fn coord_sum(arity: usize, terms: impl IntoIterator<Item = (i64, Vec<i64>)>) -> Vec<i64> {
    let mut acc = vec![0i64; arity];
    for (s, c) in terms {
        for (a, x) in acc.iter_mut().zip(c) {
            *a += s * x;
        }
    }
    acc
}

/// Reference product in a truncated-curve or integer ring, by expanding both
/// factors in the basis `1, e_1, ..., e_k` with `e_i e_j = 0` and reducing
/// torsion at the end.
pub fn reference_mul(ring: &RingModel, a: &[i64], b: &[i64]) -> Vec<i64> {
    match ring {
        RingModel::Integers => vec![a[0] * b[0]],
        RingModel::TruncatedCurve(m) => {
            let k = a.len();
            let basis = |i: usize| {
                let mut v = vec![0i64; k];
                v[i] = 1;
                v
            };
            let mut acc = vec![0i64; k];
            for i in 0..k {
                for j in 0..k {
                    let coeff = a[i] * b[j];
                    let prod = match (i, j) {
                        (0, 0) => basis(0),
                        (0, j) => basis(j),
                        (i, 0) => basis(i),
                        _ => vec![0; k],
                    };
                    for (x, p) in acc.iter_mut().zip(prod) {
                        *x += coeff * p;
                    }
                }
            }
            for (x, n) in acc[1 + m.free_rank..].iter_mut().zip(&m.torsion_orders) {
                *x = x.rem_euclid(*n);
            }
            acc
        }
        RingModel::Product(factors) => {
            let mut out = Vec::new();
            let mut offset = 0;
            for f in factors {
                let k = f.arity();
                out.extend(reference_mul(
                    f,
                    &a[offset..offset + k],
                    &b[offset..offset + k],
                ));
                offset += k;
            }
            out
        }
    }
}

/// Position of `(left, right)` in a product built by `ProductComplex::new`.
pub fn product_id(left: &str, right: &str) -> String {
    format!("({left},{right})")
}
