//! Finite regular cell complexes encoded as graded face posets.
//!
//! No geometric realization is stored. A complex is valid when covers raise
//! dimension by exactly one, every closed cell has compact-support Euler
//! characteristic 1, and every nontrivial interval `[σ, ρ]` has signed sum 0
//! (the Eulerian property every regular CW complex enjoys).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a cell inside its complex.
pub type CellIdx = usize;

/// Raw, unvalidated complex as it appears in documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub cells: Vec<CellSpec>,
    #[serde(default)]
    pub covers: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub id: String,
    pub dim: usize,
}

#[derive(Clone)]
pub struct CellComplex {
    ids: Vec<String>,
    dims: Vec<usize>,
    index: HashMap<String, CellIdx>,
    faces: Vec<Vec<CellIdx>>,
    cofaces: Vec<Vec<CellIdx>>,
    below: Vec<Vec<CellIdx>>,
    above: Vec<Vec<CellIdx>>,
}

impl fmt::Debug for CellComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CellComplex")
            .field("ids", &self.ids)
            .field("dims", &self.dims)
            .field("faces", &self.faces)
            .finish()
    }
}

impl PartialEq for CellComplex {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.dims == other.dims && self.faces == other.faces
    }
}

impl Eq for CellComplex {}

pub(crate) fn same_complex(a: &Arc<CellComplex>, b: &Arc<CellComplex>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn ensure_same(a: &Arc<CellComplex>, b: &Arc<CellComplex>) -> Result<()> {
    if same_complex(a, b) {
        Ok(())
    } else {
        Err(Error::ComplexMismatch)
    }
}

fn sign(dim: usize) -> i64 {
    if dim.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl CellComplex {
    /// Builds and validates a complex from cells and covering pairs.
    pub fn new<I, S>(cells: Vec<(String, usize)>, covers: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut index = HashMap::with_capacity(cells.len());
        for (i, (id, _)) in cells.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let (ids, dims): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
        let mut faces = vec![Vec::new(); ids.len()];
        for (lo, hi) in covers {
            let lookup = |s: &str| {
                index
                    .get(s)
                    .copied()
                    .ok_or_else(|| Error::UnknownCell(s.to_owned()))
            };
            let (a, b) = (lookup(lo.as_ref())?, lookup(hi.as_ref())?);
            if dims[b] != dims[a] + 1 {
                return Err(Error::NonGradedCover {
                    lower: ids[a].clone(),
                    upper: ids[b].clone(),
                    lower_dim: dims[a],
                    upper_dim: dims[b],
                });
            }
            faces[b].push(a);
        }
        let complex = Self::assemble(ids, dims, index, faces);
        complex.check_regular()?;
        Ok(complex)
    }

    pub fn from_spec(spec: &ComplexSpec) -> Result<Self> {
        Self::new(
            spec.cells.iter().map(|c| (c.id.clone(), c.dim)).collect(),
            spec.covers.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )
    }

    pub fn to_spec(&self) -> ComplexSpec {
        ComplexSpec {
            cells: self
                .ids
                .iter()
                .zip(&self.dims)
                .map(|(id, &dim)| CellSpec {
                    id: id.clone(),
                    dim,
                })
                .collect(),
            covers: self
                .cells()
                .flat_map(|b| {
                    self.faces[b]
                        .iter()
                        .map(move |&a| (self.ids[a].clone(), self.ids[b].clone()))
                })
                .collect(),
        }
    }

    /// The one-cell complex.
    pub fn point() -> Self {
        Self::new(vec![("pt".to_owned(), 0)], Vec::<(&str, &str)>::new()).expect("point is valid")
    }

    /// A 0-dimensional complex with the given cell ids.
    pub fn discrete<I: IntoIterator<Item = String>>(ids: I) -> Result<Self> {
        Self::new(
            ids.into_iter().map(|id| (id, 0)).collect(),
            Vec::<(&str, &str)>::new(),
        )
    }

    /// Closed interval `v0 < e > v1`.
    pub fn interval() -> Self {
        Self::new(
            vec![("v0".into(), 0), ("v1".into(), 0), ("e".into(), 1)],
            [("v0", "e"), ("v1", "e")],
        )
        .expect("interval is valid")
    }

    // Fills in transitive closures; `faces` lists covers per cell.
    fn assemble(
        ids: Vec<String>,
        dims: Vec<usize>,
        index: HashMap<String, CellIdx>,
        mut faces: Vec<Vec<CellIdx>>,
    ) -> Self {
        let n = ids.len();
        for f in &mut faces {
            f.sort_unstable();
            f.dedup();
        }
        let mut cofaces = vec![Vec::new(); n];
        for (b, fs) in faces.iter().enumerate() {
            for &a in fs {
                cofaces[a].push(b);
            }
        }
        let mut order: Vec<CellIdx> = (0..n).collect();
        order.sort_by_key(|&i| dims[i]);
        let mut below: Vec<Vec<CellIdx>> = vec![Vec::new(); n];
        let mut mark = vec![usize::MAX; n];
        for &c in &order {
            let mut set = vec![c];
            mark[c] = c;
            for &f in &faces[c] {
                for &t in &below[f] {
                    if mark[t] != c {
                        mark[t] = c;
                        set.push(t);
                    }
                }
            }
            set.sort_unstable();
            below[c] = set;
        }
        let mut above = vec![Vec::new(); n];
        for (c, bs) in below.iter().enumerate() {
            for &b in bs {
                above[b].push(c);
            }
        }
        Self {
            ids,
            dims,
            index,
            faces,
            cofaces,
            below,
            above,
        }
    }

    fn check_regular(&self) -> Result<()> {
        for c in self.cells() {
            let sum: i64 = self.below[c].iter().map(|&t| sign(self.dims[t])).sum();
            if sum != 1 {
                return Err(Error::RegularityFailure {
                    cell: self.ids[c].clone(),
                    sum,
                });
            }
        }
        // Eulerian intervals: for each top ρ, accumulate Σ_{σ≤τ≤ρ} (−1)^τ for every σ ≤ ρ.
        let mut acc = vec![0i64; self.len()];
        for rho in self.cells() {
            for &tau in &self.below[rho] {
                for &s in &self.below[tau] {
                    acc[s] += sign(self.dims[tau]);
                }
            }
            for &s in &self.below[rho] {
                let sum = std::mem::take(&mut acc[s]);
                if s != rho && sum != 0 {
                    return Err(Error::NonEulerianInterval {
                        lower: self.ids[s].clone(),
                        upper: self.ids[rho].clone(),
                        sum,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn cells(&self) -> std::ops::Range<CellIdx> {
        0..self.ids.len()
    }

    pub fn id(&self, cell: CellIdx) -> &str {
        &self.ids[cell]
    }

    pub fn dim(&self, cell: CellIdx) -> usize {
        self.dims[cell]
    }

    /// `(−1)^{dim σ}`.
    pub fn sign(&self, cell: CellIdx) -> i64 {
        sign(self.dims[cell])
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.dims.iter().copied().max()
    }

    pub fn index_of(&self, id: &str) -> Result<CellIdx> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownCell(id.to_owned()))
    }

    /// Cells covered by `cell`.
    pub fn faces(&self, cell: CellIdx) -> &[CellIdx] {
        &self.faces[cell]
    }

    /// Cells covering `cell`.
    pub fn cofaces(&self, cell: CellIdx) -> &[CellIdx] {
        &self.cofaces[cell]
    }

    /// All τ ≤ σ, sorted, including σ.
    pub fn below(&self, cell: CellIdx) -> &[CellIdx] {
        &self.below[cell]
    }

    /// All τ ≥ σ, sorted, including σ.
    pub fn above(&self, cell: CellIdx) -> &[CellIdx] {
        &self.above[cell]
    }

    pub fn leq(&self, a: CellIdx, b: CellIdx) -> bool {
        self.below[b].binary_search(&a).is_ok()
    }

    /// Σ over all cells of (−1)^dim.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells().map(|c| self.sign(c)).sum()
    }
}

/// Confirms every complex invariant on raw input, naming the witness on failure.
pub fn validate(spec: &ComplexSpec) -> Result<()> {
    CellComplex::from_spec(spec).map(|_| ())
}

/// A set of cells of one complex.
#[derive(Clone, PartialEq, Eq)]
pub struct CellSet {
    complex: Arc<CellComplex>,
    members: BTreeSet<CellIdx>,
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ids()).finish()
    }
}

impl CellSet {
    pub fn new(complex: &Arc<CellComplex>, members: impl IntoIterator<Item = CellIdx>) -> Self {
        let members: BTreeSet<_> = members.into_iter().collect();
        assert!(
            members.iter().all(|&m| m < complex.len()),
            "cell index out of range"
        );
        Self {
            complex: Arc::clone(complex),
            members,
        }
    }

    pub fn from_ids<S: AsRef<str>>(
        complex: &Arc<CellComplex>,
        ids: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let members = ids
            .into_iter()
            .map(|id| complex.index_of(id.as_ref()))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(Self {
            complex: Arc::clone(complex),
            members,
        })
    }

    pub fn empty(complex: &Arc<CellComplex>) -> Self {
        Self::new(complex, [])
    }

    pub fn all(complex: &Arc<CellComplex>) -> Self {
        Self::new(complex, complex.cells())
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn contains(&self, cell: CellIdx) -> bool {
        self.members.contains(&cell)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = CellIdx> + '_ {
        self.members.iter().copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.members.iter().map(|&c| self.complex.id(c))
    }

    pub fn intersection(&self, other: &CellSet) -> Result<CellSet> {
        ensure_same(&self.complex, &other.complex)?;
        Ok(Self::new(
            &self.complex,
            self.members.intersection(&other.members).copied(),
        ))
    }

    pub fn union(&self, other: &CellSet) -> Result<CellSet> {
        ensure_same(&self.complex, &other.complex)?;
        Ok(Self::new(
            &self.complex,
            self.members.union(&other.members).copied(),
        ))
    }

    pub fn difference(&self, other: &CellSet) -> Result<CellSet> {
        ensure_same(&self.complex, &other.complex)?;
        Ok(Self::new(
            &self.complex,
            self.members.difference(&other.members).copied(),
        ))
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        same_complex(&self.complex, &other.complex) && self.members.is_subset(&other.members)
    }

    /// Down-set generated by the members.
    pub fn down_closure(&self) -> CellSet {
        Self::new(
            &self.complex,
            self.members
                .iter()
                .flat_map(|&c| self.complex.below(c).iter().copied()),
        )
    }

    /// Up-set generated by the members.
    pub fn up_closure(&self) -> CellSet {
        Self::new(
            &self.complex,
            self.members
                .iter()
                .flat_map(|&c| self.complex.above(c).iter().copied()),
        )
    }

    /// First cell that breaks order-convexity, if any.
    pub fn convexity_witness(&self) -> Option<CellIdx> {
        // A is convex iff cl(A) ∩ up(A) ⊆ A.
        let up = self.up_closure();
        self.down_closure()
            .members
            .intersection(&up.members)
            .find(|c| !self.members.contains(c))
            .copied()
    }

    pub fn is_locally_closed(&self) -> bool {
        self.convexity_witness().is_none()
    }

    pub fn is_up_closed(&self) -> bool {
        self.members.iter().all(|&c| {
            self.complex
                .cofaces(c)
                .iter()
                .all(|t| self.members.contains(t))
        })
    }

    pub fn is_down_closed(&self) -> bool {
        self.members.iter().all(|&c| {
            self.complex
                .faces(c)
                .iter()
                .all(|t| self.members.contains(t))
        })
    }

    /// Σ_{σ∈A} (−1)^{dim σ}.
    pub fn euler_cs(&self) -> i64 {
        self.members.iter().map(|&c| self.complex.sign(c)).sum()
    }
}

/// An order-convex cell set: the combinatorial form of a locally closed subset.
#[derive(Clone, PartialEq, Eq)]
pub struct LocallyClosedSet(CellSet);

impl fmt::Debug for LocallyClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<CellSet> for LocallyClosedSet {
    type Error = Error;

    fn try_from(set: CellSet) -> Result<Self> {
        match set.convexity_witness() {
            None => Ok(Self(set)),
            Some(w) => Err(Error::NotLocallyClosed {
                witness: set.complex.id(w).to_owned(),
            }),
        }
    }
}

impl std::ops::Deref for LocallyClosedSet {
    type Target = CellSet;

    fn deref(&self) -> &CellSet {
        &self.0
    }
}

impl LocallyClosedSet {
    pub fn from_ids<S: AsRef<str>>(
        complex: &Arc<CellComplex>,
        ids: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        CellSet::from_ids(complex, ids)?.try_into()
    }

    pub fn single(complex: &Arc<CellComplex>, cell: CellIdx) -> Self {
        Self(CellSet::new(complex, [cell]))
    }

    pub fn all(complex: &Arc<CellComplex>) -> Self {
        Self(CellSet::all(complex))
    }

    pub fn empty(complex: &Arc<CellComplex>) -> Self {
        Self(CellSet::empty(complex))
    }

    pub fn as_cell_set(&self) -> &CellSet {
        &self.0
    }

    pub fn into_cell_set(self) -> CellSet {
        self.0
    }

    /// Intersections of order-convex sets stay order-convex.
    pub fn intersect(&self, other: &LocallyClosedSet) -> Result<LocallyClosedSet> {
        Ok(Self(self.0.intersection(&other.0)?))
    }
}

/// Up-set `{τ ≥ σ}`.
pub fn open_star(complex: &Arc<CellComplex>, id: &str) -> Result<LocallyClosedSet> {
    let cell = complex.index_of(id)?;
    Ok(LocallyClosedSet(CellSet::new(
        complex,
        complex.above(cell).iter().copied(),
    )))
}

/// Down-set generated by `set`.
pub fn closure(set: &CellSet) -> LocallyClosedSet {
    LocallyClosedSet(set.down_closure())
}

pub fn euler_cs(set: &CellSet) -> i64 {
    set.euler_cs()
}

/// A monotone, dimension-nonincreasing map between face posets.
#[derive(Debug, Clone)]
pub struct CellularMap {
    source: Arc<CellComplex>,
    target: Arc<CellComplex>,
    assignment: Vec<CellIdx>,
}

impl CellularMap {
    pub fn new(
        source: &Arc<CellComplex>,
        target: &Arc<CellComplex>,
        assignment: Vec<CellIdx>,
    ) -> Result<Self> {
        if assignment.len() != source.len() || assignment.iter().any(|&t| t >= target.len()) {
            return Err(Error::BadAssignment);
        }
        for c in source.cells() {
            if target.dim(assignment[c]) > source.dim(c) {
                return Err(Error::DimensionIncrease {
                    cell: source.id(c).to_owned(),
                });
            }
            for &f in source.faces(c) {
                if !target.leq(assignment[f], assignment[c]) {
                    return Err(Error::NotMonotone {
                        lower: source.id(f).to_owned(),
                        upper: source.id(c).to_owned(),
                    });
                }
            }
        }
        Ok(Self::unchecked(source, target, assignment))
    }

    pub fn from_ids<S: AsRef<str>>(
        source: &Arc<CellComplex>,
        target: &Arc<CellComplex>,
        pairs: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self> {
        let mut assignment = vec![usize::MAX; source.len()];
        for (s, t) in pairs {
            assignment[source.index_of(s.as_ref())?] = target.index_of(t.as_ref())?;
        }
        Self::new(source, target, assignment)
    }

    fn unchecked(
        source: &Arc<CellComplex>,
        target: &Arc<CellComplex>,
        assignment: Vec<CellIdx>,
    ) -> Self {
        Self {
            source: Arc::clone(source),
            target: Arc::clone(target),
            assignment,
        }
    }

    /// The identity map.
    pub fn identity(complex: &Arc<CellComplex>) -> Self {
        Self::unchecked(complex, complex, complex.cells().collect())
    }

    /// Inclusion of the point as the vertex `id` of `target`.
    pub fn point_inclusion(target: &Arc<CellComplex>, id: &str) -> Result<Self> {
        let cell = target.index_of(id)?;
        Self::new(&Arc::new(CellComplex::point()), target, vec![cell])
    }

    pub fn source(&self) -> &Arc<CellComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CellComplex> {
        &self.target
    }

    pub fn apply(&self, cell: CellIdx) -> CellIdx {
        self.assignment[cell]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CellularMap) -> Result<CellularMap> {
        ensure_same(&self.target, &other.source)?;
        Ok(Self::unchecked(
            &self.source,
            &other.target,
            self.assignment
                .iter()
                .map(|&c| other.assignment[c])
                .collect(),
        ))
    }
}

/// `X × Y` together with its factors and projections.
#[derive(Debug, Clone)]
pub struct ProductComplex {
    complex: Arc<CellComplex>,
    left: Arc<CellComplex>,
    right: Arc<CellComplex>,
}

impl ProductComplex {
    pub fn new(left: &Arc<CellComplex>, right: &Arc<CellComplex>) -> Self {
        let (nl, nr) = (left.len(), right.len());
        let n = nl * nr;
        let mut ids = Vec::with_capacity(n);
        let mut dims = Vec::with_capacity(n);
        let mut faces = Vec::with_capacity(n);
        let mut below = Vec::with_capacity(n);
        for a in left.cells() {
            for b in right.cells() {
                ids.push(format!("({},{})", left.id(a), right.id(b)));
                dims.push(left.dim(a) + right.dim(b));
                let mut fs: Vec<CellIdx> = left.faces(a).iter().map(|&f| f * nr + b).collect();
                fs.extend(right.faces(b).iter().map(|&f| a * nr + f));
                faces.push(fs);
                let mut bs: Vec<CellIdx> = left
                    .below(a)
                    .iter()
                    .flat_map(|&x| right.below(b).iter().map(move |&y| x * nr + y))
                    .collect();
                bs.sort_unstable();
                below.push(bs);
            }
        }
        let index = ids
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, id)| (id, i))
            .collect();
        let mut cofaces = vec![Vec::new(); n];
        for (c, fs) in faces.iter_mut().enumerate() {
            fs.sort_unstable();
            for &f in fs.iter() {
                cofaces[f].push(c);
            }
        }
        let mut above = vec![Vec::new(); n];
        for (c, bs) in below.iter().enumerate() {
            for &b in bs {
                above[b].push(c);
            }
        }
        let complex = CellComplex {
            ids,
            dims,
            index,
            faces,
            cofaces,
            below,
            above,
        };
        Self {
            complex: Arc::new(complex),
            left: Arc::clone(left),
            right: Arc::clone(right),
        }
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn left(&self) -> &Arc<CellComplex> {
        &self.left
    }

    pub fn right(&self) -> &Arc<CellComplex> {
        &self.right
    }

    pub fn pair(&self, a: CellIdx, b: CellIdx) -> CellIdx {
        a * self.right.len() + b
    }

    pub fn split(&self, cell: CellIdx) -> (CellIdx, CellIdx) {
        (cell / self.right.len(), cell % self.right.len())
    }

    pub fn left_projection(&self) -> CellularMap {
        CellularMap::unchecked(
            &self.complex,
            &self.left,
            self.complex.cells().map(|c| self.split(c).0).collect(),
        )
    }

    pub fn right_projection(&self) -> CellularMap {
        CellularMap::unchecked(
            &self.complex,
            &self.right,
            self.complex.cells().map(|c| self.split(c).1).collect(),
        )
    }
}

/// Product complex with its two projections.
pub fn product(
    left: &Arc<CellComplex>,
    right: &Arc<CellComplex>,
) -> (ProductComplex, CellularMap, CellularMap) {
    let prod = ProductComplex::new(left, right);
    let (p, q) = (prod.left_projection(), prod.right_projection());
    (prod, p, q)
}
