//! Finite abstract simplicial complexes, subcomplexes, open polyhedral sets
//! and barycentric subdivision towers.
//!
//! Vertices are plain integers and every simplex is stored as a strictly
//! ascending vertex tuple, so the global vertex order fixes all orientations.
//! Subcomplexes keep the vertex identifiers of their parent, which lets a
//! simplex be looked up by its tuple in any complex that contains it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("malformed simplex {0:?}: repeated vertex")]
    MalformedSimplex(Vec<Vertex>),
    #[error("empty vertex tuple")]
    EmptySimplex,
    #[error("simplex {0} is not in the complex")]
    NotFound(Simplex),
    #[error("subcomplex is not closed under faces: {missing} is a missing face of {of}")]
    MalformedSubcomplex { missing: Simplex, of: Simplex },
    #[error("subdivision level {requested} is not available (tower has {available})")]
    LevelOutOfRange { requested: usize, available: usize },
}

/// A simplex given by its strictly ascending vertex tuple.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(Vec<Vertex>);

impl Simplex {
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::EmptySimplex);
        }
        let original = vertices.clone();
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::MalformedSimplex(original));
        }
        Ok(Simplex(vertices))
    }

    /// Caller guarantees the tuple is nonempty and strictly ascending.
    pub(crate) fn from_sorted(vertices: Vec<Vertex>) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertex(v: Vertex) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// True when every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// Codimension-one faces with their incidence signs `(-1)^i`.
    pub fn boundary(&self) -> impl Iterator<Item = (i64, Simplex)> + '_ {
        let n = self.0.len();
        (0..if n > 1 { n } else { 0 }).map(move |i| {
            let mut face = Vec::with_capacity(n - 1);
            face.extend_from_slice(&self.0[..i]);
            face.extend_from_slice(&self.0[i + 1..]);
            (if i % 2 == 0 { 1 } else { -1 }, Simplex(face))
        })
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        let mut out = Vec::with_capacity((1usize << n) - 1);
        for mask in 1..(1u64 << n) {
            let face: Vec<Vertex> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect();
            out.push(Simplex(face));
        }
        out
    }

    /// Join with a vertex larger than every vertex of `self`.
    pub fn push_top(&self, v: Vertex) -> Simplex {
        debug_assert!(self.0.last().is_none_or(|&l| l < v));
        let mut vs = self.0.clone();
        vs.push(v);
        Simplex(vs)
    }

    /// Sorts an arbitrary tuple and reports the permutation sign, or `None`
    /// when the tuple repeats a vertex.
    pub fn sorted_with_sign(mut vs: Vec<Vertex>) -> Option<(i64, Simplex)> {
        let mut sign = 1i64;
        // insertion sort, counting transpositions
        for i in 1..vs.len() {
            let mut j = i;
            while j > 0 && vs[j - 1] > vs[j] {
                vs.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if vs.windows(2).any(|w| w[0] == w[1]) || vs.is_empty() {
            return None;
        }
        Some((sign, Simplex(vs)))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// Position of a simplex inside a complex: its dimension and its rank among
/// the simplices of that dimension in lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplexId {
    pub dim: usize,
    pub index: usize,
}

impl SimplexId {
    pub fn new(dim: usize, index: usize) -> Self {
        SimplexId { dim, index }
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    simplices: Vec<Vec<Simplex>>,
    offsets: Vec<usize>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("f_vector", &self.f_vector())
            .finish()
    }
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Face closure of the given vertex tuples.
    pub fn from_maximal<I, S>(maximal: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = S>,
        S: Into<Vec<Vertex>>,
    {
        let mut all = BTreeSet::new();
        for tuple in maximal {
            let s = Simplex::new(tuple.into())?;
            if all.contains(&s) {
                continue;
            }
            for face in s.faces() {
                all.insert(face);
            }
        }
        Ok(Self::from_closed_set(all))
    }

    /// Builds from a set already known to be face closed.
    pub(crate) fn from_closed_set(all: impl IntoIterator<Item = Simplex>) -> Self {
        let mut simplices: Vec<Vec<Simplex>> = Vec::new();
        for s in all {
            let d = s.dim();
            if simplices.len() <= d {
                simplices.resize_with(d + 1, Vec::new);
            }
            simplices[d].push(s);
        }
        for layer in &mut simplices {
            layer.sort_unstable();
            layer.dedup();
        }
        let mut offsets = Vec::with_capacity(simplices.len());
        let mut acc = 0;
        for layer in &simplices {
            offsets.push(acc);
            acc += layer.len();
        }
        SimplicialComplex { simplices, offsets }
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Dimension of the complex, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    /// Number of dimensions with simplices (`dim + 1`, zero when empty).
    pub fn dims(&self) -> usize {
        self.simplices.len()
    }

    pub fn count(&self, dim: usize) -> usize {
        self.simplices.get(dim).map_or(0, Vec::len)
    }

    pub fn total_count(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn simplices(&self, dim: usize) -> &[Simplex] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.simplices(0).iter().map(|s| s.0[0])
    }

    pub fn iter(&self) -> impl Iterator<Item = (SimplexId, &Simplex)> + '_ {
        self.simplices
            .iter()
            .enumerate()
            .flat_map(|(d, layer)| layer.iter().enumerate().map(move |(i, s)| (SimplexId::new(d, i), s)))
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id.dim][id.index]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.simplices.get(s.dim())?.binary_search(s).ok()
    }

    pub fn id_of(&self, s: &Simplex) -> Option<SimplexId> {
        self.index_of(s).map(|i| SimplexId::new(s.dim(), i))
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.contains(&Simplex::vertex(v))
    }

    /// Rank of a simplex in the global `(dim, lexicographic)` order.
    pub fn global_index(&self, id: SimplexId) -> usize {
        self.offsets[id.dim] + id.index
    }

    pub fn id_from_global(&self, g: usize) -> Option<SimplexId> {
        let dim = self.offsets.partition_point(|&o| o <= g).checked_sub(1)?;
        let index = g - self.offsets[dim];
        (index < self.count(dim)).then_some(SimplexId::new(dim, index))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Simplices of dimension at most `n`.
    pub fn skeleton(&self, n: usize) -> SimplicialComplex {
        let simplices: Vec<Vec<Simplex>> = self.simplices.iter().take(n + 1).cloned().collect();
        Self::from_closed_set(simplices.into_iter().flatten())
    }

    /// Simplices not a proper face of any other simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut covered = BTreeSet::new();
        for layer in self.simplices.iter().skip(1) {
            for s in layer {
                for (_, f) in s.boundary() {
                    covered.insert(f);
                }
            }
        }
        self.iter()
            .map(|(_, s)| s)
            .filter(|s| !covered.contains(*s))
            .cloned()
            .collect()
    }

    /// All simplices having `v` as a vertex.
    pub fn open_star(&self, v: Vertex) -> Result<Vec<SimplexId>, ComplexError> {
        if !self.contains_vertex(v) {
            return Err(ComplexError::NotFound(Simplex::vertex(v)));
        }
        Ok(self
            .iter()
            .filter(|(_, s)| s.contains_vertex(v))
            .map(|(id, _)| id)
            .collect())
    }

    /// Simplices having `s` as a face (including `s`).
    pub fn cofaces(&self, s: &Simplex) -> impl Iterator<Item = (SimplexId, &Simplex)> + '_ {
        let s = s.clone();
        self.simplices
            .iter()
            .enumerate()
            .skip(s.dim())
            .flat_map(|(d, layer)| layer.iter().enumerate().map(move |(i, t)| (SimplexId::new(d, i), t)))
            .filter(move |(_, t)| s.is_face_of(t))
    }

    /// Face closure of all simplices containing `s`.
    pub fn closed_star(self: &Arc<Self>, s: &Simplex) -> Result<Subcomplex, ComplexError> {
        if !self.contains(s) {
            return Err(ComplexError::NotFound(s.clone()));
        }
        let cofaces: Vec<Simplex> = self.cofaces(s).map(|(_, t)| t.clone()).collect();
        Ok(Subcomplex::closure_of(self.clone(), cofaces.iter()))
    }

    /// Disjoint union; the vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let shift = self.vertices().max().map_or(0, |m| m + 1);
        let shifted = other
            .iter()
            .map(|(_, s)| Simplex(s.0.iter().map(|v| v + shift).collect()));
        Self::from_closed_set(self.iter().map(|(_, s)| s.clone()).chain(shifted))
    }

    /// Connected components as sorted vertex sets.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let verts: Vec<Vertex> = self.vertices().collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in self.simplices(1) {
            let a = verts.binary_search(&e.0[0]).unwrap();
            let b = verts.binary_search(&e.0[1]).unwrap();
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
        for (i, &v) in verts.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }
}

/// A face-closed subset of a parent complex.
#[derive(Clone)]
pub struct Subcomplex {
    parent: Arc<SimplicialComplex>,
    members: Vec<Vec<usize>>,
}

impl fmt::Debug for Subcomplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.maximal_simplices()).finish()
    }
}

impl PartialEq for Subcomplex {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && (Arc::ptr_eq(&self.parent, &other.parent) || self.parent == other.parent)
    }
}

impl Eq for Subcomplex {}

impl Subcomplex {
    /// Checks face closure of the given simplices of `parent`.
    pub fn new(parent: Arc<SimplicialComplex>, ids: impl IntoIterator<Item = SimplexId>) -> Result<Self, ComplexError> {
        let sub = Self::from_ids_unchecked(parent, ids);
        for (_, s) in sub.iter() {
            for (_, f) in s.boundary() {
                if !sub.contains(&f) {
                    return Err(ComplexError::MalformedSubcomplex {
                        missing: f,
                        of: s.clone(),
                    });
                }
            }
        }
        Ok(sub)
    }

    pub(crate) fn from_ids_unchecked(parent: Arc<SimplicialComplex>, ids: impl IntoIterator<Item = SimplexId>) -> Self {
        let mut members: Vec<Vec<usize>> = Vec::new();
        for id in ids {
            if members.len() <= id.dim {
                members.resize_with(id.dim + 1, Vec::new);
            }
            members[id.dim].push(id.index);
        }
        for layer in &mut members {
            layer.sort_unstable();
            layer.dedup();
        }
        while members.last().is_some_and(Vec::is_empty) {
            members.pop();
        }
        Subcomplex { parent, members }
    }

    /// Face closure of the given simplices; simplices missing from the parent
    /// are ignored.
    pub fn closure_of<'a>(parent: Arc<SimplicialComplex>, simplices: impl IntoIterator<Item = &'a Simplex>) -> Self {
        let mut ids = BTreeSet::new();
        for s in simplices {
            if ids.contains(&parent.id_of(s).unwrap_or(SimplexId::new(usize::MAX, 0))) {
                continue;
            }
            for f in s.faces() {
                if let Some(id) = parent.id_of(&f) {
                    ids.insert(id);
                }
            }
        }
        Self::from_ids_unchecked(parent, ids)
    }

    pub fn empty(parent: Arc<SimplicialComplex>) -> Self {
        Subcomplex {
            parent,
            members: Vec::new(),
        }
    }

    pub fn full(parent: Arc<SimplicialComplex>) -> Self {
        let members = (0..parent.dims()).map(|d| (0..parent.count(d)).collect()).collect();
        Subcomplex { parent, members }
    }

    pub fn parent(&self) -> &Arc<SimplicialComplex> {
        &self.parent
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.members.len().checked_sub(1)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.members.get(dim).map_or(0, Vec::len)
    }

    pub fn total_count(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// Parent indices of the members of dimension `dim`, ascending.
    pub fn indices(&self, dim: usize) -> &[usize] {
        self.members.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn ids(&self) -> impl Iterator<Item = SimplexId> + '_ {
        self.members
            .iter()
            .enumerate()
            .flat_map(|(d, l)| l.iter().map(move |&i| SimplexId::new(d, i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (SimplexId, &Simplex)> + '_ {
        self.ids().map(|id| (id, self.parent.simplex(id)))
    }

    pub fn contains_id(&self, id: SimplexId) -> bool {
        self.members
            .get(id.dim)
            .is_some_and(|l| l.binary_search(&id.index).is_ok())
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.parent.id_of(s).is_some_and(|id| self.contains_id(id))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.indices(0).iter().map(|&i| self.parent.simplices(0)[i].0[0])
    }

    pub fn is_subset(&self, other: &Subcomplex) -> bool {
        self.members.iter().enumerate().all(|(d, l)| {
            let o = other.indices(d);
            l.iter().all(|i| o.binary_search(i).is_ok())
        })
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        Self::from_ids_unchecked(self.parent.clone(), self.ids().chain(other.ids()))
    }

    pub fn intersection(&self, other: &Subcomplex) -> Subcomplex {
        Self::from_ids_unchecked(self.parent.clone(), self.ids().filter(|id| other.contains_id(*id)))
    }

    /// Polyhedra of two subcomplexes meet iff they share a vertex.
    pub fn meets(&self, other: &Subcomplex) -> bool {
        let (a, b) = (self.indices(0), other.indices(0));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        self.to_complex().maximal_simplices()
    }

    /// The subcomplex as a standalone complex with the same vertex labels.
    pub fn to_complex(&self) -> SimplicialComplex {
        SimplicialComplex::from_closed_set(self.iter().map(|(_, s)| s.clone()))
    }

    /// Re-expresses the subcomplex inside another complex containing it.
    pub fn transfer(&self, parent: Arc<SimplicialComplex>) -> Result<Subcomplex, ComplexError> {
        let mut ids = Vec::with_capacity(self.total_count());
        for (_, s) in self.iter() {
            ids.push(parent.id_of(s).ok_or_else(|| ComplexError::NotFound(s.clone()))?);
        }
        Ok(Self::from_ids_unchecked(parent, ids))
    }
}

/// An open set of a polyhedron, represented by its closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenPolyhedralSet {
    closure: Subcomplex,
    boundary: Subcomplex,
}

impl OpenPolyhedralSet {
    /// Builds the open set whose closure is spanned by the given simplices.
    /// The input must already be face closed.
    pub fn from_closure(
        ambient: Arc<SimplicialComplex>,
        closure: impl IntoIterator<Item = SimplexId>,
    ) -> Result<Self, ComplexError> {
        let closure = Subcomplex::new(ambient, closure)?;
        Ok(Self::from_subcomplex(closure))
    }

    pub fn from_subcomplex(closure: Subcomplex) -> Self {
        let ambient = closure.parent().clone();
        let mut boundary = BTreeSet::new();
        for (id, s) in ambient.iter() {
            if closure.contains_id(id) {
                continue;
            }
            for f in s.faces() {
                if let Some(fid) = ambient.id_of(&f) {
                    if closure.contains_id(fid) {
                        boundary.insert(fid);
                    }
                }
            }
        }
        let boundary = Subcomplex::from_ids_unchecked(ambient, boundary);
        OpenPolyhedralSet { closure, boundary }
    }

    pub fn whole(ambient: Arc<SimplicialComplex>) -> Self {
        Self::from_subcomplex(Subcomplex::full(ambient))
    }

    pub fn ambient(&self) -> &Arc<SimplicialComplex> {
        self.closure.parent()
    }

    pub fn closure(&self) -> &Subcomplex {
        &self.closure
    }

    pub fn boundary(&self) -> &Subcomplex {
        &self.boundary
    }

    pub fn is_empty(&self) -> bool {
        self.closure.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.closure.total_count() == self.ambient().total_count()
    }
}

/// Exact barycentric coordinates with respect to the base triangulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarycentricPoint {
    coords: Vec<(Vertex, BigRational)>,
}

impl BarycentricPoint {
    pub fn vertex(v: Vertex) -> Self {
        BarycentricPoint {
            coords: vec![(v, BigRational::one())],
        }
    }

    pub fn coords(&self) -> &[(Vertex, BigRational)] {
        &self.coords
    }

    pub fn coordinate(&self, v: Vertex) -> BigRational {
        self.coords
            .iter()
            .find(|(w, _)| *w == v)
            .map_or_else(BigRational::zero, |(_, c)| c.clone())
    }

    /// The base simplex whose interior contains the point.
    pub fn support(&self) -> Simplex {
        Simplex::from_sorted(self.coords.iter().map(|(v, _)| *v).collect())
    }

    pub fn barycenter<'a>(points: impl IntoIterator<Item = &'a BarycentricPoint>) -> Self {
        let mut sum: BTreeMap<Vertex, BigRational> = BTreeMap::new();
        let mut n = 0i64;
        for p in points {
            n += 1;
            for (v, c) in &p.coords {
                *sum.entry(*v).or_insert_with(BigRational::zero) += c;
            }
        }
        let scale = BigRational::from_integer(BigInt::from(n));
        BarycentricPoint {
            coords: sum
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(v, c)| (v, c / &scale))
                .collect(),
        }
    }
}

/// One level of a barycentric subdivision tower.
///
/// At level zero the complex is the base triangulation. At level `k + 1` the
/// vertex named `g` is the barycenter of the simplex with global index `g` at
/// level `k`, so vertices are ordered by the dimension of the simplex they
/// subdivide and every simplex of the subdivision lists its flag from the
/// smallest face to the largest.
#[derive(Debug, Clone)]
pub struct SubdivisionRecord {
    level: usize,
    complex: Arc<SimplicialComplex>,
    geometry: Vec<BarycentricPoint>,
    origin: Vec<Option<Simplex>>,
    coarser: Option<Arc<SubdivisionRecord>>,
}

impl SubdivisionRecord {
    pub fn base(complex: Arc<SimplicialComplex>) -> Arc<Self> {
        let geometry = complex.vertices().map(BarycentricPoint::vertex).collect();
        let origin = vec![None; complex.count(0)];
        Arc::new(SubdivisionRecord {
            level: 0,
            complex,
            geometry,
            origin,
            coarser: None,
        })
    }

    /// Base record followed by `levels` barycentric subdivisions.
    pub fn tower(complex: Arc<SimplicialComplex>, levels: usize) -> Arc<Self> {
        let mut rec = Self::base(complex);
        for _ in 0..levels {
            rec = rec.subdivide();
        }
        rec
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn coarser(&self) -> Option<&Arc<SubdivisionRecord>> {
        self.coarser.as_ref()
    }

    /// The record at level `j` of this tower.
    pub fn at_level(&self, j: usize) -> Result<&SubdivisionRecord, ComplexError> {
        let mut rec = self;
        if j > rec.level {
            return Err(ComplexError::LevelOutOfRange {
                requested: j,
                available: self.level,
            });
        }
        while rec.level > j {
            rec = rec.coarser.as_deref().expect("tower levels are contiguous");
        }
        Ok(rec)
    }

    pub fn complex_at(&self, j: usize) -> Result<&Arc<SimplicialComplex>, ComplexError> {
        Ok(self.at_level(j)?.complex())
    }

    pub fn base_complex(&self) -> &Arc<SimplicialComplex> {
        &self.at_level(0).expect("level zero exists").complex
    }

    fn position(&self, v: Vertex) -> Option<usize> {
        self.complex.index_of(&Simplex::vertex(v))
    }

    pub fn coordinates(&self, v: Vertex) -> Option<&BarycentricPoint> {
        self.position(v).map(|p| &self.geometry[p])
    }

    /// Simplex of the previous level whose barycenter is `v`.
    pub fn origin(&self, v: Vertex) -> Option<&Simplex> {
        self.position(v).and_then(|p| self.origin[p].as_ref())
    }

    /// Smallest simplex of level `j` containing the simplex `s` of this level.
    pub fn carrier_at(&self, s: &Simplex, j: usize) -> Result<Simplex, ComplexError> {
        let mut rec = self;
        if j > rec.level {
            return Err(ComplexError::LevelOutOfRange {
                requested: j,
                available: self.level,
            });
        }
        let mut current = s.clone();
        while rec.level > j {
            let top = *current.vertices().last().expect("nonempty simplex");
            current = rec
                .origin(top)
                .ok_or_else(|| ComplexError::NotFound(current.clone()))?
                .clone();
            rec = rec.coarser.as_deref().expect("tower levels are contiguous");
        }
        Ok(current)
    }

    /// Carriers at level `j` of every simplex of this level, indexed like the
    /// complex itself.
    pub fn carrier_table(&self, j: usize) -> Result<Vec<Vec<SimplexId>>, ComplexError> {
        let coarse = self.complex_at(j)?.clone();
        let mut table = Vec::with_capacity(self.complex.dims());
        for d in 0..self.complex.dims() {
            let mut layer = Vec::with_capacity(self.complex.count(d));
            for s in self.complex.simplices(d) {
                let c = self.carrier_at(s, j)?;
                layer.push(coarse.id_of(&c).expect("carrier lies in the coarse complex"));
            }
            table.push(layer);
        }
        Ok(table)
    }

    /// Simplices of this level whose level-`j` carrier lies in `sub`.
    pub fn lift(&self, sub: &Subcomplex, j: usize) -> Result<Subcomplex, ComplexError> {
        if j == self.level {
            return sub.transfer(self.complex.clone());
        }
        let table = self.carrier_table(j)?;
        let ids = table.iter().enumerate().flat_map(|(d, layer)| {
            layer
                .iter()
                .enumerate()
                .filter(|(_, c)| sub.contains_id(**c))
                .map(move |(i, _)| SimplexId::new(d, i))
        });
        Ok(Subcomplex::from_ids_unchecked(self.complex.clone(), ids))
    }

    /// One further barycentric subdivision.
    pub fn subdivide(self: &Arc<Self>) -> Arc<SubdivisionRecord> {
        let old = &self.complex;
        let mut flags: BTreeMap<SimplexId, Vec<Vec<Vertex>>> = BTreeMap::new();
        let mut all = Vec::new();
        for (id, s) in old.iter() {
            let g = old.global_index(id);
            let mut mine: Vec<Vec<Vertex>> = vec![vec![g]];
            for f in s.faces() {
                if f.dim() == s.dim() {
                    continue;
                }
                let fid = old.id_of(&f).expect("complex is face closed");
                for flag in &flags[&fid] {
                    let mut ext = flag.clone();
                    ext.push(g);
                    mine.push(ext);
                }
            }
            for flag in &mine {
                all.push(Simplex::from_sorted(flag.clone()));
            }
            flags.insert(id, mine);
        }
        let complex = Arc::new(SimplicialComplex::from_closed_set(all));
        let mut geometry = Vec::with_capacity(complex.count(0));
        let mut origin = Vec::with_capacity(complex.count(0));
        for v in complex.vertices() {
            let sid = old.id_from_global(v).expect("vertex names a coarse simplex");
            let s = old.simplex(sid);
            let point = BarycentricPoint::barycenter(
                s.vertices()
                    .iter()
                    .map(|w| self.coordinates(*w).expect("vertex has coordinates")),
            );
            geometry.push(point);
            origin.push(Some(s.clone()));
        }
        Arc::new(SubdivisionRecord {
            level: self.level + 1,
            complex,
            geometry,
            origin,
            coarser: Some(self.clone()),
        })
    }

    /// The tower of a base subcomplex, keeping the vertex names of this tower.
    pub fn restrict(&self, base_sub: &Subcomplex) -> Result<Arc<SubdivisionRecord>, ComplexError> {
        let mut levels = Vec::new();
        let mut rec = Some(self);
        while let Some(r) = rec {
            levels.push(r);
            rec = r.coarser.as_deref();
        }
        levels.reverse();
        let mut out: Option<Arc<SubdivisionRecord>> = None;
        for r in levels {
            let sub = if r.level == 0 {
                base_sub.transfer(r.complex.clone())?
            } else {
                r.lift(base_sub, 0)?
            };
            let complex = Arc::new(sub.to_complex());
            let mut geometry = Vec::new();
            let mut origin = Vec::new();
            for v in complex.vertices() {
                let p = r.position(v).expect("sub vertex in parent");
                geometry.push(r.geometry[p].clone());
                origin.push(r.origin[p].clone());
            }
            out = Some(Arc::new(SubdivisionRecord {
                level: r.level,
                complex,
                geometry,
                origin,
                coarser: out.take(),
            }));
        }
        Ok(out.expect("tower has a base level"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> SimplicialComplex {
        SimplicialComplex::from_maximal([vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::from_maximal([vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn build_examples() {
        assert_eq!(circle().f_vector(), vec![3, 3]);
        assert_eq!(triangle().f_vector(), vec![3, 3, 1]);
        let empty = SimplicialComplex::from_maximal(Vec::<Vec<usize>>::new()).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.dim(), None);
    }

    #[test]
    fn duplicate_vertex_is_malformed() {
        let err = SimplicialComplex::from_maximal([vec![0, 1, 1]]).unwrap_err();
        assert!(matches!(err, ComplexError::MalformedSimplex(_)));
    }

    #[test]
    fn subdivision_counts() {
        let edge = Arc::new(SimplicialComplex::from_maximal([vec![0, 1]]).unwrap());
        let rec = SubdivisionRecord::base(edge).subdivide();
        assert_eq!(rec.complex().f_vector(), vec![3, 2]);
        let rec = SubdivisionRecord::base(Arc::new(triangle())).subdivide();
        assert_eq!(rec.complex().f_vector(), vec![7, 12, 6]);
        let rec = SubdivisionRecord::base(Arc::new(SimplicialComplex::empty())).subdivide();
        assert!(rec.complex().is_empty());
    }

    #[test]
    fn subdivision_geometry_sums_to_one() {
        let rec = SubdivisionRecord::tower(Arc::new(triangle()), 2);
        for v in rec.complex().vertices() {
            let p = rec.coordinates(v).unwrap();
            let total: BigRational = p.coords().iter().map(|(_, c)| c.clone()).sum();
            assert!(total.is_one());
            assert!(p.coords().iter().all(|(_, c)| c > &BigRational::zero()));
        }
    }

    #[test]
    fn stars() {
        let c = Arc::new(circle());
        let star = c.open_star(0).unwrap();
        let simplices: Vec<&Simplex> = star.iter().map(|id| c.simplex(*id)).collect();
        assert_eq!(
            simplices,
            vec![&Simplex::vertex(0), &Simplex(vec![0, 1]), &Simplex(vec![0, 2])]
        );
        let t = Arc::new(triangle());
        let star = t.open_star(0).unwrap();
        assert!(star.iter().any(|id| id.dim == 2));
        let iso = Arc::new(SimplicialComplex::from_maximal([vec![5], vec![0, 1]]).unwrap());
        assert_eq!(iso.open_star(5).unwrap(), vec![SimplexId::new(0, 2)]);
        assert!(matches!(iso.open_star(9), Err(ComplexError::NotFound(_))));
        let cs = t.closed_star(&Simplex::vertex(0)).unwrap();
        assert_eq!(cs.total_count(), 7);
    }

    #[test]
    fn skeleta() {
        assert_eq!(triangle().skeleton(1), circle());
        assert_eq!(triangle().skeleton(5), triangle());
        assert_eq!(triangle().skeleton(0).f_vector(), vec![3]);
    }

    #[test]
    fn open_set_boundary() {
        let k = Arc::new(triangle());
        let whole = OpenPolyhedralSet::whole(k.clone());
        assert!(whole.boundary().is_empty());

        // one closed edge of the subdivided triangle: its boundary consists of
        // the faces shared with simplices outside the closure
        let rec = SubdivisionRecord::tower(k, 1);
        let amb = rec.complex().clone();
        let edge = amb.simplices(1)[0].clone();
        let closure = Subcomplex::closure_of(amb.clone(), [&edge]);
        let u = OpenPolyhedralSet::from_subcomplex(closure);
        // enumerate cofaces directly: every face of the edge has a coface
        // outside the closure, so the whole closure is boundary
        let mut expected = BTreeSet::new();
        for f in edge.faces() {
            if amb.cofaces(&f).any(|(_, t)| !u.closure().contains(t)) {
                expected.insert(f);
            }
        }
        let got: BTreeSet<Simplex> = u.boundary().iter().map(|(_, s)| s.clone()).collect();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 3);

        let bad = OpenPolyhedralSet::from_closure(amb.clone(), [amb.id_of(&edge).unwrap()]);
        assert!(matches!(bad, Err(ComplexError::MalformedSubcomplex { .. })));
        let empty = OpenPolyhedralSet::from_closure(amb, []).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn carriers_and_lifts() {
        let rec = SubdivisionRecord::tower(Arc::new(triangle()), 2);
        let top = rec.complex().simplices(2)[0].clone();
        assert_eq!(rec.carrier_at(&top, 0).unwrap(), Simplex(vec![0, 1, 2]));
        let base = rec.base_complex().clone();
        let edge = Subcomplex::closure_of(base.clone(), [&Simplex(vec![0, 1])]);
        let lifted = rec.lift(&edge, 0).unwrap();
        // the edge is cut into four pieces at level two
        assert_eq!(lifted.count(1), 4);
        assert_eq!(lifted.count(0), 5);
    }

    #[test]
    fn restricted_tower_matches_lift() {
        let rec = SubdivisionRecord::tower(Arc::new(triangle()), 2);
        let base = rec.base_complex().clone();
        let edge = Subcomplex::closure_of(base, [&Simplex(vec![0, 1])]);
        let sub = rec.restrict(&edge).unwrap();
        assert_eq!(sub.level(), 2);
        assert_eq!(**sub.complex(), rec.lift(&edge, 0).unwrap().to_complex());
        let s = sub.complex().simplices(1)[1].clone();
        assert_eq!(sub.carrier_at(&s, 0).unwrap(), rec.carrier_at(&s, 0).unwrap());
    }
}
