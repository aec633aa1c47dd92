//! Simplicial chain complexes with integer coefficients, graded maps between
//! them, and the exact checks built on top (chain maps, chain homotopies,
//! Lefschetz numbers, filling cycles inside subcomplexes).

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::complex::{Simplex, SimplexId, SimplicialComplex, Subcomplex, Vertex};
use crate::matrix::SparseIntegerMatrix;
use crate::smith::{smith_normal_form, SmithDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("shape mismatch: {0}")]
    Shape(&'static str),
    #[error("simplex {0} is not in the target complex")]
    NotInTarget(Simplex),
    #[error("vertex {0} has no image")]
    UnmappedVertex(Vertex),
}

/// Sparse chain: coefficients indexed by position among the simplices of one
/// dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    dim: usize,
    coeffs: BTreeMap<usize, BigInt>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Chain {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn simplex(dim: usize, index: usize) -> Self {
        Self::from_coeffs(dim, [(index, BigInt::one())])
    }

    pub fn from_coeffs(dim: usize, coeffs: impl IntoIterator<Item = (usize, BigInt)>) -> Self {
        let mut c = Chain::zero(dim);
        for (i, x) in coeffs {
            c.add_term(i, &x);
        }
        c
    }

    /// From a formal sum of simplices of `complex`.
    pub fn from_formal(
        complex: &SimplicialComplex,
        dim: usize,
        terms: &BTreeMap<Simplex, BigInt>,
    ) -> Result<Self, ChainError> {
        let mut c = Chain::zero(dim);
        for (s, x) in terms {
            if s.dim() != dim {
                return Err(ChainError::Shape("formal chain of mixed dimension"));
            }
            let i = complex.index_of(s).ok_or_else(|| ChainError::NotInTarget(s.clone()))?;
            c.add_term(i, x);
        }
        Ok(c)
    }

    pub fn to_formal(&self, complex: &SimplicialComplex) -> BTreeMap<Simplex, BigInt> {
        self.coeffs
            .iter()
            .map(|(&i, x)| (complex.simplices(self.dim)[i].clone(), x.clone()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigInt> {
        &self.coeffs
    }

    pub fn coefficient(&self, index: usize) -> BigInt {
        self.coeffs.get(&index).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = SimplexId> + '_ {
        self.coeffs.keys().map(|&i| SimplexId::new(self.dim, i))
    }

    pub fn add_term(&mut self, index: usize, x: &BigInt) {
        if x.is_zero() {
            return;
        }
        let e = self.coeffs.entry(index).or_default();
        *e += x;
        if e.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        assert_eq!(self.dim, other.dim, "adding chains of different dimension");
        let mut out = self.clone();
        for (&i, x) in &other.coeffs {
            out.add_term(i, x);
        }
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        self.add(&other.scale(&-BigInt::one()))
    }

    pub fn scale(&self, k: &BigInt) -> Chain {
        Chain::from_coeffs(self.dim, self.coeffs.iter().map(|(&i, x)| (i, x * k)))
    }

    /// Sum of coefficients (meaningful for 0-chains).
    pub fn augmentation(&self) -> BigInt {
        self.coeffs.values().sum()
    }
}

/// The simplicial chain complex of a finite complex in its canonical basis.
#[derive(Debug, Clone)]
pub struct ChainComplexData {
    complex: Arc<SimplicialComplex>,
    // boundaries[0] is the augmentation row, boundaries[q] = ∂_q for q >= 1
    boundaries: Vec<SparseIntegerMatrix>,
}

impl Eq for ChainComplexData {}

impl PartialEq for ChainComplexData {
    fn eq(&self, other: &Self) -> bool {
        same_complex(&self.complex, &other.complex)
    }
}

pub(crate) fn same_complex(a: &Arc<SimplicialComplex>, b: &Arc<SimplicialComplex>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl ChainComplexData {
    /// Boundary matrices `∂[v0..vk] = Σ (-1)^i [v0..v̂i..vk]`. Panics if
    /// `∂∂ ≠ 0`, which would mean the complex is not face closed.
    pub fn new(complex: Arc<SimplicialComplex>) -> Self {
        let dims = complex.dims();
        let mut boundaries = Vec::with_capacity(dims + 1);
        let mut aug = SparseIntegerMatrix::zeros(1, complex.count(0));
        for i in 0..complex.count(0) {
            aug.set(0, i, BigInt::one());
        }
        boundaries.push(aug);
        for q in 1..=dims {
            let mut m = SparseIntegerMatrix::zeros(complex.count(q - 1), complex.count(q));
            for (j, s) in complex.simplices(q).iter().enumerate() {
                for (sign, f) in s.boundary() {
                    let i = complex.index_of(&f).expect("complex is face closed");
                    m.set(i, j, BigInt::from(sign));
                }
            }
            boundaries.push(m);
        }
        let cc = ChainComplexData { complex, boundaries };
        for q in 1..=dims {
            assert!(
                cc.boundary(q - 1).mul(cc.boundary(q)).is_zero(),
                "boundary of boundary is nonzero in degree {q}"
            );
        }
        cc
    }

    pub fn shared(complex: Arc<SimplicialComplex>) -> Arc<Self> {
        Arc::new(Self::new(complex))
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    /// Number of dimensions carrying chains.
    pub fn dims(&self) -> usize {
        self.complex.dims()
    }

    pub fn rank(&self, q: usize) -> usize {
        self.complex.count(q)
    }

    /// `∂_q : C_q → C_{q-1}` for `1 <= q <= dims`; `q = 0` gives the augmentation.
    pub fn boundary(&self, q: usize) -> &SparseIntegerMatrix {
        &self.boundaries[q]
    }

    /// `∂_q`, or the appropriate zero matrix past the top dimension.
    pub fn boundary_or_zero(&self, q: usize) -> SparseIntegerMatrix {
        match self.boundaries.get(q) {
            Some(m) => m.clone(),
            None => SparseIntegerMatrix::zeros(self.rank(q.saturating_sub(1)), self.rank(q)),
        }
    }

    pub fn augmentation(&self) -> &SparseIntegerMatrix {
        &self.boundaries[0]
    }

    pub fn boundary_of(&self, c: &Chain) -> Chain {
        if c.dim == 0 {
            return Chain::zero(0);
        }
        Chain {
            dim: c.dim - 1,
            coeffs: self.boundaries[c.dim].apply(&c.coeffs),
        }
    }

    pub fn is_cycle(&self, c: &Chain) -> bool {
        if c.dim == 0 {
            c.augmentation().is_zero()
        } else {
            self.boundary_of(c).is_zero()
        }
    }
}

/// Why a verification failed, anchored at a source simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub simplex: Simplex,
    pub kind: WitnessKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `∂ f(σ) ≠ f(∂σ)`.
    BoundaryMismatch,
    /// The augmentation of `f(v)` is not 1.
    Augmentation,
    /// `f(σ)` leaves the carrier value of `σ`.
    NotCarried,
    /// `f(σ) - g(σ) ≠ ∂D(σ) + D(∂σ)`.
    HomotopyMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Holds,
    Fails(Witness),
}

impl Verification {
    pub fn holds(&self) -> bool {
        matches!(self, Verification::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verification::Holds => None,
            Verification::Fails(w) => Some(w),
        }
    }

    pub(crate) fn and_then(self, f: impl FnOnce() -> Verification) -> Verification {
        match self {
            Verification::Holds => f(),
            fail => fail,
        }
    }
}

/// A family of matrices `C_q(source) → C_{q+degree}(target)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedIntegerMap {
    source: Arc<ChainComplexData>,
    target: Arc<ChainComplexData>,
    degree: usize,
    matrices: Vec<SparseIntegerMatrix>,
}

impl GradedIntegerMap {
    pub fn new(
        source: Arc<ChainComplexData>,
        target: Arc<ChainComplexData>,
        degree: usize,
        matrices: Vec<SparseIntegerMatrix>,
    ) -> Result<Self, ChainError> {
        if matrices.len() != source.dims() {
            return Err(ChainError::Shape("one matrix per source dimension"));
        }
        for (q, m) in matrices.iter().enumerate() {
            if m.shape() != (target.rank(q + degree), source.rank(q)) {
                return Err(ChainError::Shape("matrix does not match the chain ranks"));
            }
        }
        Ok(GradedIntegerMap {
            source,
            target,
            degree,
            matrices,
        })
    }

    pub fn zero(source: Arc<ChainComplexData>, target: Arc<ChainComplexData>, degree: usize) -> Self {
        let matrices = (0..source.dims())
            .map(|q| SparseIntegerMatrix::zeros(target.rank(q + degree), source.rank(q)))
            .collect();
        GradedIntegerMap {
            source,
            target,
            degree,
            matrices,
        }
    }

    pub fn identity(cc: Arc<ChainComplexData>) -> Self {
        let matrices = (0..cc.dims())
            .map(|q| SparseIntegerMatrix::identity(cc.rank(q)))
            .collect();
        GradedIntegerMap {
            source: cc.clone(),
            target: cc,
            degree: 0,
            matrices,
        }
    }

    /// Builds the map column by column from formal chains of the target.
    pub fn from_formal<E>(
        source: Arc<ChainComplexData>,
        target: Arc<ChainComplexData>,
        degree: usize,
        mut column: impl FnMut(&Simplex) -> Result<BTreeMap<Simplex, BigInt>, E>,
    ) -> Result<Self, E>
    where
        E: From<ChainError>,
    {
        let mut matrices = Vec::with_capacity(source.dims());
        for q in 0..source.dims() {
            let mut m = SparseIntegerMatrix::zeros(target.rank(q + degree), source.rank(q));
            for (j, s) in source.complex().simplices(q).iter().enumerate() {
                let image = column(s)?;
                let c = Chain::from_formal(target.complex(), q + degree, &image)?;
                for (i, x) in c.coeffs {
                    m.set(i, j, x);
                }
            }
            matrices.push(m);
        }
        Ok(GradedIntegerMap {
            source,
            target,
            degree,
            matrices,
        })
    }

    /// Chain map of a vertex map: degenerate images go to zero, the rest
    /// carry the sign of the sorting permutation.
    pub fn simplicial(
        source: Arc<ChainComplexData>,
        target: Arc<ChainComplexData>,
        map: impl Fn(Vertex) -> Option<Vertex>,
    ) -> Result<Self, ChainError> {
        Self::from_formal(source, target.clone(), 0, |s| {
            let mut image = Vec::with_capacity(s.vertices().len());
            for &v in s.vertices() {
                image.push(map(v).ok_or(ChainError::UnmappedVertex(v))?);
            }
            let mut out = BTreeMap::new();
            if let Some((sign, t)) = Simplex::sorted_with_sign(image.clone()) {
                if !target.complex().contains(&t) {
                    return Err(ChainError::NotInTarget(t));
                }
                out.insert(t, BigInt::from(sign));
            } else {
                image.sort_unstable();
                image.dedup();
                let t = Simplex::new(image).expect("nonempty image");
                if !target.complex().contains(&t) {
                    return Err(ChainError::NotInTarget(t));
                }
            }
            Ok(out)
        })
    }

    pub fn source(&self) -> &Arc<ChainComplexData> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ChainComplexData> {
        &self.target
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self, q: usize) -> &SparseIntegerMatrix {
        &self.matrices[q]
    }

    pub fn matrices(&self) -> &[SparseIntegerMatrix] {
        &self.matrices
    }

    /// Image of a source chain.
    pub fn apply(&self, c: &Chain) -> Chain {
        match self.matrices.get(c.dim) {
            Some(m) => Chain {
                dim: c.dim + self.degree,
                coeffs: m.apply(&c.coeffs),
            },
            None => Chain::zero(c.dim + self.degree),
        }
    }

    pub fn image_of(&self, id: SimplexId) -> Chain {
        self.apply(&Chain::simplex(id.dim, id.index))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GradedIntegerMap) -> Result<GradedIntegerMap, ChainError> {
        if !same_complex(inner.target.complex(), self.source.complex()) {
            return Err(ChainError::Shape("composition across different complexes"));
        }
        let degree = self.degree + inner.degree;
        let matrices = (0..inner.source.dims())
            .map(|q| {
                let mid = q + inner.degree;
                match self.matrices.get(mid) {
                    Some(outer) => outer.mul(&inner.matrices[q]),
                    None => SparseIntegerMatrix::zeros(self.target.rank(q + degree), inner.source.rank(q)),
                }
            })
            .collect();
        Ok(GradedIntegerMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            degree,
            matrices,
        })
    }

    fn check_same_shape(&self, other: &GradedIntegerMap) -> Result<(), ChainError> {
        if self.degree != other.degree
            || !same_complex(self.source.complex(), other.source.complex())
            || !same_complex(self.target.complex(), other.target.complex())
        {
            return Err(ChainError::Shape("maps with different source, target or degree"));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedIntegerMap) -> Result<GradedIntegerMap, ChainError> {
        self.check_same_shape(other)?;
        Ok(GradedIntegerMap {
            matrices: self
                .matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| a.add(b))
                .collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &GradedIntegerMap) -> Result<GradedIntegerMap, ChainError> {
        self.check_same_shape(other)?;
        Ok(GradedIntegerMap {
            matrices: self
                .matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| a.sub(b))
                .collect(),
            ..self.clone()
        })
    }

    /// Replaces the source and target by equal complexes (e.g. a shared copy).
    pub fn rebase(
        &self,
        source: Arc<ChainComplexData>,
        target: Arc<ChainComplexData>,
    ) -> Result<GradedIntegerMap, ChainError> {
        if !same_complex(source.complex(), self.source.complex())
            || !same_complex(target.complex(), self.target.complex())
        {
            return Err(ChainError::Shape("rebase onto a different complex"));
        }
        Ok(GradedIntegerMap {
            source,
            target,
            ..self.clone()
        })
    }
}

/// Checks `∂f = f∂` in every degree and that `f` preserves augmentation.
pub fn is_chain_map(f: &GradedIntegerMap) -> Result<Verification, ChainError> {
    if f.degree != 0 {
        return Err(ChainError::Shape("chain maps have degree zero"));
    }
    let src = &f.source;
    let tgt = &f.target;
    for q in 0..src.dims() {
        for (j, s) in src.complex().simplices(q).iter().enumerate() {
            let image = f.apply(&Chain::simplex(q, j));
            let ok = if q == 0 {
                image.augmentation().is_one()
            } else {
                let lhs = tgt.boundary_of(&image);
                let rhs = f.apply(&src.boundary_of(&Chain::simplex(q, j)));
                lhs == rhs
            };
            if !ok {
                let kind = if q == 0 {
                    WitnessKind::Augmentation
                } else {
                    WitnessKind::BoundaryMismatch
                };
                return Ok(Verification::Fails(Witness {
                    simplex: s.clone(),
                    kind,
                }));
            }
        }
    }
    Ok(Verification::Holds)
}

/// Checks `f - g = ∂D + D∂`.
pub fn verify_chain_homotopy(
    f: &GradedIntegerMap,
    g: &GradedIntegerMap,
    d: &GradedIntegerMap,
) -> Result<Verification, ChainError> {
    f.check_same_shape(g)?;
    if f.degree != 0 || d.degree != 1 {
        return Err(ChainError::Shape(
            "homotopy needs degree 0 maps and a degree 1 operator",
        ));
    }
    if !same_complex(d.source.complex(), f.source.complex()) || !same_complex(d.target.complex(), f.target.complex()) {
        return Err(ChainError::Shape("homotopy between different complexes"));
    }
    let src = &f.source;
    let tgt = &f.target;
    for q in 0..src.dims() {
        for (j, s) in src.complex().simplices(q).iter().enumerate() {
            let sigma = Chain::simplex(q, j);
            let lhs = f.apply(&sigma).sub(&g.apply(&sigma));
            let mut rhs = tgt.boundary_of(&d.apply(&sigma));
            if q > 0 {
                rhs = rhs.add(&d.apply(&src.boundary_of(&sigma)));
            }
            if lhs != rhs {
                return Ok(Verification::Fails(Witness {
                    simplex: s.clone(),
                    kind: WitnessKind::HomotopyMismatch,
                }));
            }
        }
    }
    Ok(Verification::Holds)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LefschetzNumber {
    pub value: BigInt,
    /// `tr(ψ_q)` for each degree `q`.
    pub traces: Vec<BigInt>,
}

/// `λ(ψ) = Σ (-1)^q tr(ψ_q)` for a degree-zero endomorphism.
pub fn lefschetz_number(psi: &GradedIntegerMap) -> Result<LefschetzNumber, ChainError> {
    if psi.degree != 0 {
        return Err(ChainError::Shape("Lefschetz number of a map of nonzero degree"));
    }
    if !same_complex(psi.source.complex(), psi.target.complex()) {
        return Err(ChainError::Shape("Lefschetz number needs source = target"));
    }
    Ok(lefschetz_from_traces(
        psi.matrices.iter().map(SparseIntegerMatrix::trace).collect(),
    ))
}

pub fn lefschetz_from_traces(traces: Vec<BigInt>) -> LefschetzNumber {
    let value = traces
        .iter()
        .enumerate()
        .map(|(q, t)| if q % 2 == 0 { t.clone() } else { -t })
        .sum();
    LefschetzNumber { value, traces }
}

/// Homology class that blocks filling a cycle, in the Smith basis of the
/// subcomplex chain group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionClass {
    /// Degree of the cycle that could not be filled.
    pub dim: usize,
    /// Coordinates outside the rational span of the boundaries.
    pub free: Vec<BigInt>,
    /// `(coordinate mod d, d)` for each invariant factor `d` that does not
    /// divide the coordinate.
    pub torsion: Vec<(BigInt, BigInt)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("chain is not a (reduced) cycle")]
    NotACycle,
    #[error("chain is not supported in the subcomplex")]
    OutsideSubcomplex,
    #[error("cycle of degree {} does not bound in the subcomplex", .0.dim)]
    Obstructed(ObstructionClass),
}

type SolverKey = (usize, Vec<usize>, Vec<usize>);

/// Solves `∂c = z` inside subcomplexes, caching one Smith decomposition per
/// restricted boundary matrix.
pub struct BoundarySolver<'a> {
    cc: &'a ChainComplexData,
    cache: BTreeMap<SolverKey, Arc<SmithDecomposition>>,
}

impl<'a> BoundarySolver<'a> {
    pub fn new(cc: &'a ChainComplexData) -> Self {
        BoundarySolver {
            cc,
            cache: BTreeMap::new(),
        }
    }

    /// A chain `c` supported in `within` with `∂c = z`. The free coordinates
    /// of the Smith basis are set to zero, so the answer is deterministic and
    /// `z = 0` always gives `c = 0`.
    pub fn solve(&mut self, z: &Chain, within: &Subcomplex) -> Result<Chain, SolveError> {
        let q = z.dim();
        if !z.support().all(|id| within.contains_id(id)) {
            return Err(SolveError::OutsideSubcomplex);
        }
        if !self.cc.is_cycle(z) {
            return Err(SolveError::NotACycle);
        }
        if z.is_zero() {
            return Ok(Chain::zero(q + 1));
        }
        let rows = within.indices(q).to_vec();
        let cols = within.indices(q + 1).to_vec();
        let key = (q, rows.clone(), cols.clone());
        let snf = match self.cache.get(&key) {
            Some(s) => s.clone(),
            None => {
                let b = self.cc.boundary_or_zero(q + 1).select(&rows, &cols);
                let s = Arc::new(smith_normal_form(&b));
                self.cache.insert(key, s.clone());
                s
            }
        };
        let local: BTreeMap<usize, BigInt> = rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| z.coeffs.get(r).map(|x| (i, x.clone())))
            .collect();
        let y = snf.u_inv.apply(&local);
        let factors = snf.invariant_factors();
        let mut w = BTreeMap::new();
        let mut free = Vec::new();
        let mut torsion = Vec::new();
        for (i, x) in &y {
            match factors.get(*i) {
                Some(d) => {
                    let (quot, rem) = x.div_mod_floor(d);
                    if rem.is_zero() {
                        w.insert(*i, quot);
                    } else {
                        torsion.push((rem, d.clone()));
                    }
                }
                None => free.push(x.clone()),
            }
        }
        if !free.is_empty() || !torsion.is_empty() {
            return Err(SolveError::Obstructed(ObstructionClass { dim: q, free, torsion }));
        }
        let c_local = snf.v_inv.apply(&w);
        Ok(Chain::from_coeffs(
            q + 1,
            c_local.into_iter().map(|(j, x)| (cols[j], x)),
        ))
    }
}

pub fn solve_boundary(cc: &ChainComplexData, z: &Chain, within: &Subcomplex) -> Result<Chain, SolveError> {
    BoundarySolver::new(cc).solve(z, within)
}
