//! The fixed point index of a carrier on an open polyhedral set.
//!
//! For an open set `U` with closure a subcomplex of `τ^k` and an
//! approximation `φ : C(τ^l) → C(τ^k)`, the index is the Lefschetz number of
//! `ψ = p ∘ φ ∘ b` restricted to the chains of `Ū`, where `b` subdivides from
//! level `k` to level `l` and `p` projects onto `Ū`.
//!
//! Fixed points on `∂U` are excluded by a sufficient combinatorial test: a
//! simplex `σ` of level `l` touching the lifted boundary is suspicious when
//! the closed star of its level-`k` carrier meets the value of `σ`. An
//! empty suspicious list certifies that no point of `∂U` is fixed.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::carrier::{
    verify_approximation, AcyclicCarrier, CarrierError, ChainApproximation, CompositeModel, MapModel, SimplicialModel,
    VertexRule,
};
use crate::chain::{
    lefschetz_from_traces, same_complex, Chain, ChainComplexData, ChainError, GradedIntegerMap, Verification, Witness,
};
use crate::complex::{
    ComplexError, OpenPolyhedralSet, Simplex, SimplexId, SimplicialComplex, Subcomplex, SubdivisionRecord, Vertex,
};
use crate::homology::{induced_map_on_homology, HomologyBasis, HomologyError};
use crate::matrix::SparseIntegerMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error(transparent)]
    Carrier(#[from] CarrierError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("not admissible: {} suspicious simplices near the boundary", .0.suspicious.len())]
    Inadmissible(AdmissibilityReport),
    #[error("approximation fails verification at {}", .0.simplex)]
    Unverified(Witness),
    #[error("subdivision maps only go to finer levels ({from} -> {to})")]
    LevelOrder { from: usize, to: usize },
    #[error("no admissible polyhedral inner approximation up to level {0}")]
    ResolutionExhausted(usize),
    #[error("open set does not live on level {0} of the tower")]
    OpenSetLevel(usize),
    #[error("not a self-map")]
    NotSelfMap,
    #[error("invalid retraction: {0}")]
    InvalidRetraction(String),
    #[error("open set is not a union of open cells closed under cofaces")]
    NotOpen,
}

/// The subdivision chain map `b(k, l) : C(τ^k) → C(τ^l)`.
///
/// One step sends a vertex to itself (renamed) and a simplex `σ` to
/// `(-1)^dim σ` times the cone from its barycenter over the subdivided
/// boundary, so `[a, b] ↦ [a, m] - [b, m]`.
pub fn subdivision_chain_map(tower: &SubdivisionRecord, k: usize, l: usize) -> Result<GradedIntegerMap, IndexError> {
    if l < k {
        return Err(IndexError::LevelOrder { from: k, to: l });
    }
    let base = ChainComplexData::shared(tower.complex_at(k)?.clone());
    let mut acc = GradedIntegerMap::identity(base);
    for j in k..l {
        let step = subdivision_step(tower, j)?;
        let step = step.rebase(acc.target().clone(), step.target().clone())?;
        acc = step.compose(&acc)?;
    }
    Ok(acc)
}

fn subdivision_step(tower: &SubdivisionRecord, j: usize) -> Result<GradedIntegerMap, IndexError> {
    let coarse = tower.complex_at(j)?.clone();
    let fine = tower.complex_at(j + 1)?.clone();
    let mut memo: Vec<Vec<BTreeMap<Simplex, BigInt>>> = Vec::with_capacity(coarse.dims());
    for d in 0..coarse.dims() {
        let mut layer = Vec::with_capacity(coarse.count(d));
        for (i, s) in coarse.simplices(d).iter().enumerate() {
            let g = coarse.global_index(SimplexId::new(d, i));
            let mut out = BTreeMap::new();
            if d == 0 {
                out.insert(Simplex::vertex(g), BigInt::one());
            } else {
                let sign = if d % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                for (fs, f) in s.boundary() {
                    let fi = coarse.index_of(&f).expect("coarse complex is face closed");
                    for (t, x) in &memo[d - 1][fi] {
                        let e: &mut BigInt = out.entry(t.push_top(g)).or_default();
                        *e += x * &sign * BigInt::from(fs);
                    }
                }
                out.retain(|_, x| !x.is_zero());
            }
            layer.push(out);
        }
        memo.push(layer);
    }
    let map = GradedIntegerMap::from_formal(
        ChainComplexData::shared(coarse.clone()),
        ChainComplexData::shared(fine),
        0,
        |s| {
            let id = coarse.id_of(s).expect("simplex of the coarse complex");
            Ok::<_, ChainError>(memo[id.dim][id.index].clone())
        },
    )?;
    Ok(map)
}

/// `p(U, k)`: the identity on simplices of `Ū` and zero elsewhere. A graded
/// homomorphism, not a chain map in general.
pub fn projection(u: &OpenPolyhedralSet) -> GradedIntegerMap {
    let cc = ChainComplexData::shared(u.ambient().clone());
    let matrices = (0..cc.dims())
        .map(|q| {
            let mut m = SparseIntegerMatrix::zeros(cc.rank(q), cc.rank(q));
            for &i in u.closure().indices(q) {
                m.set(i, i, BigInt::one());
            }
            m
        })
        .collect();
    GradedIntegerMap::new(cc.clone(), cc, 0, matrices).expect("square projections")
}

/// Open set of level `j` re-expressed at a finer level `k` of the tower.
pub fn lift_open_set(
    tower: &SubdivisionRecord,
    u: &OpenPolyhedralSet,
    j: usize,
    k: usize,
) -> Result<OpenPolyhedralSet, IndexError> {
    let rec = tower.at_level(k)?;
    if !same_complex(u.ambient(), tower.complex_at(j)?) {
        return Err(IndexError::OpenSetLevel(j));
    }
    Ok(OpenPolyhedralSet::from_subcomplex(rec.lift(u.closure(), j)?))
}

/// An index problem: a self-map approximation `C(τ^l) → C(τ^k)` and an open
/// set of `τ^k`.
#[derive(Debug, Clone)]
pub struct IndexProblem {
    tower: Arc<SubdivisionRecord>,
    open_set: OpenPolyhedralSet,
    approximation: ChainApproximation,
    canonical: bool,
}

impl IndexProblem {
    /// Uses the canonical approximation (least vertex rule) of `carrier`.
    pub fn new(
        tower: Arc<SubdivisionRecord>,
        open_set: OpenPolyhedralSet,
        carrier: Arc<AcyclicCarrier>,
    ) -> Result<Self, IndexError> {
        let a = crate::carrier::build_chain_approximation(&carrier, VertexRule::Least)?;
        let mut p = Self::with_approximation(tower, open_set, a)?;
        p.canonical = true;
        Ok(p)
    }

    /// Canonical approximation of a self-map model with target level `k`.
    pub fn from_model(model: &dyn MapModel, open_set: OpenPolyhedralSet, k: usize) -> Result<Self, IndexError> {
        Self::from_model_with_rule(model, open_set, k, VertexRule::Least)
    }

    pub fn from_model_with_rule(
        model: &dyn MapModel,
        open_set: OpenPolyhedralSet,
        k: usize,
        rule: VertexRule,
    ) -> Result<Self, IndexError> {
        if !same_complex(model.source().base_complex(), model.target().base_complex()) {
            return Err(IndexError::NotSelfMap);
        }
        let a = model.approximate(model.source_level_for(k), k, rule)?;
        let mut p = Self::with_approximation(model.source().clone(), open_set, a)?;
        p.canonical = rule == VertexRule::Least;
        Ok(p)
    }

    /// A supplied approximation; the result is flagged as non-canonical.
    pub fn with_approximation(
        tower: Arc<SubdivisionRecord>,
        open_set: OpenPolyhedralSet,
        approximation: ChainApproximation,
    ) -> Result<Self, IndexError> {
        let (l, k) = approximation.levels();
        if l < k {
            return Err(IndexError::LevelOrder { from: k, to: l });
        }
        if !same_complex(open_set.ambient(), tower.complex_at(k)?) {
            return Err(IndexError::OpenSetLevel(k));
        }
        if !same_complex(approximation.carrier().target(), tower.complex_at(k)?) {
            return Err(IndexError::NotSelfMap);
        }
        let lifted = tower.at_level(l)?.lift(open_set.closure(), k)?;
        for (_, s) in lifted.iter() {
            if !approximation.carrier().source().contains(s) {
                return Err(CarrierError::UnknownSimplex(s.clone()).into());
            }
        }
        Ok(IndexProblem {
            tower,
            open_set,
            approximation,
            canonical: false,
        })
    }

    pub fn tower(&self) -> &Arc<SubdivisionRecord> {
        &self.tower
    }

    pub fn open_set(&self) -> &OpenPolyhedralSet {
        &self.open_set
    }

    pub fn approximation(&self) -> &ChainApproximation {
        &self.approximation
    }

    pub fn levels(&self) -> (usize, usize) {
        self.approximation.levels()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Simplices of level `l` near the boundary whose value meets the closed
    /// star of their carrier.
    pub suspicious: Vec<Simplex>,
    /// Number of simplices examined.
    pub checked: usize,
}

/// Simplices of the carrier source whose level-`k` carrier is one of
/// `cells` and whose value meets the closed star of that carrier.
fn suspicious_over(
    tower: &SubdivisionRecord,
    carrier: &AcyclicCarrier,
    l: usize,
    k: usize,
    mut in_region: impl FnMut(&Simplex) -> bool,
) -> Result<(Vec<Simplex>, usize), IndexError> {
    let rec = tower.at_level(l)?;
    let coarse = tower.complex_at(k)?.clone();
    let mut stars: BTreeMap<Simplex, Subcomplex> = BTreeMap::new();
    let mut suspicious = Vec::new();
    let mut checked = 0;
    for (id, s) in carrier.source().iter() {
        let c = rec.carrier_at(s, k)?;
        if !in_region(&c) {
            continue;
        }
        checked += 1;
        if !stars.contains_key(&c) {
            let star = coarse.closed_star(&c)?;
            stars.insert(c.clone(), star);
        }
        if stars[&c].meets(carrier.value(id)) {
            suspicious.push(s.clone());
        }
    }
    Ok((suspicious, checked))
}

/// A simplex is examined when it lies over `Ū` and touches `∂U`.
pub fn check_admissible(p: &IndexProblem) -> Result<AdmissibilityReport, IndexError> {
    let (l, k) = p.levels();
    let u = &p.open_set;
    let boundary_vertices: BTreeSet<Vertex> = u.boundary().vertices().collect();
    let rec = p.tower.at_level(l)?;
    let closure = u.closure();
    let coarse = p.tower.complex_at(k)?.clone();
    let carrier = p.approximation.carrier();
    let mut stars: BTreeMap<Simplex, Subcomplex> = BTreeMap::new();
    let mut suspicious = Vec::new();
    let mut checked = 0;
    for (id, s) in carrier.source().iter() {
        let c = rec.carrier_at(s, k)?;
        if !closure.contains(&c) {
            continue;
        }
        // touches ∂U when some vertex has its level-k carrier in ∂U
        let mut touches = false;
        for &v in s.vertices() {
            let cv = rec.carrier_at(&Simplex::vertex(v), k)?;
            if cv.vertices().iter().all(|w| boundary_vertices.contains(w)) && u.boundary().contains(&cv) {
                touches = true;
                break;
            }
        }
        if !touches {
            continue;
        }
        checked += 1;
        if !stars.contains_key(&c) {
            stars.insert(c.clone(), coarse.closed_star(&c)?);
        }
        if stars[&c].meets(carrier.value(id)) {
            suspicious.push(s.clone());
        }
    }
    Ok(AdmissibilityReport {
        admissible: suspicious.is_empty(),
        suspicious,
        checked,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexResult {
    pub value: BigInt,
    /// Target level `k` of `U`.
    pub level: usize,
    /// Source level `l` of the approximation.
    pub source_level: usize,
    /// `tr(ψ_q)` for each degree.
    pub traces: Vec<BigInt>,
    pub admissibility: AdmissibilityReport,
    /// False when the approximation was supplied rather than built.
    pub canonical: bool,
}

/// `λ(p ∘ φ ∘ b)` on the chains of `Ū`.
pub fn fixed_point_index(p: &IndexProblem) -> Result<IndexResult, IndexError> {
    let admissibility = check_admissible(p)?;
    if !admissibility.admissible {
        return Err(IndexError::Inadmissible(admissibility));
    }
    if let Verification::Fails(w) = verify_approximation(&p.approximation)? {
        return Err(IndexError::Unverified(w));
    }
    let (l, k) = p.levels();
    let traces = psi_traces(p, l, k)?;
    let value = lefschetz_from_traces(traces.clone()).value;
    Ok(IndexResult {
        value,
        level: k,
        source_level: l,
        traces,
        admissibility,
        canonical: p.canonical,
    })
}

fn psi_traces(p: &IndexProblem, l: usize, k: usize) -> Result<Vec<BigInt>, IndexError> {
    let b = subdivision_chain_map(&p.tower, k, l)?;
    let fine = p.tower.complex_at(l)?.clone();
    let carrier = p.approximation.carrier();
    let phi = p.approximation.map();
    let direct = same_complex(carrier.source(), &fine);
    let closure = p.open_set.closure();
    let mut traces = Vec::with_capacity(b.source().dims());
    for q in 0..b.source().dims() {
        let mut t = BigInt::zero();
        for &i in closure.indices(q) {
            let sub = b.image_of(SimplexId::new(q, i));
            let sub = if direct {
                sub
            } else {
                Chain::from_formal(carrier.source(), q, &sub.to_formal(&fine))?
            };
            t += phi.apply(&sub).coefficient(i);
        }
        traces.push(t);
    }
    Ok(traces)
}

/// Both routes of the normalization property for `U = K`: the chain-level
/// index and the Lefschetz number of the induced map on integral homology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationCheck {
    pub chain_level: IndexResult,
    pub homology_level: BigInt,
}

impl NormalizationCheck {
    pub fn holds(&self) -> bool {
        self.chain_level.value == self.homology_level
    }
}

pub fn normalization_check(p: &IndexProblem) -> Result<NormalizationCheck, IndexError> {
    if !p.open_set.is_whole() {
        return Err(IndexError::OpenSetLevel(p.levels().1));
    }
    let chain_level = fixed_point_index(p)?;
    let (l, k) = p.levels();
    let b = subdivision_chain_map(&p.tower, k, l)?;
    let carrier = p.approximation.carrier();
    let b = b.rebase(b.source().clone(), carrier.source_chains().clone())?;
    let psi = p.approximation.map().compose(&b)?;
    let psi = psi.rebase(carrier.target_chains().clone(), carrier.target_chains().clone())?;
    let basis = HomologyBasis::new(carrier.target_chains().clone());
    let induced = induced_map_on_homology(&psi, &basis)?;
    Ok(NormalizationCheck {
        chain_level,
        homology_level: induced.lefschetz.value,
    })
}

/// Index at levels `k` and `k + 1` with the same open set.
pub fn index_stability(
    model: &dyn MapModel,
    u: &OpenPolyhedralSet,
    j: usize,
    k: usize,
) -> Result<(IndexResult, IndexResult), IndexError> {
    let at = |level: usize| -> Result<IndexResult, IndexError> {
        let lifted = lift_open_set(model.source(), u, j, level)?;
        fixed_point_index(&IndexProblem::from_model(model, lifted, level)?)
    };
    Ok((at(k)?, at(k + 1)?))
}

/// An open set given as a union of open simplices of one level, closed
/// under cofaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenCellSet {
    pub level: usize,
    pub cells: BTreeSet<Simplex>,
}

impl OpenCellSet {
    pub fn new(complex: &SimplicialComplex, level: usize, cells: BTreeSet<Simplex>) -> Result<Self, IndexError> {
        for c in &cells {
            if !complex.contains(c) {
                return Err(ComplexError::NotFound(c.clone()).into());
            }
            if complex.cofaces(c).any(|(_, t)| !cells.contains(t)) {
                return Err(IndexError::NotOpen);
            }
        }
        Ok(OpenCellSet { level, cells })
    }

    pub fn from_polyhedral(u: &OpenPolyhedralSet, level: usize) -> Self {
        let cells = u
            .closure()
            .iter()
            .filter(|(id, _)| !u.boundary().contains_id(*id))
            .map(|(_, s)| s.clone())
            .collect();
        OpenCellSet { level, cells }
    }

    fn contains_cell_at(&self, rec: &SubdivisionRecord, s: &Simplex) -> Result<bool, ComplexError> {
        Ok(self.cells.contains(&rec.carrier_at(s, self.level)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralIndex {
    pub result: IndexResult,
    /// Level and closure of the polyhedral set actually used.
    pub level: usize,
    pub closure: Vec<Simplex>,
}

/// Index on an arbitrary open set `V`: the first level `k` (from `start`
/// to `cap`) at which the full subcomplex on the vertices inside `V` gives
/// an open set `U` with no suspicious simplex over `V \ U`.
pub fn index_on_general_open_set(
    model: &dyn MapModel,
    v: &OpenCellSet,
    start: usize,
    cap: usize,
) -> Result<GeneralIndex, IndexError> {
    let tower = model.source().clone();
    for k in start.max(v.level)..=cap {
        let rec = tower.at_level(k)?;
        let complex = rec.complex().clone();
        let mut inside = BTreeSet::new();
        for (id, s) in complex.iter() {
            if v.contains_cell_at(rec, s)? {
                inside.insert(id);
            }
        }
        let ids: Vec<SimplexId> = complex
            .iter()
            .filter(|(_, s)| {
                s.vertices()
                    .iter()
                    .all(|&w| inside.contains(&complex.id_of(&Simplex::vertex(w)).expect("vertex")))
            })
            .map(|(id, _)| id)
            .collect();
        let closure = Subcomplex::new(complex.clone(), ids)?;
        let u = OpenPolyhedralSet::from_subcomplex(closure);
        let open_cells: BTreeSet<SimplexId> = u.closure().ids().filter(|id| !u.boundary().contains_id(*id)).collect();
        if open_cells.is_empty() {
            continue;
        }
        let l = model.source_level_for(k);
        let problem = IndexProblem::from_model(model, u.clone(), k)?;
        let (suspicious, _) = suspicious_over(&tower, problem.approximation.carrier(), l, k, |c| {
            let id = complex.id_of(c).expect("carrier at level k");
            inside.contains(&id) && !open_cells.contains(&id)
        })?;
        if !suspicious.is_empty() {
            continue;
        }
        let result = fixed_point_index(&problem)?;
        return Ok(GeneralIndex {
            result,
            level: k,
            closure: u.closure().maximal_simplices(),
        });
    }
    Err(IndexError::ResolutionExhausted(cap))
}

/// Suspicious simplices over the given open cells of level `k`, for the
/// canonical problem of `model` at that level.
pub fn suspicious_in(model: &dyn MapModel, k: usize, cells: &BTreeSet<Simplex>) -> Result<Vec<Simplex>, IndexError> {
    let l = model.source_level_for(k);
    let carrier = model.carrier(l, k)?;
    Ok(suspicious_over(model.source(), &carrier, l, k, |c| cells.contains(c))?.0)
}

/// Open cells of `Ū` not in `∂U`.
pub fn interior_cells(u: &OpenPolyhedralSet) -> BTreeSet<Simplex> {
    u.closure()
        .iter()
        .filter(|(id, _)| !u.boundary().contains_id(*id))
        .map(|(_, s)| s.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axiom {
    Additivity,
    Homotopy,
    Commutativity,
    Normalization,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomStatus {
    Pass,
    Fail,
    Skipped(String),
}

/// One axiom instance with the values of both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub instance: String,
    pub status: AxiomStatus,
    pub lhs: Option<BigInt>,
    pub rhs: Option<BigInt>,
}

impl AxiomOutcome {
    fn compare(axiom: Axiom, instance: &str, lhs: BigInt, rhs: BigInt) -> Self {
        let status = if lhs == rhs {
            AxiomStatus::Pass
        } else {
            AxiomStatus::Fail
        };
        AxiomOutcome {
            axiom,
            instance: instance.into(),
            status,
            lhs: Some(lhs),
            rhs: Some(rhs),
        }
    }

    fn skipped(axiom: Axiom, instance: &str, why: impl Into<String>) -> Self {
        AxiomOutcome {
            axiom,
            instance: instance.into(),
            status: AxiomStatus::Skipped(why.into()),
            lhs: None,
            rhs: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == AxiomStatus::Pass
    }
}

fn skip_on_hypothesis(axiom: Axiom, instance: &str, e: IndexError) -> Result<AxiomOutcome, IndexError> {
    match e {
        IndexError::Inadmissible(r) => Ok(AxiomOutcome::skipped(
            axiom,
            instance,
            alloc::format!("not admissible ({} suspicious simplices)", r.suspicious.len()),
        )),
        other => Err(other),
    }
}

/// `I(U) = I(U1) + I(U2)` for disjoint `U1, U2 ⊂ U` at level `k` carrying
/// all fixed points.
pub fn check_additivity(
    instance: &str,
    model: &dyn MapModel,
    u: &OpenPolyhedralSet,
    u1: &OpenPolyhedralSet,
    u2: &OpenPolyhedralSet,
    k: usize,
) -> Result<AxiomOutcome, IndexError> {
    let axiom = Axiom::Additivity;
    let (i, i1, i2) = (interior_cells(u), interior_cells(u1), interior_cells(u2));
    if !i1.is_disjoint(&i2) || !i1.is_subset(&i) || !i2.is_subset(&i) {
        return Ok(AxiomOutcome::skipped(
            axiom,
            instance,
            "U1, U2 are not disjoint subsets of U",
        ));
    }
    let rest: BTreeSet<Simplex> = i
        .iter()
        .filter(|c| !i1.contains(c) && !i2.contains(c))
        .cloned()
        .collect();
    let s = suspicious_in(model, k, &rest)?;
    if !s.is_empty() {
        return Ok(AxiomOutcome::skipped(
            axiom,
            instance,
            "possible fixed points outside U1 and U2",
        ));
    }
    let index = |set: &OpenPolyhedralSet| -> Result<BigInt, IndexError> {
        Ok(fixed_point_index(&IndexProblem::from_model(model, set.clone(), k)?)?.value)
    };
    let values = (|| Ok::<_, IndexError>((index(u)?, index(u1)?, index(u2)?)))();
    match values {
        Ok((a, b, c)) => Ok(AxiomOutcome::compare(axiom, instance, a, b + c)),
        Err(e) => skip_on_hypothesis(axiom, instance, e),
    }
}

/// Index of both ends of a prism homotopy, each computed from the
/// approximation the prism restricts to and from the canonical one.
pub fn check_homotopy(
    instance: &str,
    tower: &Arc<SubdivisionRecord>,
    u: &OpenPolyhedralSet,
    c0: &Arc<AcyclicCarrier>,
    c1: &Arc<AcyclicCarrier>,
    h: &Arc<AcyclicCarrier>,
) -> Result<AxiomOutcome, IndexError> {
    let axiom = Axiom::Homotopy;
    let (l, k) = c0.levels();
    // every slice must be admissible: check the prism values over the collar
    let prism = crate::carrier::Prism::new(c0.source().clone());
    let rec = tower.at_level(l)?;
    let coarse = tower.complex_at(k)?.clone();
    let boundary = u.boundary();
    for (cid, cell) in h.source().iter() {
        let (s, _) = prism.project(cell);
        let c = rec.carrier_at(&s, k)?;
        if !u.closure().contains(&c) {
            continue;
        }
        let touches = s.vertices().iter().any(|&v| {
            rec.carrier_at(&Simplex::vertex(v), k)
                .is_ok_and(|cv| boundary.contains(&cv))
        });
        if touches && coarse.closed_star(&c)?.meets(h.value(cid)) {
            return Ok(AxiomOutcome::skipped(
                axiom,
                instance,
                "homotopy may have fixed points on the boundary",
            ));
        }
    }
    let ph = crate::carrier::prism_homotopy_carrier(c0, c1, h)?;
    let ends = (|| {
        let a0 = fixed_point_index(&IndexProblem::with_approximation(
            tower.clone(),
            u.clone(),
            ph.bottom.clone(),
        )?)?;
        let a1 = fixed_point_index(&IndexProblem::with_approximation(
            tower.clone(),
            u.clone(),
            ph.top.clone(),
        )?)?;
        let n0 = fixed_point_index(&IndexProblem::new(tower.clone(), u.clone(), c0.clone())?)?;
        let n1 = fixed_point_index(&IndexProblem::new(tower.clone(), u.clone(), c1.clone())?)?;
        Ok::<_, IndexError>((a0.value, a1.value, n0.value, n1.value))
    })();
    match ends {
        Ok((a0, a1, n0, n1)) => {
            let mut out = AxiomOutcome::compare(axiom, instance, a0.clone(), a1.clone());
            if a0 != n0 || a1 != n1 {
                out.status = AxiomStatus::Fail;
            }
            Ok(out)
        }
        Err(e) => skip_on_hypothesis(axiom, instance, e),
    }
}

/// `I(L, F1 F2, F2⁻¹(W)) = I(K, F2 F1, W)`.
///
/// `F2⁻¹(W)` is represented at the source level of `F2` by the open cells
/// whose value lies in `W`. The side condition is replaced by a stronger
/// test: `F1 F2` must have no suspicious simplex anywhere outside that set,
/// and `F2 F1` none on `∂W`.
pub fn check_commutativity(
    instance: &str,
    f1: Arc<dyn MapModel>,
    f2: Arc<dyn MapModel>,
    w: &OpenPolyhedralSet,
    k: usize,
) -> Result<AxiomOutcome, IndexError> {
    let axiom = Axiom::Commutativity;
    let w_cells: BTreeSet<SimplexId> = w.closure().ids().filter(|id| !w.boundary().contains_id(*id)).collect();
    // preimage of W under F2 at the level F2 needs for target level k
    let l2 = f2.source_level_for(k);
    let c2 = f2.carrier(l2, k)?;
    let pre_ids: Vec<SimplexId> = c2
        .values()
        .filter(|(_, _, v)| v.ids().all(|id| w_cells.contains(&id)))
        .map(|(id, _, _)| id)
        .collect();
    let pre = OpenPolyhedralSet::from_subcomplex(Subcomplex::new(c2.source().clone(), pre_ids)?);
    let pre_cells = interior_cells(&pre);

    let k_side = CompositeModel::new(alloc::vec![f1.clone(), f2.clone()])?;
    let l_side = CompositeModel::new(alloc::vec![f2, f1])?;
    let outside: BTreeSet<Simplex> = l_side
        .source()
        .complex_at(l2)?
        .iter()
        .map(|(_, s)| s.clone())
        .filter(|s| !pre_cells.contains(s))
        .collect();
    if !suspicious_in(&l_side, l2, &outside)?.is_empty() {
        return Ok(AxiomOutcome::skipped(
            axiom,
            instance,
            "F1 F2 may have fixed points outside the preimage of W",
        ));
    }
    let values = (|| {
        let lhs = fixed_point_index(&IndexProblem::from_model(&l_side, pre.clone(), l2)?)?;
        let rhs = fixed_point_index(&IndexProblem::from_model(&k_side, w.clone(), k)?)?;
        Ok::<_, IndexError>((lhs.value, rhs.value))
    })();
    match values {
        Ok((a, b)) => Ok(AxiomOutcome::compare(axiom, instance, a, b)),
        Err(e) => skip_on_hypothesis(axiom, instance, e),
    }
}

/// Chain-level index on `U = K` against the Lefschetz number on homology.
pub fn check_normalization(instance: &str, model: &dyn MapModel, k: usize) -> Result<AxiomOutcome, IndexError> {
    let whole = OpenPolyhedralSet::whole(model.source().complex_at(k)?.clone());
    let p = IndexProblem::from_model(model, whole, k)?;
    let n = normalization_check(&p)?;
    Ok(AxiomOutcome::compare(
        Axiom::Normalization,
        instance,
        n.chain_level.value,
        n.homology_level,
    ))
}

/// A polyhedron `K` with a subcomplex `X` and a simplicial retraction
/// `r : K → X` (so `r ∘ s = id` for the inclusion `s`).
#[derive(Debug, Clone)]
pub struct DominationData {
    pub k_tower: Arc<SubdivisionRecord>,
    pub x_tower: Arc<SubdivisionRecord>,
    pub retraction: BTreeMap<Vertex, Vertex>,
}

impl DominationData {
    /// `x_tower` must be a tower over a subcomplex of the base of `k_tower`
    /// with the same vertex labels.
    pub fn new(
        k_tower: Arc<SubdivisionRecord>,
        x_tower: Arc<SubdivisionRecord>,
        retraction: BTreeMap<Vertex, Vertex>,
    ) -> Result<Self, IndexError> {
        let k = k_tower.base_complex().clone();
        let x = x_tower.base_complex().clone();
        for (_, s) in x.iter() {
            if !k.contains(s) {
                return Err(IndexError::InvalidRetraction(alloc::format!("{s} is not in K")));
            }
        }
        for v in k.vertices() {
            match retraction.get(&v) {
                Some(w) if x.contains_vertex(*w) => {}
                _ => {
                    return Err(IndexError::InvalidRetraction(alloc::format!(
                        "vertex {v} has no image in X"
                    )))
                }
            }
        }
        for v in x.vertices() {
            if retraction[&v] != v {
                return Err(IndexError::InvalidRetraction(alloc::format!(
                    "r(s({v})) = {} is not {v}",
                    retraction[&v]
                )));
            }
        }
        for (_, s) in k.iter() {
            let mut image: Vec<Vertex> = s.vertices().iter().map(|v| retraction[v]).collect();
            image.sort_unstable();
            image.dedup();
            let t = Simplex::new(image).expect("nonempty");
            if !x.contains(&t) {
                return Err(IndexError::InvalidRetraction(alloc::format!(
                    "image of {s} is not a simplex of X"
                )));
            }
        }
        Ok(DominationData {
            k_tower,
            x_tower,
            retraction,
        })
    }

    fn inclusion(&self) -> BTreeMap<Vertex, Vertex> {
        self.x_tower.base_complex().vertices().map(|v| (v, v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominationResult {
    /// Index of `s ∘ F ∘ r` on `r⁻¹(U)` in `K`.
    pub via_retraction: IndexResult,
    /// Index of `F` on `U` in `X`.
    pub direct: IndexResult,
}

impl DominationResult {
    pub fn agrees(&self) -> bool {
        self.via_retraction.value == self.direct.value
    }
}

/// Index of a map of `X` through the polyhedron `K` dominating it.
pub fn index_via_domination(
    d: &DominationData,
    f: Arc<dyn MapModel>,
    u: &OpenPolyhedralSet,
    k: usize,
) -> Result<DominationResult, IndexError> {
    if !same_complex(f.source().base_complex(), d.x_tower.base_complex())
        || !same_complex(f.target().base_complex(), d.x_tower.base_complex())
    {
        return Err(IndexError::NotSelfMap);
    }
    let direct = fixed_point_index(&IndexProblem::from_model(f.as_ref(), u.clone(), k)?)?;
    let r = SimplicialModel::new(d.k_tower.clone(), d.x_tower.clone(), &d.retraction)?;
    let s = SimplicialModel::new(d.x_tower.clone(), d.k_tower.clone(), &d.inclusion())?;
    // r⁻¹(U) at level k: open cells of K^k whose image is an open cell of U
    let rk = r.level_map(k)?.clone();
    let u_cells = interior_cells(u);
    let kk = d.k_tower.complex_at(k)?.clone();
    let mut pre = BTreeSet::new();
    for (id, sx) in kk.iter() {
        let mut image: Vec<Vertex> = sx.vertices().iter().map(|v| rk[v]).collect();
        image.sort_unstable();
        image.dedup();
        if u_cells.contains(&Simplex::new(image).expect("nonempty")) {
            pre.insert(id);
        }
    }
    let closure_ids: BTreeSet<SimplexId> = pre
        .iter()
        .flat_map(|id| kk.simplex(*id).faces())
        .map(|f| kk.id_of(&f).expect("face"))
        .collect();
    let w = OpenPolyhedralSet::from_subcomplex(Subcomplex::new(kk.clone(), closure_ids)?);
    let w_cells: BTreeSet<SimplexId> = w.closure().ids().filter(|id| !w.boundary().contains_id(*id)).collect();
    if w_cells != pre {
        return Err(IndexError::InvalidRetraction(
            "preimage of U is not an open polyhedral set at this level".into(),
        ));
    }
    let g = CompositeModel::new(alloc::vec![Arc::new(r) as Arc<dyn MapModel>, f, Arc::new(s)])?;
    let via_retraction = fixed_point_index(&IndexProblem::from_model(&g, w, k)?)?;
    Ok(DominationResult { via_retraction, direct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::{build_chain_approximation, FixedCarrierModel};
    use crate::chain::{is_chain_map, lefschetz_number};
    use alloc::vec;

    fn complex(maximal: &[&[usize]]) -> Arc<SimplicialComplex> {
        Arc::new(SimplicialComplex::from_maximal(maximal.iter().map(|s| s.to_vec())).unwrap())
    }

    #[test]
    fn subdivision_of_an_edge() {
        let tower = SubdivisionRecord::tower(complex(&[&[0, 1]]), 2);
        let b = subdivision_chain_map(&tower, 0, 1).unwrap();
        // vertices 0, 1 stay, the midpoint is vertex 2: [0,1] ↦ [0,2] - [1,2]
        let image = b.image_of(SimplexId::new(1, 0)).to_formal(tower.complex_at(1).unwrap());
        assert_eq!(
            image,
            BTreeMap::from([
                (Simplex::new(vec![0, 2]).unwrap(), BigInt::one()),
                (Simplex::new(vec![1, 2]).unwrap(), -BigInt::one()),
            ])
        );
        let id = subdivision_chain_map(&tower, 1, 1).unwrap();
        assert_eq!(id, GradedIntegerMap::identity(id.source().clone()));
        assert!(subdivision_chain_map(&tower, 2, 1).is_err());
        let b02 = subdivision_chain_map(&tower, 0, 2).unwrap();
        let b12 = subdivision_chain_map(&tower, 1, 2).unwrap();
        let composed = b12.compose(&b).unwrap();
        assert_eq!(composed, b02);
    }

    #[test]
    fn subdivision_of_a_triangle() {
        let tower = SubdivisionRecord::tower(complex(&[&[0, 1, 2]]), 1);
        let b = subdivision_chain_map(&tower, 0, 1).unwrap();
        assert!(is_chain_map(&b).unwrap().holds());
        let image = b.image_of(SimplexId::new(2, 0));
        assert_eq!(image.coeffs().len(), 6);
        assert!(image
            .coeffs()
            .values()
            .all(|x| x == &BigInt::one() || x == &-BigInt::one()));
    }

    #[test]
    fn projections() {
        let k = complex(&[&[0, 1], &[1, 2]]);
        assert_eq!(
            projection(&OpenPolyhedralSet::whole(k.clone())),
            GradedIntegerMap::identity(ChainComplexData::shared(k.clone()))
        );
        let edge = Subcomplex::closure_of(k.clone(), [&Simplex::new(vec![0, 1]).unwrap()]);
        let p = projection(&OpenPolyhedralSet::from_subcomplex(edge));
        assert_eq!(p.matrix(0).trace() + p.matrix(1).trace(), BigInt::from(3));
        let empty = projection(&OpenPolyhedralSet::from_subcomplex(Subcomplex::empty(k)));
        assert!(empty.matrices().iter().all(SparseIntegerMatrix::is_zero));
    }

    #[test]
    fn identity_indices() {
        let disk = SubdivisionRecord::tower(complex(&[&[0, 1, 2]]), 2);
        let id = SimplicialModel::identity(disk.clone()).unwrap();
        let whole = OpenPolyhedralSet::whole(disk.complex_at(1).unwrap().clone());
        let r = fixed_point_index(&IndexProblem::from_model(&id, whole, 1).unwrap()).unwrap();
        assert_eq!(r.value, BigInt::one());
        let circle = SubdivisionRecord::tower(complex(&[&[0, 1], &[1, 2], &[0, 2]]), 1);
        let idc = SimplicialModel::identity(circle.clone()).unwrap();
        let whole = OpenPolyhedralSet::whole(circle.complex_at(0).unwrap().clone());
        let r = fixed_point_index(&IndexProblem::from_model(&idc, whole, 0).unwrap()).unwrap();
        assert_eq!(r.value, BigInt::zero());
    }

    #[test]
    fn identity_is_inadmissible_on_proper_sets() {
        let disk = SubdivisionRecord::tower(complex(&[&[0, 1, 2]]), 1);
        let id = SimplicialModel::identity(disk.clone()).unwrap();
        let level1 = disk.complex_at(1).unwrap().clone();
        let star = level1.closed_star(&Simplex::vertex(0)).unwrap();
        let u = OpenPolyhedralSet::from_subcomplex(star);
        let p = IndexProblem::from_model(&id, u, 1).unwrap();
        let report = check_admissible(&p).unwrap();
        assert!(!report.admissible);
        assert_eq!(report.suspicious.len(), report.checked);
        assert!(matches!(fixed_point_index(&p), Err(IndexError::Inadmissible(_))));
    }

    #[test]
    fn constant_carrier_on_a_ball() {
        // path 0..6 subdivided once; constant value at the middle vertex 3
        let path = complex(&[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 5], &[5, 6]]);
        let tower = SubdivisionRecord::tower(path.clone(), 2);
        let value = Subcomplex::closure_of(path.clone(), [&Simplex::vertex(3)]);
        let c = Arc::new(AcyclicCarrier::constant(path.clone(), path.clone(), value).unwrap());
        let model = FixedCarrierModel::new(tower.clone(), tower.clone(), c).unwrap();
        // ball: closure [1, 5] at level 0
        let ball = Subcomplex::closure_of(
            path.clone(),
            [1, 2, 3, 4]
                .iter()
                .map(|&i| Simplex::new(vec![i, i + 1]).unwrap())
                .collect::<Vec<_>>()
                .iter(),
        );
        let u = OpenPolyhedralSet::from_subcomplex(ball);
        let (a, b) = index_stability(&model, &u, 0, 0).unwrap();
        assert_eq!((a.value.clone(), b.value), (BigInt::one(), BigInt::one()));
        assert!(a.admissibility.admissible && a.admissibility.checked > 0);
    }

    #[test]
    fn full_value_disk() {
        let disk = complex(&[&[0, 1, 2]]);
        let tower = SubdivisionRecord::tower(disk.clone(), 1);
        let c = Arc::new(AcyclicCarrier::constant(disk.clone(), disk.clone(), Subcomplex::full(disk.clone())).unwrap());
        let model = FixedCarrierModel::new(tower.clone(), tower.clone(), c.clone()).unwrap();
        let n = check_normalization("full", &model, 0).unwrap();
        assert!(n.passed());
        assert_eq!(n.lhs, Some(BigInt::one()));
        let a = build_chain_approximation(&c, VertexRule::Least).unwrap();
        assert_eq!(lefschetz_number(a.map()).unwrap().value, BigInt::one());
    }

    #[test]
    fn retraction_checks() {
        let k = complex(&[&[0, 1], &[1, 2]]);
        let x = complex(&[&[0, 1]]);
        let kt = SubdivisionRecord::tower(k, 0);
        let xt = SubdivisionRecord::tower(x, 0);
        let good = BTreeMap::from([(0, 0), (1, 1), (2, 1)]);
        assert!(DominationData::new(kt.clone(), xt.clone(), good).is_ok());
        let moves_x = BTreeMap::from([(0, 1), (1, 0), (2, 0)]);
        assert!(matches!(
            DominationData::new(kt, xt, moves_x),
            Err(IndexError::InvalidRetraction(_))
        ));
    }
}
