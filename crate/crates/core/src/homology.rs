//! Integral homology and cohomology via Smith normal form, explicit
//! generators, and maps induced on homology.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::chain::{
    is_chain_map, lefschetz_from_traces, same_complex, Chain, ChainComplexData, ChainError, GradedIntegerMap,
    LefschetzNumber, Verification,
};
use crate::matrix::SparseIntegerMatrix;
use crate::smith::{invariant_factors, smith_normal_form};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("not a chain map (fails at {})", .0.simplex)]
    NotAChainMap(crate::chain::Witness),
    #[error("chain is not a cycle")]
    NotACycle,
}

/// `Z^rank ⊕ Z/t_1 ⊕ ... ⊕ Z/t_m`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<alloc::string::String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(alloc::format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(alloc::format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Groups in degrees `0..dims`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomologyProfile {
    pub groups: Vec<HomologyGroup>,
}

impl HomologyProfile {
    pub fn is_trivial(&self) -> bool {
        self.groups.iter().all(HomologyGroup::is_trivial)
    }

    pub fn betti(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.rank).collect()
    }

    pub fn group(&self, q: usize) -> HomologyGroup {
        self.groups.get(q).cloned().unwrap_or_default()
    }
}

impl fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, g) in self.groups.iter().enumerate() {
            if q > 0 {
                write!(f, ", ")?;
            }
            write!(f, "H{q} = {g}")?;
        }
        Ok(())
    }
}

fn group_from(n: usize, rank_out: usize, factors_in: &[BigInt]) -> HomologyGroup {
    HomologyGroup {
        rank: n - rank_out - factors_in.len(),
        torsion: factors_in.iter().filter(|d| !d.is_one()).cloned().collect(),
    }
}

/// Homology in every degree; `reduced` uses the augmented complex.
pub fn homology(cc: &ChainComplexData, reduced: bool) -> HomologyProfile {
    let dims = cc.dims();
    // factors[q] = invariant factors of ∂_q (q >= 1); ∂_0 is the augmentation
    let factors: Vec<Vec<BigInt>> = (0..=dims)
        .map(|q| {
            if q == 0 {
                if reduced && cc.rank(0) > 0 {
                    alloc::vec![BigInt::one()]
                } else {
                    Vec::new()
                }
            } else if q == dims {
                Vec::new()
            } else {
                invariant_factors(cc.boundary(q))
            }
        })
        .collect();
    let groups = (0..dims)
        .map(|q| group_from(cc.rank(q), factors[q].len(), &factors[q + 1]))
        .collect();
    HomologyProfile { groups }
}

/// Cohomology `H^q` for `q in 0..dims`, from the transposed boundaries.
pub fn cohomology(cc: &ChainComplexData) -> HomologyProfile {
    let dims = cc.dims();
    // cofactors[q] = invariant factors of δ^q = ∂_{q+1}^T
    let cofactors: Vec<Vec<BigInt>> = (0..dims)
        .map(|q| {
            if q + 1 < dims {
                invariant_factors(&cc.boundary(q + 1).transpose())
            } else {
                Vec::new()
            }
        })
        .collect();
    let groups = (0..dims)
        .map(|q| {
            let incoming: &[BigInt] = if q == 0 { &[] } else { &cofactors[q - 1] };
            group_from(cc.rank(q), cofactors[q].len(), incoming)
        })
        .collect();
    HomologyProfile { groups }
}

/// One degree of the universal coefficient comparison
/// `H^n ≅ Hom(H_n, Z) ⊕ Ext(H_{n-1}, Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UctCheck {
    pub degree: usize,
    pub cohomology: HomologyGroup,
    /// Rank of `Hom(H_n, Z)`.
    pub hom_rank: usize,
    /// Torsion of `Ext(H_{n-1}, Z)`.
    pub ext_torsion: Vec<BigInt>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UctReport {
    pub homology: HomologyProfile,
    pub cohomology: HomologyProfile,
    pub checks: Vec<UctCheck>,
}

impl UctReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

pub fn verify_uct(cc: &ChainComplexData) -> UctReport {
    let h = homology(cc, false);
    let co = cohomology(cc);
    let checks = co
        .groups
        .iter()
        .enumerate()
        .map(|(n, g)| {
            let hom_rank = h.group(n).rank;
            let ext_torsion = if n == 0 { Vec::new() } else { h.group(n - 1).torsion };
            UctCheck {
                degree: n,
                cohomology: g.clone(),
                hom_rank,
                holds: g.rank == hom_rank && g.torsion == ext_torsion,
                ext_torsion,
            }
        })
        .collect();
    UctReport {
        homology: h,
        cohomology: co,
        checks,
    }
}

/// Coordinates of a homology class: one integer per free generator and one
/// residue per torsion generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCoordinates {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

#[derive(Debug, Clone)]
struct BasisLayer {
    // kernel coordinates: (v · x)[kernel_start..]
    v: SparseIntegerMatrix,
    kernel_start: usize,
    // class coordinates: p_inv · kernel coordinates
    p_inv: SparseIntegerMatrix,
    // invariant factors of the boundaries expressed in kernel coordinates
    factors: Vec<BigInt>,
    free_gens: Vec<Chain>,
    torsion_gens: Vec<(Chain, BigInt)>,
}

/// Explicit generators of `H_q` for every degree, with a way to read off the
/// class of any cycle.
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    cc: Arc<ChainComplexData>,
    layers: Vec<BasisLayer>,
}

impl HomologyBasis {
    pub fn new(cc: Arc<ChainComplexData>) -> Self {
        let dims = cc.dims();
        let mut layers = Vec::with_capacity(dims);
        for q in 0..dims {
            let n = cc.rank(q);
            let (v, v_inv, r) = if q == 0 {
                (SparseIntegerMatrix::identity(n), SparseIntegerMatrix::identity(n), 0)
            } else {
                let s = smith_normal_form(cc.boundary(q));
                let r = s.rank();
                (s.v, s.v_inv, r)
            };
            let kernel: Vec<usize> = (r..n).collect();
            let all: Vec<usize> = (0..n).collect();
            // kernel basis K = columns r.. of v_inv
            let k_basis = v_inv.select(&all, &kernel);
            let next = cc.boundary_or_zero(q + 1);
            let m = v.mul(&next).select(&kernel, &(0..next.cols()).collect::<Vec<_>>());
            let s = smith_normal_form(&m);
            let factors = s.invariant_factors();
            let gens = k_basis.mul(&s.u);
            let mut free_gens = Vec::new();
            let mut torsion_gens = Vec::new();
            for i in 0..kernel.len() {
                let col = Chain::from_coeffs(q, gens.column(i));
                match factors.get(i) {
                    Some(d) if d.is_one() => {}
                    Some(d) => torsion_gens.push((col, d.clone())),
                    None => free_gens.push(col),
                }
            }
            layers.push(BasisLayer {
                v,
                kernel_start: r,
                p_inv: s.u_inv,
                factors,
                free_gens,
                torsion_gens,
            });
        }
        HomologyBasis { cc, layers }
    }

    pub fn chain_complex(&self) -> &Arc<ChainComplexData> {
        &self.cc
    }

    pub fn free_generators(&self, q: usize) -> &[Chain] {
        &self.layers[q].free_gens
    }

    pub fn torsion_generators(&self, q: usize) -> &[(Chain, BigInt)] {
        &self.layers[q].torsion_gens
    }

    pub fn profile(&self) -> HomologyProfile {
        HomologyProfile {
            groups: self
                .layers
                .iter()
                .map(|l| HomologyGroup {
                    rank: l.free_gens.len(),
                    torsion: l.torsion_gens.iter().map(|(_, d)| d.clone()).collect(),
                })
                .collect(),
        }
    }

    /// Class of a cycle in the generator basis.
    pub fn classify(&self, z: &Chain) -> Result<ClassCoordinates, HomologyError> {
        let q = z.dim();
        if q >= self.layers.len() {
            return Ok(ClassCoordinates {
                free: Vec::new(),
                torsion: Vec::new(),
            });
        }
        if q > 0 && !self.cc.boundary_of(z).is_zero() {
            return Err(HomologyError::NotACycle);
        }
        let l = &self.layers[q];
        let x = l.v.apply(z.coeffs());
        let kernel_coords = x
            .into_iter()
            .filter(|(i, _)| *i >= l.kernel_start)
            .map(|(i, c)| (i - l.kernel_start, c))
            .collect();
        let y = l.p_inv.apply(&kernel_coords);
        let n = l.p_inv.rows();
        let mut free = Vec::new();
        let mut torsion = Vec::new();
        for i in 0..n {
            let c = y.get(&i).cloned().unwrap_or_default();
            match l.factors.get(i) {
                Some(d) if d.is_one() => {}
                Some(d) => {
                    let mut r = c % d;
                    if r.is_negative() {
                        r += d;
                    }
                    torsion.push(r);
                }
                None => free.push(c),
            }
        }
        Ok(ClassCoordinates { free, torsion })
    }
}

/// Action of a chain map on one homology group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedLayer {
    /// `free[i][j]`: coefficient of free generator `i` in the image of free
    /// generator `j`.
    pub free: Vec<Vec<BigInt>>,
    pub torsion_orders: Vec<BigInt>,
    /// `torsion[i][j]`: residue on torsion generator `i` of the image of
    /// torsion generator `j`.
    pub torsion: Vec<Vec<BigInt>>,
}

impl InducedLayer {
    pub fn free_trace(&self) -> BigInt {
        (0..self.free.len()).map(|i| self.free[i][i].clone()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMap {
    pub layers: Vec<InducedLayer>,
    /// Alternating sum of the traces on the free parts.
    pub lefschetz: LefschetzNumber,
}

/// The map induced on homology by a chain self-map.
pub fn induced_map_on_homology(f: &GradedIntegerMap, basis: &HomologyBasis) -> Result<InducedMap, HomologyError> {
    if !same_complex(f.source().complex(), basis.cc.complex())
        || !same_complex(f.target().complex(), basis.cc.complex())
    {
        return Err(ChainError::Shape("induced map needs a self-map of the basis complex").into());
    }
    if let Verification::Fails(w) = is_chain_map(f)? {
        return Err(HomologyError::NotAChainMap(w));
    }
    let mut layers = Vec::new();
    for q in 0..basis.layers.len() {
        let l = &basis.layers[q];
        let mut free = alloc::vec![alloc::vec![BigInt::zero(); l.free_gens.len()]; l.free_gens.len()];
        for (j, g) in l.free_gens.iter().enumerate() {
            let c = basis.classify(&f.apply(g))?;
            for (i, x) in c.free.into_iter().enumerate() {
                free[i][j] = x;
            }
        }
        let t = l.torsion_gens.len();
        let mut torsion = alloc::vec![alloc::vec![BigInt::zero(); t]; t];
        for (j, (g, _)) in l.torsion_gens.iter().enumerate() {
            let c = basis.classify(&f.apply(g))?;
            for (i, x) in c.torsion.into_iter().enumerate() {
                torsion[i][j] = x;
            }
        }
        layers.push(InducedLayer {
            free,
            torsion_orders: l.torsion_gens.iter().map(|(_, d)| d.clone()).collect(),
            torsion,
        });
    }
    let lefschetz = lefschetz_from_traces(layers.iter().map(InducedLayer::free_trace).collect());
    Ok(InducedMap { layers, lefschetz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;
    use alloc::vec;
    use alloc::vec::Vec;

    fn cc(maximal: &[&[usize]]) -> Arc<ChainComplexData> {
        let c = SimplicialComplex::from_maximal(maximal.iter().map(|s| s.to_vec())).unwrap();
        ChainComplexData::shared(Arc::new(c))
    }

    fn rp2() -> Arc<ChainComplexData> {
        cc(&[
            &[0, 1, 2],
            &[0, 2, 3],
            &[0, 3, 4],
            &[0, 4, 5],
            &[0, 1, 5],
            &[1, 2, 4],
            &[2, 3, 5],
            &[1, 3, 4],
            &[1, 3, 5],
            &[2, 4, 5],
        ])
    }

    fn group(rank: usize, torsion: &[i64]) -> HomologyGroup {
        HomologyGroup {
            rank,
            torsion: torsion.iter().map(|&t| BigInt::from(t)).collect(),
        }
    }

    #[test]
    fn circle_and_disk() {
        let circle = cc(&[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(homology(&circle, false).betti(), vec![1, 1]);
        assert_eq!(homology(&circle, true).betti(), vec![0, 1]);
        let disk = cc(&[&[0, 1, 2]]);
        assert!(homology(&disk, true).is_trivial());
        assert!(!homology(&disk, false).is_trivial());
    }

    #[test]
    fn projective_plane() {
        let x = rp2();
        // 6 vertices, 15 edges, 10 triangles: Euler characteristic 1
        assert_eq!(x.complex().f_vector(), vec![6, 15, 10]);
        let h = homology(&x, false);
        assert_eq!(h.groups, vec![group(1, &[]), group(0, &[2]), group(0, &[])]);
        let co = cohomology(&x);
        assert_eq!(co.groups, vec![group(1, &[]), group(0, &[]), group(0, &[2])]);
        assert!(verify_uct(&x).holds());
        assert_eq!(alloc::format!("{h}"), "H0 = Z, H1 = Z/2, H2 = 0");
    }

    #[test]
    fn generators_of_circle() {
        let circle = cc(&[&[0, 1], &[1, 2], &[0, 2]]);
        let basis = HomologyBasis::new(circle.clone());
        let g = &basis.free_generators(1)[0];
        assert!(circle.is_cycle(g) || g.dim() == 1);
        assert_eq!(circle.boundary_of(g), Chain::zero(0));
        let c = basis.classify(g).unwrap();
        assert_eq!(c.free, vec![BigInt::one()]);
        // a boundary has class zero
        let disk = cc(&[&[0, 1, 2]]);
        let db = HomologyBasis::new(disk.clone());
        let z = disk.boundary_of(&Chain::simplex(2, 0));
        assert_eq!(db.classify(&z).unwrap().free, Vec::<BigInt>::new());
    }

    #[test]
    fn induced_by_reflection() {
        let circle = cc(&[&[0, 1], &[1, 2], &[0, 2]]);
        let basis = HomologyBasis::new(circle.clone());
        let swap = GradedIntegerMap::simplicial(circle.clone(), circle, |v| Some([0, 2, 1][v])).unwrap();
        let m = induced_map_on_homology(&swap, &basis).unwrap();
        assert_eq!(m.layers[0].free, vec![vec![BigInt::one()]]);
        assert_eq!(m.layers[1].free, vec![vec![BigInt::from(-1)]]);
        assert_eq!(m.lefschetz.value, BigInt::from(2));
        assert_eq!(crate::chain::lefschetz_number(&swap).unwrap().value, BigInt::from(2));
    }

    #[test]
    fn torsion_action_on_projective_plane() {
        let x = rp2();
        let basis = HomologyBasis::new(x.clone());
        assert_eq!(basis.torsion_generators(1).len(), 1);
        let id = GradedIntegerMap::identity(x);
        let m = induced_map_on_homology(&id, &basis).unwrap();
        assert_eq!(m.layers[1].torsion, vec![vec![BigInt::one()]]);
        assert_eq!(m.lefschetz.value, BigInt::one());
    }
}
