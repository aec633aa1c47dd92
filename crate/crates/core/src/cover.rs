//! Finite covers by unions of open vertex stars, their nerves, and the
//! simplicial projections between nerves of refining covers.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::chain::{Chain, ChainComplexData, ChainError, GradedIntegerMap};
use crate::complex::{ComplexError, Simplex, SimplexId, SimplicialComplex, SubdivisionRecord, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("simplex {0} is not covered")]
    NotACover(Simplex),
    #[error("vertex {vertex} of element {element} is not in the space")]
    UnknownVertex { element: String, vertex: Vertex },
    #[error("element {0} is not contained in any element of the coarse cover")]
    NotARefinement(String),
    #[error("covers live on different towers")]
    DifferentSpaces,
}

/// Union of the open stars of `stars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverElement {
    pub name: String,
    pub stars: Vec<Vertex>,
}

impl CoverElement {
    pub fn new(name: impl Into<String>, mut stars: Vec<Vertex>) -> Self {
        stars.sort_unstable();
        stars.dedup();
        CoverElement {
            name: name.into(),
            stars,
        }
    }

    /// The open simplex of `s` lies in this element.
    pub fn contains_cell(&self, s: &Simplex) -> bool {
        s.vertices().iter().any(|v| self.stars.binary_search(v).is_ok())
    }
}

#[derive(Debug, Clone)]
pub struct FiniteCover {
    space: Arc<SubdivisionRecord>,
    elements: Vec<CoverElement>,
}

impl FiniteCover {
    pub fn new(space: Arc<SubdivisionRecord>, elements: Vec<CoverElement>) -> Result<Self, CoverError> {
        let complex = space.complex().clone();
        for e in &elements {
            if let Some(&v) = e.stars.iter().find(|v| !complex.contains_vertex(**v)) {
                return Err(CoverError::UnknownVertex {
                    element: e.name.clone(),
                    vertex: v,
                });
            }
        }
        for (_, s) in complex.iter() {
            if !elements.iter().any(|e| e.contains_cell(s)) {
                return Err(CoverError::NotACover(s.clone()));
            }
        }
        Ok(FiniteCover { space, elements })
    }

    pub fn space(&self) -> &Arc<SubdivisionRecord> {
        &self.space
    }

    pub fn level(&self) -> usize {
        self.space.level()
    }

    pub fn elements(&self) -> &[CoverElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Open simplices making up element `i`.
    pub fn cells(&self, i: usize) -> Vec<SimplexId> {
        let e = &self.elements[i];
        self.space
            .complex()
            .iter()
            .filter(|(_, s)| e.contains_cell(s))
            .map(|(id, _)| id)
            .collect()
    }

    /// Open simplices in the union of the given elements.
    pub fn union_cells(&self, elements: &BTreeSet<usize>) -> Vec<SimplexId> {
        self.space
            .complex()
            .iter()
            .filter(|(_, s)| elements.iter().any(|&i| self.elements[i].contains_cell(s)))
            .map(|(id, _)| id)
            .collect()
    }
}

/// One element per vertex of the complex, in vertex order.
pub fn star_cover(rec: &Arc<SubdivisionRecord>) -> FiniteCover {
    let elements = rec
        .complex()
        .vertices()
        .map(|v| CoverElement::new(v.to_string(), alloc::vec![v]))
        .collect();
    FiniteCover {
        space: rec.clone(),
        elements,
    }
}

/// Nerve with vertex `i` standing for element `i` of the cover.
#[derive(Debug, Clone)]
pub struct NerveComplex {
    cover: FiniteCover,
    complex: Arc<SimplicialComplex>,
}

impl NerveComplex {
    pub fn cover(&self) -> &FiniteCover {
        &self.cover
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    /// The nerve with each element index replaced by `label(i)`.
    pub fn relabel(&self, label: impl Fn(usize) -> Vertex) -> Result<SimplicialComplex, ComplexError> {
        SimplicialComplex::from_maximal(
            self.complex
                .maximal_simplices()
                .into_iter()
                .map(|s| s.vertices().iter().map(|&i| label(i)).collect::<Vec<_>>()),
        )
    }
}

/// Elements span a simplex when some open simplex of the space lies in all
/// of them; checking maximal simplices suffices.
pub fn nerve(cov: &FiniteCover) -> NerveComplex {
    let complex = cov.space.complex();
    let mut maximal = BTreeSet::new();
    for s in complex.maximal_simplices() {
        let members: Vec<usize> = (0..cov.elements.len())
            .filter(|&i| cov.elements[i].contains_cell(&s))
            .collect();
        if !members.is_empty() {
            maximal.insert(members);
        }
    }
    let nerve = SimplicialComplex::from_maximal(maximal).expect("element indices are distinct");
    NerveComplex {
        cover: cov.clone(),
        complex: Arc::new(nerve),
    }
}

/// Simplicial projection between nerves of a refining pair.
#[derive(Debug, Clone)]
pub struct RefinementProjection {
    /// Fine element index to coarse element index.
    pub vertex_map: Vec<usize>,
    pub chain_map: GradedIntegerMap,
}

fn element_within(fine: &FiniteCover, i: usize, coarse: &FiniteCover, j: usize) -> Result<bool, CoverError> {
    let e = &fine.elements[i];
    let f = &coarse.elements[j];
    for (_, s) in fine.space.complex().iter() {
        if !e.contains_cell(s) {
            continue;
        }
        let c = fine.space.carrier_at(s, coarse.level())?;
        if !f.contains_cell(&c) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sends each fine element to the first coarse element containing it.
pub fn refinement_projection(fine: &FiniteCover, coarse: &FiniteCover) -> Result<RefinementProjection, CoverError> {
    let same_tower = fine
        .space
        .complex_at(coarse.level())
        .is_ok_and(|c| **c == **coarse.space.complex());
    if !same_tower {
        return Err(CoverError::DifferentSpaces);
    }
    let mut vertex_map = Vec::with_capacity(fine.len());
    for i in 0..fine.len() {
        let mut found = None;
        for j in 0..coarse.len() {
            if element_within(fine, i, coarse, j)? {
                found = Some(j);
                break;
            }
        }
        vertex_map.push(found.ok_or_else(|| CoverError::NotARefinement(fine.elements[i].name.clone()))?);
    }
    let source = ChainComplexData::shared(nerve(fine).complex);
    let target = ChainComplexData::shared(nerve(coarse).complex);
    let chain_map = GradedIntegerMap::simplicial(source, target, |v| vertex_map.get(v).copied())?;
    Ok(RefinementProjection { vertex_map, chain_map })
}

/// Union of the supports of the simplices with nonzero coefficient, as a set
/// of element indices.
pub fn support(chain: &Chain, nerve: &NerveComplex) -> BTreeSet<usize> {
    chain
        .support()
        .flat_map(|id| nerve.complex.simplex(id).vertices().to_vec())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_bigint::BigInt;

    fn tower(maximal: &[&[usize]], levels: usize) -> Arc<SubdivisionRecord> {
        let c = SimplicialComplex::from_maximal(maximal.iter().map(|s| s.to_vec())).unwrap();
        SubdivisionRecord::tower(Arc::new(c), levels)
    }

    #[test]
    fn star_cover_sizes() {
        let circle = tower(&[&[0, 1], &[1, 2], &[0, 2]], 0);
        assert_eq!(star_cover(&circle).len(), 3);
        let edge = tower(&[&[0, 1]], 1);
        assert_eq!(star_cover(&edge).len(), 3);
        let empty = SubdivisionRecord::base(Arc::new(SimplicialComplex::empty()));
        assert!(star_cover(&empty).is_empty());
    }

    #[test]
    fn nerve_of_star_cover_is_the_complex() {
        for levels in 0..2 {
            let rec = tower(&[&[0, 1], &[1, 2], &[0, 2]], levels);
            let cov = star_cover(&rec);
            let n = nerve(&cov);
            let labels: Vec<Vertex> = rec.complex().vertices().collect();
            assert_eq!(&n.relabel(|i| labels[i]).unwrap(), &**rec.complex());
        }
    }

    #[test]
    fn small_nerves() {
        let path = tower(&[&[0, 1], &[1, 2], &[2, 3]], 0);
        let overlap = FiniteCover::new(
            path.clone(),
            vec![CoverElement::new("a", vec![0, 1]), CoverElement::new("b", vec![2, 3])],
        )
        .unwrap();
        assert_eq!(nerve(&overlap).complex().f_vector(), vec![2, 1]);
        let two = tower(&[&[0, 1], &[2, 3]], 0);
        let disjoint = FiniteCover::new(
            two,
            vec![CoverElement::new("a", vec![0, 1]), CoverElement::new("b", vec![2, 3])],
        )
        .unwrap();
        assert_eq!(nerve(&disjoint).complex().f_vector(), vec![2]);
        assert!(matches!(
            FiniteCover::new(path, vec![CoverElement::new("a", vec![0])]),
            Err(CoverError::NotACover(_))
        ));
    }

    #[test]
    fn projections() {
        let fine_rec = tower(&[&[0, 1], &[1, 2], &[0, 2]], 1);
        let coarse_rec = fine_rec.coarser().unwrap().clone();
        let fine = star_cover(&fine_rec);
        let coarse = star_cover(&coarse_rec);
        let id = refinement_projection(&coarse, &coarse).unwrap();
        assert_eq!(id.vertex_map, vec![0, 1, 2]);
        // the star of a barycenter lies in the star of each vertex of its
        // simplex; the first such vertex is the least one
        let p = refinement_projection(&fine, &coarse).unwrap();
        for (i, &j) in p.vertex_map.iter().enumerate() {
            let w: Vertex = fine_rec.complex().simplices(0)[i].vertices()[0];
            let origin = fine_rec.origin(w).unwrap();
            let coarse_vertex = coarse_rec.complex().simplices(0)[j].vertices()[0];
            assert_eq!(coarse_vertex, origin.vertices()[0]);
        }
        assert!(crate::chain::is_chain_map(&p.chain_map).unwrap().holds());
        assert!(matches!(
            refinement_projection(&coarse, &fine),
            Err(CoverError::DifferentSpaces)
        ));
    }

    #[test]
    fn non_refinement_has_witness() {
        let rec = tower(&[&[0, 1], &[1, 2], &[2, 3]], 0);
        let big = FiniteCover::new(rec.clone(), vec![CoverElement::new("all", vec![0, 1, 2, 3])]).unwrap();
        let small = star_cover(&rec);
        assert_eq!(
            refinement_projection(&big, &small).unwrap_err(),
            CoverError::NotARefinement("all".into())
        );
    }

    #[test]
    fn supports() {
        let rec = tower(&[&[0, 1], &[1, 2], &[0, 2]], 0);
        let n = nerve(&star_cover(&rec));
        assert!(support(&Chain::zero(0), &n).is_empty());
        assert_eq!(support(&Chain::simplex(0, 1), &n), BTreeSet::from([1]));
        let c = Chain::simplex(1, 0).sub(&Chain::simplex(1, 0));
        assert!(support(&c, &n).is_empty());
        let e = Chain::from_coeffs(1, [(2, BigInt::from(3))]);
        assert_eq!(support(&e, &n).len(), 2);
    }
}
