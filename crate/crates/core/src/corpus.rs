//! Standard complexes and map models shared by the tests and the CLI.
//!
//! Besides simplicial and constant carriers this module provides piecewise
//! linear multivalued maps of a path or a cycle ([`IntervalMap`]), which give
//! maps of any degree and isolated fixed points with prescribed local
//! behaviour.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::carrier::{prism_carrier, AcyclicCarrier, CarrierError, FixedCarrierModel, MapModel, SimplicialModel};
use crate::complex::{
    ComplexError, OpenPolyhedralSet, Simplex, SimplicialComplex, Subcomplex, SubdivisionRecord, Vertex,
};

fn build(maximal: Vec<Vec<Vertex>>) -> Arc<SimplicialComplex> {
    Arc::new(SimplicialComplex::from_maximal(maximal).expect("corpus complexes are well formed"))
}

pub fn point() -> Arc<SimplicialComplex> {
    build(vec![vec![0]])
}

pub fn edge() -> Arc<SimplicialComplex> {
    build(vec![vec![0, 1]])
}

/// Vertices `0..=n` joined in order.
pub fn path(n: usize) -> Arc<SimplicialComplex> {
    build((0..n).map(|i| vec![i, i + 1]).collect())
}

/// Vertices `0..n` joined in a cycle, `n >= 3`.
pub fn cycle(n: usize) -> Arc<SimplicialComplex> {
    assert!(n >= 3, "a cycle needs three vertices");
    build((0..n).map(|i| vec![i, (i + 1) % n]).collect())
}

pub fn hexagon() -> Arc<SimplicialComplex> {
    cycle(6)
}

pub fn disk() -> Arc<SimplicialComplex> {
    build(vec![vec![0, 1, 2]])
}

pub fn sphere() -> Arc<SimplicialComplex> {
    build(vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
}

/// Boundary of the `n`-simplex.
pub fn simplex_boundary(n: usize) -> Arc<SimplicialComplex> {
    build((0..=n).map(|skip| (0..=n).filter(|&v| v != skip).collect()).collect())
}

/// Seven-vertex torus.
pub fn torus() -> Arc<SimplicialComplex> {
    let mut t = Vec::new();
    for i in 0..7 {
        t.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        t.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    build(t)
}

/// Six-vertex projective plane.
pub fn projective_plane() -> Arc<SimplicialComplex> {
    build(vec![
        vec![0, 1, 2],
        vec![0, 2, 3],
        vec![0, 3, 4],
        vec![0, 4, 5],
        vec![0, 1, 5],
        vec![1, 2, 4],
        vec![2, 3, 5],
        vec![1, 3, 4],
        vec![1, 3, 5],
        vec![2, 4, 5],
    ])
}

/// A 4 x 4 grid with the rows glued after a flip.
pub fn klein_bottle() -> Arc<SimplicialComplex> {
    const N: usize = 4;
    let id = |i: usize, j: usize| -> Vertex {
        if i == N {
            (N - j) % N
        } else {
            i * N + j % N
        }
    };
    let mut t = Vec::new();
    for i in 0..N {
        for j in 0..N {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            t.push(vec![a, b, d]);
            t.push(vec![a, c, d]);
        }
    }
    build(t)
}

/// Projective plane and a disjoint triangle boundary.
pub fn projective_plane_and_circle() -> Arc<SimplicialComplex> {
    Arc::new(projective_plane().disjoint_union(&cycle(3)))
}

/// Triangle boundary `0 1 2` inside an outer triangle boundary `3 4 5`.
pub fn annulus() -> Arc<SimplicialComplex> {
    let mut t = Vec::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        t.push(vec![i, j, i + 3]);
        t.push(vec![j, i + 3, j + 3]);
    }
    build(t)
}

/// Retraction of [`annulus`] onto its inner circle.
pub fn annulus_retraction() -> BTreeMap<Vertex, Vertex> {
    (0..6).map(|v| (v, v % 3)).collect()
}

/// Every complex of the corpus, by name.
pub fn complexes() -> Vec<(&'static str, Arc<SimplicialComplex>)> {
    vec![
        ("point", point()),
        ("edge", edge()),
        ("path", path(4)),
        ("triangle-boundary", cycle(3)),
        ("hexagon", hexagon()),
        ("disk", disk()),
        ("sphere", sphere()),
        ("torus", torus()),
        ("projective-plane", projective_plane()),
        ("klein-bottle", klein_bottle()),
        ("projective-plane-and-circle", projective_plane_and_circle()),
        ("annulus", annulus()),
    ]
}

/// A closed interval `[lo, hi]` in base edge units.
pub type Interval = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntervalMapError {
    #[error("expected {expected} {what}, got {got}")]
    Count {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("interval ({0}, {1}) is reversed")]
    Reversed(i64, i64),
    #[error("limit on edge {edge} is not contained in the value at vertex {vertex}")]
    NotUpperSemicontinuous { edge: usize, vertex: usize },
    #[error("the base complex is not the expected path or cycle")]
    WrongBase,
    #[error("value leaves the path")]
    OutOfRange,
}

/// A multivalued map of the path `0..=n` or the cycle `0..n`.
///
/// Each base vertex has an interval value, and each base edge `[i, i + 1]`
/// has a start and an end interval contained in the values of its ends.
/// On the open edge the value interpolates linearly between the two. Values
/// of a cycle map are given in the universal cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalMap {
    n: usize,
    cyclic: bool,
    vertex_values: Vec<Interval>,
    edge_values: Vec<(Interval, Interval)>,
}

impl IntervalMap {
    pub fn new(
        n: usize,
        cyclic: bool,
        vertex_values: Vec<Interval>,
        edge_values: Vec<(Interval, Interval)>,
    ) -> Result<Self, IntervalMapError> {
        let vertices = if cyclic { n } else { n + 1 };
        if vertex_values.len() != vertices {
            return Err(IntervalMapError::Count {
                what: "vertex values",
                expected: vertices,
                got: vertex_values.len(),
            });
        }
        if edge_values.len() != n {
            return Err(IntervalMapError::Count {
                what: "edge values",
                expected: n,
                got: edge_values.len(),
            });
        }
        let m = IntervalMap {
            n,
            cyclic,
            vertex_values,
            edge_values,
        };
        for &(a, b) in m
            .vertex_values
            .iter()
            .chain(m.edge_values.iter().flat_map(|(s, e)| [s, e]))
        {
            if a > b {
                return Err(IntervalMapError::Reversed(a, b));
            }
        }
        for (e, &(s, t)) in m.edge_values.iter().enumerate() {
            let end = (e + 1) % vertices;
            if m.shift_into(m.vertex_values[e], s, 1).is_none() {
                return Err(IntervalMapError::NotUpperSemicontinuous { edge: e, vertex: e });
            }
            if m.shift_into(m.vertex_values[end], t, 1).is_none() {
                return Err(IntervalMapError::NotUpperSemicontinuous { edge: e, vertex: end });
            }
        }
        Ok(m)
    }

    /// `x ↦ a x + b`.
    pub fn linear(n: usize, cyclic: bool, a: i64, b: i64) -> Self {
        let vertices = if cyclic { n } else { n + 1 };
        let f = |x: usize| a * x as i64 + b;
        Self::new(
            n,
            cyclic,
            (0..vertices).map(|v| (f(v), f(v))).collect(),
            (0..n).map(|e| ((f(e), f(e)), (f(e + 1), f(e + 1)))).collect(),
        )
        .expect("linear maps are single valued")
    }

    /// Constant `low` left of `at`, the interval `[low, high]` at `at` and
    /// constant `high` to the right, on the path `0..=n`.
    pub fn step(n: usize, at: usize, low: i64, high: i64) -> Self {
        let v = |x: usize| match x.cmp(&at) {
            core::cmp::Ordering::Less => (low, low),
            core::cmp::Ordering::Equal => (low, high),
            core::cmp::Ordering::Greater => (high, high),
        };
        let e = |x: usize| {
            if x < at {
                ((low, low), (low, low))
            } else {
                ((high, high), (high, high))
            }
        };
        Self::new(n, false, (0..=n).map(v).collect(), (0..n).map(e).collect())
            .expect("step maps are upper semicontinuous")
    }

    /// Pointwise convex hull of two maps of the same space.
    pub fn hull(&self, other: &IntervalMap) -> Result<Self, IntervalMapError> {
        if self.n != other.n || self.cyclic != other.cyclic {
            return Err(IntervalMapError::WrongBase);
        }
        let join = |a: Interval, b: Interval| (a.0.min(b.0), a.1.max(b.1));
        Self::new(
            self.n,
            self.cyclic,
            self.vertex_values
                .iter()
                .zip(&other.vertex_values)
                .map(|(&a, &b)| join(a, b))
                .collect(),
            self.edge_values
                .iter()
                .zip(&other.edge_values)
                .map(|(&(s, e), &(t, f))| (join(s, t), join(e, f)))
                .collect(),
        )
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn vertex_values(&self) -> &[Interval] {
        &self.vertex_values
    }

    pub fn edge_values(&self) -> &[(Interval, Interval)] {
        &self.edge_values
    }

    /// `v` scaled by `unit` and moved by whole turns so that it contains
    /// `inner` (also scaled).
    fn shift_into(&self, v: Interval, inner: Interval, unit: i64) -> Option<Interval> {
        let (a, b) = (v.0 * unit, v.1 * unit);
        let (c, d) = (inner.0 * unit, inner.1 * unit);
        let shift = if self.cyclic {
            let turn = self.n as i64 * unit;
            (c - a).div_euclid(turn) * turn
        } else {
            0
        };
        (a + shift <= c && d <= b + shift).then_some((a + shift, b + shift))
    }

    /// Value at `x` units along base edge `e`, where one edge is `unit`
    /// units; both ends included.
    fn value_on_edge(&self, e: usize, x: i64, unit: i64) -> Interval {
        let vertices = self.vertex_values.len();
        let (s, t) = self.edge_values[e];
        if x == 0 {
            return self.shift_into(self.vertex_values[e], s, unit).expect("checked");
        }
        if x == unit {
            return self
                .shift_into(self.vertex_values[(e + 1) % vertices], t, unit)
                .expect("checked");
        }
        let lerp = |p: i64, q: i64| p * unit + (q - p) * x;
        (lerp(s.0, t.0), lerp(s.1, t.1))
    }
}

/// An [`IntervalMap`] on a tower over its path or cycle.
#[derive(Debug, Clone)]
pub struct IntervalModel {
    tower: Arc<SubdivisionRecord>,
    map: IntervalMap,
    extra: usize,
    // unit = 2^depth positions per base edge
    unit: i64,
    by_position: Vec<Vec<Vertex>>,
    positions: Vec<BTreeMap<Vertex, i64>>,
}

impl IntervalModel {
    /// Source level `k + extra` for target level `k`.
    pub fn new(tower: Arc<SubdivisionRecord>, map: IntervalMap, extra: usize) -> Result<Self, IntervalMapError> {
        let n = map.n;
        let expected = if map.cyclic { cycle(n) } else { path(n) };
        if **tower.base_complex() != *expected {
            return Err(IntervalMapError::WrongBase);
        }
        let depth = tower.level();
        let unit = 1i64 << depth;
        let mut by_position = Vec::with_capacity(depth + 1);
        let mut positions = Vec::with_capacity(depth + 1);
        for j in 0..=depth {
            let rec = tower.at_level(j).expect("level within the tower");
            let step = unit >> j;
            let count = n << j;
            let slots = if map.cyclic { count } else { count + 1 };
            let mut slot = vec![usize::MAX; slots];
            let mut pos = BTreeMap::new();
            for w in rec.complex().vertices() {
                let point = rec.coordinates(w).expect("vertex of the level");
                let coords = point.coords();
                let x = match coords {
                    [(v, _)] => *v as i64 * unit,
                    [(a, _), (b, cb)] => {
                        let frac = (cb * num_rational::BigRational::from_integer(unit.into()))
                            .to_integer()
                            .to_i64()
                            .expect("small positions");
                        if map.cyclic && *a == 0 && *b == n - 1 {
                            let ca = unit - frac;
                            (n as i64 - 1) * unit + ca
                        } else {
                            *a as i64 * unit + frac
                        }
                    }
                    _ => return Err(IntervalMapError::WrongBase),
                };
                slot[(x / step) as usize] = w;
                pos.insert(w, x);
            }
            by_position.push(slot);
            positions.push(pos);
        }
        Ok(IntervalModel {
            tower,
            map,
            extra,
            unit,
            by_position,
            positions,
        })
    }

    /// Same tower and levels with a different map.
    pub fn with_map(&self, map: IntervalMap) -> Result<Self, IntervalMapError> {
        if map.n != self.map.n || map.cyclic != self.map.cyclic {
            return Err(IntervalMapError::WrongBase);
        }
        Ok(IntervalModel { map, ..self.clone() })
    }

    pub fn map(&self) -> &IntervalMap {
        &self.map
    }

    /// Vertex at position `j` of level `k` (`2^k` positions per base edge).
    pub fn vertex_at(&self, k: usize, j: usize) -> Vertex {
        self.by_position[k][j]
    }

    /// Hull of the values over the closed simplex `s` of level `l`.
    fn hull(&self, l: usize, s: &Simplex) -> Interval {
        let unit = self.unit;
        let total = self.map.n as i64 * unit;
        let pos = &self.positions[l];
        let mut xs: Vec<i64> = s.vertices().iter().map(|v| pos[v]).collect();
        xs.sort_unstable();
        if xs.len() == 2 && self.map.cyclic && xs[0] == 0 && xs[1] != (unit >> l) {
            xs = vec![xs[1], total];
        }
        let e = ((xs[0] / unit) as usize).min(self.map.n - 1);
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for &x in &xs {
            let (a, b) = self.map.value_on_edge(e, x - e as i64 * unit, unit);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Closed cells of level `k` meeting `[lo, hi]`.
    fn cover(&self, k: usize, (lo, hi): Interval) -> Result<Vec<Simplex>, IntervalMapError> {
        let step = self.unit >> k;
        let count = (self.map.n << k) as i64;
        let slot = |j: i64| -> Result<Vertex, IntervalMapError> {
            let j = if self.map.cyclic {
                j.rem_euclid(count)
            } else if (0..=count).contains(&j) {
                j
            } else {
                return Err(IntervalMapError::OutOfRange);
            };
            Ok(self.by_position[k][j as usize])
        };
        let mut cells = Vec::new();
        for j in lo.div_euclid(step) - 1..=hi.div_euclid(step) + 1 {
            let x = j * step;
            if lo <= x && x <= hi {
                cells.push(Simplex::vertex(slot(j)?));
            }
            if x < hi && x + step > lo {
                let s = Simplex::new(vec![slot(j)?, slot(j + 1)?]).map_err(|_| IntervalMapError::OutOfRange)?;
                cells.push(s);
            }
        }
        Ok(cells)
    }

    /// The carrier value of the simplex `s` of level `l` at level `k`.
    pub fn value(&self, l: usize, k: usize, s: &Simplex) -> Result<Subcomplex, CarrierError> {
        let target = self.tower.complex_at(k)?.clone();
        let cells = self
            .cover(k, self.hull(l, s))
            .map_err(|_| CarrierError::ValueOutsideTarget(s.clone()))?;
        Ok(Subcomplex::closure_of(target, cells.iter()))
    }
}

impl MapModel for IntervalModel {
    fn source(&self) -> &Arc<SubdivisionRecord> {
        &self.tower
    }

    fn target(&self) -> &Arc<SubdivisionRecord> {
        &self.tower
    }

    fn source_level_for(&self, k: usize) -> usize {
        k + self.extra
    }

    fn carrier(&self, l: usize, k: usize) -> Result<AcyclicCarrier, CarrierError> {
        let source = self.tower.complex_at(l)?.clone();
        let target = self.tower.complex_at(k)?.clone();
        Ok(AcyclicCarrier::new(source, target, |s| self.value(l, k, s))?.with_levels(l, k))
    }
}

/// Rotation of a cycle tower by `r` steps.
pub fn rotation(tower: Arc<SubdivisionRecord>, r: usize) -> Result<SimplicialModel, CarrierError> {
    let n = tower.base_complex().count(0);
    let map = (0..n).map(|v| (v, (v + r) % n)).collect();
    SimplicialModel::new(tower.clone(), tower, &map)
}

/// `x ↦ n - x` on a path tower.
pub fn reflection(tower: Arc<SubdivisionRecord>) -> Result<SimplicialModel, CarrierError> {
    let n = tower.base_complex().count(0) - 1;
    let map = (0..=n).map(|v| (v, n - v)).collect();
    SimplicialModel::new(tower.clone(), tower, &map)
}

/// The doubling of the hexagon presented as the vertex map `i ↦ 2i mod 6`
/// from the first subdivision to the base.
pub fn hexagon_doubling(tower: Arc<SubdivisionRecord>) -> Result<FixedCarrierModel, CarrierError> {
    let fine = IntervalModel::new(tower.clone(), IntervalMap::linear(6, true, 1, 0), 0)
        .map_err(|_| CarrierError::LevelMismatch("tower is not over the hexagon"))?;
    let mut map = BTreeMap::new();
    for j in 0..12 {
        map.insert(fine.vertex_at(1, j), j % 6);
    }
    let c = AcyclicCarrier::from_simplicial_map(tower.complex_at(1)?.clone(), tower.complex_at(0)?.clone(), |v| {
        map.get(&v).copied()
    })?
    .with_levels(1, 0);
    FixedCarrierModel::new(tower.clone(), tower, Arc::new(c))
}

/// Every simplex goes to the closure of `value` in the base.
pub fn constant(tower: Arc<SubdivisionRecord>, value: &[Simplex]) -> Result<FixedCarrierModel, CarrierError> {
    let base = tower.base_complex().clone();
    let v = Subcomplex::closure_of(base.clone(), value.iter());
    let c = AcyclicCarrier::constant(base.clone(), base, v)?;
    FixedCarrierModel::new(tower.clone(), tower, Arc::new(c))
}

/// The open set with closure spanned by `maximal` at level `k`.
pub fn open_set(tower: &SubdivisionRecord, k: usize, maximal: &[Simplex]) -> Result<OpenPolyhedralSet, ComplexError> {
    let complex = tower.complex_at(k)?.clone();
    for s in maximal {
        if !complex.contains(s) {
            return Err(ComplexError::NotFound(s.clone()));
        }
    }
    Ok(OpenPolyhedralSet::from_subcomplex(Subcomplex::closure_of(
        complex,
        maximal.iter(),
    )))
}

/// The open interval `(a, b)` of a path or cycle model at level `k`, with
/// `a` and `b` in units of `2^-k` base edges.
pub fn interval_set(model: &IntervalModel, k: usize, a: i64, b: i64) -> OpenPolyhedralSet {
    let count = (model.map.n << k) as i64;
    let cells: Vec<Simplex> = (a..b)
        .map(|j| {
            let at = |j: i64| {
                model.vertex_at(
                    k,
                    j.rem_euclid(if model.map.cyclic { count } else { count + 1 }) as usize,
                )
            };
            Simplex::new(vec![at(j), at(j + 1)]).expect("distinct vertices")
        })
        .collect();
    open_set(&model.tower, k, &cells).expect("cells of the level")
}

/// A self-map model with an open set of its target level.
#[derive(Clone)]
pub struct SelfMapInstance {
    pub name: String,
    pub model: Arc<dyn MapModel>,
    pub open_set: OpenPolyhedralSet,
    pub level: usize,
}

impl core::fmt::Debug for SelfMapInstance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SelfMapInstance")
            .field("name", &self.name)
            .field("level", &self.level)
            .finish_non_exhaustive()
    }
}

fn whole(name: &str, model: Arc<dyn MapModel>, level: usize) -> SelfMapInstance {
    let u = OpenPolyhedralSet::whole(model.source().complex_at(level).expect("level").clone());
    SelfMapInstance {
        name: name.into(),
        model,
        open_set: u,
        level,
    }
}

/// Tower of the hexagon deep enough for every hexagon instance.
pub fn hexagon_tower() -> Arc<SubdivisionRecord> {
    SubdivisionRecord::tower(hexagon(), 4)
}

/// Tower of the path `0..=12`.
pub fn path_tower() -> Arc<SubdivisionRecord> {
    SubdivisionRecord::tower(path(12), 3)
}

/// Maps of the hexagon: `x ↦ d x + b`, with source levels refined by
/// `extra`.
pub fn hexagon_linear(tower: &Arc<SubdivisionRecord>, d: i64, b: i64, extra: usize) -> IntervalModel {
    IntervalModel::new(tower.clone(), IntervalMap::linear(6, true, d, b), extra).expect("hexagon tower")
}

/// Step map of the path `0..=12` with fixed points `3`, `6` and `9`.
pub fn path_step(tower: &Arc<SubdivisionRecord>) -> IntervalModel {
    IntervalModel::new(tower.clone(), IntervalMap::step(12, 6, 3, 9), 0).expect("path tower")
}

/// Self-maps with `U = K` at the given level.
pub fn whole_space_instances(level: usize) -> Vec<SelfMapInstance> {
    let hex = hexagon_tower();
    let path = path_tower();
    let disk_tower = SubdivisionRecord::tower(disk(), 3);
    let circle = SubdivisionRecord::tower(cycle(3), 2);
    let mut out = vec![
        whole(
            "identity-disk",
            Arc::new(SimplicialModel::identity(disk_tower.clone()).expect("identity")),
            level,
        ),
        whole(
            "identity-circle",
            Arc::new(SimplicialModel::identity(circle).expect("identity")),
            level,
        ),
        whole(
            "identity-hexagon",
            Arc::new(SimplicialModel::identity(hex.clone()).expect("identity")),
            level,
        ),
        whole(
            "constant-path",
            Arc::new(constant(path.clone(), &[Simplex::vertex(6)]).expect("constant")),
            level,
        ),
        whole(
            "full-value-disk",
            Arc::new(constant(disk_tower.clone(), &[Simplex::new(vec![0, 1, 2]).expect("simplex")]).expect("constant")),
            level,
        ),
        whole(
            "constant-edge-disk",
            Arc::new(constant(disk_tower, &[Simplex::new(vec![1, 2]).expect("simplex")]).expect("constant")),
            level,
        ),
        whole(
            "doubling-hexagon",
            Arc::new(hexagon_doubling(hex.clone()).expect("doubling")),
            level,
        ),
        whole("doubling-interval", Arc::new(hexagon_linear(&hex, 2, 0, 1)), level),
        whole("tripling", Arc::new(hexagon_linear(&hex, 3, 0, 2)), level),
        whole("quadrupling", Arc::new(hexagon_linear(&hex, 4, 0, 2)), level),
        whole("reverse-doubling", Arc::new(hexagon_linear(&hex, -2, 1, 1)), level),
        whole("rotation", Arc::new(rotation(hex.clone(), 1).expect("rotation")), level),
        whole("step", Arc::new(path_step(&path)), level),
        whole("reflection", Arc::new(reflection(path).expect("reflection")), level),
    ];
    if level == 0 {
        for (name, c) in [
            ("identity-torus", torus()),
            ("identity-projective-plane", projective_plane()),
        ] {
            let t = SubdivisionRecord::tower(c, 0);
            out.push(whole(
                name,
                Arc::new(SimplicialModel::identity(t).expect("identity")),
                0,
            ));
        }
    }
    out
}

/// Self-maps with a proper open set at the given level.
pub fn local_instances(level: usize) -> Vec<SelfMapInstance> {
    let hex = hexagon_tower();
    let path = path_tower();
    let s = 1i64 << level;
    let mut out = Vec::new();
    let step = path_step(&path);
    for (name, a, b) in [
        ("step-left", 1, 5),
        ("step-right", 7, 11),
        ("step-middle", 4, 8),
        ("step-all", 1, 11),
    ] {
        out.push(SelfMapInstance {
            name: name.into(),
            open_set: interval_set(&step, level, a * s, b * s),
            model: Arc::new(step.clone()),
            level,
        });
    }
    let triple = hexagon_linear(&hex, 3, 0, 2);
    out.push(SelfMapInstance {
        name: "tripling-near-3".into(),
        open_set: interval_set(&triple, level, 2 * s, 4 * s),
        model: Arc::new(triple.clone()),
        level,
    });
    let quad = hexagon_linear(&hex, 4, 0, 2);
    out.push(SelfMapInstance {
        name: "quadrupling-near-0".into(),
        open_set: interval_set(&quad, level, -s, s),
        model: Arc::new(quad),
        level,
    });
    let constant_model = constant(path.clone(), &[Simplex::vertex(6)]).expect("constant");
    let around = IntervalModel::new(path, IntervalMap::linear(12, false, 1, 0), 0).expect("path tower");
    out.push(SelfMapInstance {
        name: "constant-ball".into(),
        open_set: interval_set(&around, level, 4 * s, 8 * s),
        model: Arc::new(constant_model),
        level,
    });
    out
}

/// Two maps joined by a straight-line homotopy, with an open set.
pub struct HomotopyInstance {
    pub name: String,
    pub tower: Arc<SubdivisionRecord>,
    pub open_set: OpenPolyhedralSet,
    pub bottom: Arc<AcyclicCarrier>,
    pub top: Arc<AcyclicCarrier>,
    pub homotopy: Arc<AcyclicCarrier>,
}

fn interval_homotopy(
    name: &str,
    f0: &IntervalModel,
    f1: &IntervalMap,
    open_set: OpenPolyhedralSet,
    k: usize,
) -> Result<HomotopyInstance, CarrierError> {
    let bad = |_| CarrierError::LevelMismatch("maps of different spaces");
    let g = f0.with_map(f1.clone()).map_err(bad)?;
    let mix = f0.with_map(f0.map().hull(f1).map_err(bad)?).map_err(bad)?;
    let l = f0.source_level_for(k);
    let c0 = f0.carrier(l, k)?;
    let c1 = g.carrier(l, k)?;
    let (_, h) = prism_carrier(&c0, &c1, |s| mix.value(l, k, s))?;
    Ok(HomotopyInstance {
        name: name.into(),
        tower: f0.tower.clone(),
        open_set,
        bottom: Arc::new(c0),
        top: Arc::new(c1),
        homotopy: Arc::new(h),
    })
}

/// Prism homotopy instances at target level `k`.
pub fn homotopy_instances(k: usize) -> Result<Vec<HomotopyInstance>, CarrierError> {
    let hex = hexagon_tower();
    let path = path_tower();
    let s = 1i64 << k;
    let mut out = Vec::new();

    let double = hexagon_linear(&hex, 2, 0, 1);
    let whole_hex = OpenPolyhedralSet::whole(hex.complex_at(k)?.clone());
    out.push(interval_homotopy(
        "doubling-shift",
        &double,
        &IntervalMap::linear(6, true, 2, 1),
        whole_hex.clone(),
        k,
    )?);

    let id = hexagon_linear(&hex, 1, 0, 0);
    out.push(interval_homotopy(
        "rotation-identity",
        &id,
        &IntervalMap::linear(6, true, 1, 1),
        whole_hex,
        k,
    )?);

    let point = IntervalModel::new(path.clone(), IntervalMap::linear(12, false, 0, 3), 0).expect("path tower");
    let u = interval_set(&point, k, s, 6 * s);
    out.push(interval_homotopy(
        "moving-constant",
        &point,
        &IntervalMap::linear(12, false, 0, 4),
        u,
        k,
    )?);

    let step = path_step(&path);
    let u = interval_set(&step, k, 4 * s, 8 * s);
    out.push(interval_homotopy(
        "step-to-jump",
        &step,
        &IntervalMap::step(12, 6, 2, 10),
        u,
        k,
    )?);

    let disk_tower = SubdivisionRecord::tower(disk(), 2);
    let base = disk_tower.complex_at(k)?.clone();
    let dk = disk_tower.at_level(k)?;
    let corner = |v: Vertex| -> Result<Subcomplex, CarrierError> {
        let w = dk
            .complex()
            .vertices()
            .find(|&w| {
                dk.carrier_at(&Simplex::vertex(w), 0)
                    .is_ok_and(|c| c == Simplex::vertex(v))
            })
            .ok_or(CarrierError::LevelMismatch("missing corner"))?;
        Ok(Subcomplex::closure_of(base.clone(), [&Simplex::vertex(w)]))
    };
    let (p0, p2) = (corner(0)?, corner(2)?);
    let c0 = AcyclicCarrier::constant(base.clone(), base.clone(), p0.clone())?.with_levels(k, k);
    let c1 = AcyclicCarrier::constant(base.clone(), base.clone(), p2.clone())?.with_levels(k, k);
    let segment = dk.lift(
        &Subcomplex::closure_of(
            disk_tower.base_complex().clone(),
            [&Simplex::new(vec![0, 2]).expect("edge")],
        ),
        0,
    )?;
    let (_, h) = prism_carrier(&c0, &c1, |_| Ok(segment.clone()))?;
    out.push(HomotopyInstance {
        name: "constants-on-disk".into(),
        tower: disk_tower.clone(),
        open_set: OpenPolyhedralSet::whole(base),
        bottom: Arc::new(c0),
        top: Arc::new(c1),
        homotopy: Arc::new(h),
    });
    Ok(out)
}

/// A map with an open set split into two parts carrying every fixed point.
#[derive(Clone)]
pub struct AdditivityInstance {
    pub name: String,
    pub model: Arc<dyn MapModel>,
    pub whole: OpenPolyhedralSet,
    pub parts: (OpenPolyhedralSet, OpenPolyhedralSet),
    pub level: usize,
}

/// Additivity instances at target level `k >= 1`.
pub fn additivity_instances(k: usize) -> Vec<AdditivityInstance> {
    let hex = hexagon_tower();
    let path = path_tower();
    let s = 1i64 << k;
    let step = path_step(&path);
    let triple = hexagon_linear(&hex, 3, 0, 2);
    let quad = hexagon_linear(&hex, 4, 0, 2);
    let reverse = hexagon_linear(&hex, -2, 1, 1);
    let whole_hex = OpenPolyhedralSet::whole(hex.complex_at(k).expect("level").clone());
    vec![
        AdditivityInstance {
            name: "step".into(),
            whole: interval_set(&step, k, s, 11 * s),
            parts: (interval_set(&step, k, s, 5 * s), interval_set(&step, k, 5 * s, 11 * s)),
            model: Arc::new(step),
            level: k,
        },
        AdditivityInstance {
            name: "tripling".into(),
            whole: whole_hex.clone(),
            parts: (interval_set(&triple, k, -s, s), interval_set(&triple, k, 2 * s, 4 * s)),
            model: Arc::new(triple),
            level: k,
        },
        AdditivityInstance {
            name: "quadrupling".into(),
            whole: whole_hex,
            parts: (interval_set(&quad, k, -s, s), interval_set(&quad, k, s, 5 * s)),
            model: Arc::new(quad),
            level: k,
        },
        AdditivityInstance {
            name: "reverse-doubling".into(),
            whole: interval_set(&reverse, k, -s, 3 * s),
            parts: (
                interval_set(&reverse, k, -s, s),
                interval_set(&reverse, k, 3 * s / 2, 3 * s),
            ),
            model: Arc::new(reverse),
            level: k,
        },
    ]
}

/// `F1 : K → L`, `F2 : L → K` and an open set `W` of `K`.
#[derive(Clone)]
pub struct CommutativityInstance {
    pub name: String,
    pub f1: Arc<dyn MapModel>,
    pub f2: Arc<dyn MapModel>,
    pub w: OpenPolyhedralSet,
    pub level: usize,
}

/// Commutativity instances at target level `k >= 1`; the last one violates
/// the side condition.
pub fn commutativity_instances(k: usize) -> Vec<CommutativityInstance> {
    let hex = hexagon_tower();
    let path = path_tower();
    let s = 1i64 << k;
    let step = path_step(&path);
    let w = interval_set(&step, k, 4 * s, 8 * s);
    let double: Arc<dyn MapModel> = Arc::new(hexagon_doubling(hex.clone()).expect("doubling"));
    let rotate: Arc<dyn MapModel> = Arc::new(rotation(hex.clone(), 1).expect("rotation"));
    let reflect: Arc<dyn MapModel> = Arc::new(reflection(path).expect("reflection"));
    let step: Arc<dyn MapModel> = Arc::new(step);
    vec![
        CommutativityInstance {
            name: "doubling-rotation".into(),
            f1: double.clone(),
            f2: rotate.clone(),
            w: OpenPolyhedralSet::whole(hex.complex_at(k).expect("level").clone()),
            level: k,
        },
        CommutativityInstance {
            name: "rotation-doubling".into(),
            f1: rotate,
            f2: double,
            w: OpenPolyhedralSet::whole(hex.complex_at(k).expect("level").clone()),
            level: k,
        },
        CommutativityInstance {
            name: "step-reflection".into(),
            f1: step.clone(),
            f2: reflect.clone(),
            w: w.clone(),
            level: k,
        },
        CommutativityInstance {
            name: "reflection-step".into(),
            f1: reflect,
            f2: step,
            w,
            level: k,
        },
    ]
}
