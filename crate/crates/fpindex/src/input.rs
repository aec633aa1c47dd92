//! Input files. Complexes are text: one maximal simplex per line, vertices
//! separated by whitespace, `#` starts a comment. Everything else is JSON,
//! where a nested object may be replaced by a path relative to the file
//! that mentions it.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fpindex_core::carrier::{
    prism_carrier, AcyclicCarrier, CarrierError, CompositeModel, FixedCarrierModel, MapModel, SimplicialModel,
    VertexRule,
};
use fpindex_core::corpus::{interval_set, Interval, IntervalMap, IntervalModel};
use fpindex_core::cover::{CoverElement, FiniteCover};
use fpindex_core::index::{lift_open_set, OpenCellSet};
use fpindex_core::{OpenPolyhedralSet, Simplex, SimplicialComplex, Subcomplex, SubdivisionRecord};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(String),
    Inline(T),
}

/// A complex inside a JSON file: a path to a text file or the list of
/// maximal simplices.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComplexSource {
    Path(String),
    Inline(Vec<Vec<usize>>),
}

/// `whole`, a `closure` given by simplices of `level`, open `cells` of
/// `level` for a set that need not be polyhedral, or an `interval` `(a, b)`
/// of a path or cycle in units of `2^-level` edges.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSetFile {
    #[serde(default)]
    pub whole: bool,
    #[serde(default)]
    pub level: usize,
    #[serde(default)]
    pub closure: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub cells: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub interval: Option<(i64, i64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub simplex: Vec<usize>,
    pub value: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    pub at: usize,
    pub low: i64,
    pub high: i64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CarrierFile {
    /// Vertex map from level `source_level` to the base.
    Simplicial {
        map: Vec<(usize, usize)>,
        #[serde(default)]
        source_level: usize,
    },
    Constant {
        value: Vec<Vec<usize>>,
    },
    Table {
        #[serde(default)]
        source_level: usize,
        #[serde(default)]
        target_level: usize,
        values: Vec<TableEntry>,
        #[serde(default)]
        complete: bool,
    },
    /// Interval-valued map of a path or a cycle, in units of `2^-k`.
    Interval {
        #[serde(default)]
        extra: usize,
        #[serde(default)]
        linear: Option<(i64, i64)>,
        #[serde(default)]
        step: Option<StepFile>,
        #[serde(default)]
        vertices: Option<Vec<Interval>>,
        #[serde(default)]
        edges: Option<Vec<(Interval, Interval)>>,
    },
}

impl CarrierFile {
    /// The finest level the description refers to.
    pub fn declared_level(&self) -> usize {
        match self {
            CarrierFile::Simplicial { source_level, .. } => *source_level,
            CarrierFile::Table {
                source_level,
                target_level,
                ..
            } => (*source_level).max(*target_level),
            CarrierFile::Constant { .. } | CarrierFile::Interval { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum RuleFile {
    #[default]
    Least,
    Greatest,
}

impl From<RuleFile> for VertexRule {
    fn from(r: RuleFile) -> Self {
        match r {
            RuleFile::Least => VertexRule::Least,
            RuleFile::Greatest => VertexRule::Greatest,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopyFile {
    pub to: Source<CarrierFile>,
    /// Values over the cells joining both ends, keyed by base simplices;
    /// unlisted simplices are filled from their faces.
    #[serde(default)]
    pub mixed: Option<Vec<TableEntry>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleFile {
    pub complex: ComplexSource,
    /// Target subdivision level `k`.
    #[serde(default)]
    pub level: usize,
    #[serde(default)]
    pub open_set: Option<Source<OpenSetFile>>,
    /// Factors in order of application.
    pub carriers: Vec<Source<CarrierFile>>,
    #[serde(default)]
    pub rule: RuleFile,
    #[serde(default)]
    pub parts: Option<(Source<OpenSetFile>, Source<OpenSetFile>)>,
    #[serde(default)]
    pub homotopy: Option<HomotopyFile>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetractionFile {
    /// The dominating complex `K`.
    pub complex: ComplexSource,
    /// `r` on every vertex of `K`.
    pub map: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverElementFile {
    pub name: String,
    pub stars: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub complex: ComplexSource,
    #[serde(default)]
    pub level: usize,
    pub elements: Vec<CoverElementFile>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reads and parses a JSON file.
pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn resolve<T: DeserializeOwned + Clone>(source: &Source<T>, base: &Path) -> Result<T, CliError> {
    match source {
        Source::Inline(t) => Ok(t.clone()),
        Source::Path(p) => read(&base.join(p)),
    }
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Parses the text format; errors carry 1-based line numbers.
pub fn parse_complex(text: &str, name: &str) -> Result<SimplicialComplex, CliError> {
    let mut maximal = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default();
        if line.trim().is_empty() {
            continue;
        }
        let mut vs = Vec::new();
        for token in line.split_whitespace() {
            let v = token
                .parse::<usize>()
                .map_err(|_| CliError::Parse(format!("{name}:{}: '{token}' is not a vertex", n + 1)))?;
            vs.push(v);
        }
        let s = Simplex::new(vs).map_err(|e| CliError::Parse(format!("{name}:{}: {e}", n + 1)))?;
        maximal.push(s.vertices().to_vec());
    }
    if maximal.is_empty() {
        return Err(CliError::Parse(format!("{name}: no simplices")));
    }
    SimplicialComplex::from_maximal(maximal).map_err(|e| CliError::Parse(format!("{name}: {e}")))
}

pub fn load_complex(path: &Path) -> Result<Arc<SimplicialComplex>, CliError> {
    parse_complex(&read_text(path)?, &path.display().to_string()).map(Arc::new)
}

pub fn complex(source: &ComplexSource, base: &Path) -> Result<Arc<SimplicialComplex>, CliError> {
    match source {
        ComplexSource::Path(p) => load_complex(&base.join(p)),
        ComplexSource::Inline(list) => SimplicialComplex::from_maximal(list.iter().cloned())
            .map(Arc::new)
            .map_err(|e| CliError::Input(e.to_string())),
    }
}

fn simplex(vs: &[usize]) -> Result<Simplex, CliError> {
    Simplex::new(vs.to_vec()).map_err(|e| CliError::Input(e.to_string()))
}

/// Closure of `list` in `parent`; every simplex must exist.
fn closure(parent: &Arc<SimplicialComplex>, list: &[Vec<usize>]) -> Result<Subcomplex, CliError> {
    let s: Vec<Simplex> = list.iter().map(|s| simplex(s)).collect::<Result<_, _>>()?;
    if let Some(missing) = s.iter().find(|s| !parent.contains(s)) {
        return Err(CliError::Input(format!("simplex {missing} is not in the complex")));
    }
    Ok(Subcomplex::closure_of(parent.clone(), s.iter()))
}

fn level_complex(tower: &SubdivisionRecord, j: usize) -> Result<Arc<SimplicialComplex>, CliError> {
    Ok(tower.complex_at(j).map_err(|e| CliError::Input(e.to_string()))?.clone())
}

/// An open set as read: polyhedral at some level, or open cells.
#[derive(Debug, Clone)]
pub enum OpenSet {
    Polyhedral(OpenPolyhedralSet, usize),
    Cells(OpenCellSet),
}

/// `k` is the level used for `whole`.
pub fn open_set(tower: &Arc<SubdivisionRecord>, file: &OpenSetFile, k: usize) -> Result<OpenSet, CliError> {
    let given = [
        file.whole,
        file.closure.is_some(),
        file.cells.is_some(),
        file.interval.is_some(),
    ];
    if given.iter().filter(|&&b| b).count() > 1 {
        return Err(CliError::Input(
            "open set: give one of whole, closure, cells, interval".into(),
        ));
    }
    let j = file.level;
    if let Some((a, b)) = file.interval {
        let (n, cyclic) = interval_base(tower.base_complex())?;
        let positions = if cyclic { i64::MAX } else { (n as i64) << j };
        if a >= b || (!cyclic && (a < 0 || b > positions)) {
            return Err(CliError::Input(format!(
                "interval ({a}, {b}) is empty or leaves the path"
            )));
        }
        level_complex(tower, j)?;
        let chart = IntervalModel::new(tower.clone(), IntervalMap::linear(n, cyclic, 1, 0), 0)
            .map_err(|e| CliError::Input(e.to_string()))?;
        return Ok(OpenSet::Polyhedral(interval_set(&chart, j, a, b), j));
    }
    if let Some(cells) = &file.cells {
        let cells = cells.iter().map(|s| simplex(s)).collect::<Result<_, _>>()?;
        return OpenCellSet::new(&*level_complex(tower, j)?, j, cells)
            .map(OpenSet::Cells)
            .map_err(|e| CliError::Input(e.to_string()));
    }
    match &file.closure {
        Some(list) => {
            let sub = closure(&level_complex(tower, j)?, list)?;
            Ok(OpenSet::Polyhedral(OpenPolyhedralSet::from_subcomplex(sub), j))
        }
        None => Ok(OpenSet::Polyhedral(
            OpenPolyhedralSet::whole(level_complex(tower, k)?),
            k,
        )),
    }
}

/// Lifts a polyhedral open set from level `j` to level `k`.
pub fn at_level(
    tower: &SubdivisionRecord,
    u: &OpenPolyhedralSet,
    j: usize,
    k: usize,
) -> Result<OpenPolyhedralSet, CliError> {
    if j > k {
        return Err(CliError::Input(format!(
            "open set is given at level {j}, above the target level {k}"
        )));
    }
    lift_open_set(tower, u, j, k).map_err(|e| CliError::Input(e.to_string()))
}

fn vertex_map(pairs: &[(usize, usize)]) -> Result<BTreeMap<usize, usize>, CliError> {
    let mut map = BTreeMap::new();
    for &(v, w) in pairs {
        if map.insert(v, w).is_some() {
            return Err(CliError::Input(format!("vertex {v} is mapped twice")));
        }
    }
    Ok(map)
}

fn fixed(tower: &Arc<SubdivisionRecord>, c: AcyclicCarrier) -> Result<Arc<dyn MapModel>, CliError> {
    Ok(Arc::new(FixedCarrierModel::new(
        tower.clone(),
        tower.clone(),
        Arc::new(c),
    )?))
}

/// Builds a self-map model of `tower` from a carrier description.
pub fn model(
    tower: &Arc<SubdivisionRecord>,
    file: &CarrierFile,
    monotone_complete: bool,
) -> Result<Arc<dyn MapModel>, CliError> {
    let base = tower.base_complex().clone();
    match file {
        CarrierFile::Simplicial { map, source_level: 0 } => Ok(Arc::new(SimplicialModel::new(
            tower.clone(),
            tower.clone(),
            &vertex_map(map)?,
        )?)),
        CarrierFile::Simplicial { map, source_level } => {
            let map = vertex_map(map)?;
            let c = AcyclicCarrier::from_simplicial_map(level_complex(tower, *source_level)?, base, |v| {
                map.get(&v).copied()
            })?;
            fixed(tower, c.with_levels(*source_level, 0))
        }
        CarrierFile::Constant { value } => {
            let v = closure(&base, value)?;
            fixed(tower, AcyclicCarrier::constant(base.clone(), base, v)?)
        }
        CarrierFile::Table {
            source_level,
            target_level,
            values,
            complete,
        } => {
            let source = level_complex(tower, *source_level)?;
            let target = level_complex(tower, *target_level)?;
            let mut listed = BTreeMap::new();
            for e in values {
                listed.insert(simplex(&e.simplex)?, closure(&target, &e.value)?);
            }
            let c = AcyclicCarrier::from_partial(source, target, &listed, *complete || monotone_complete)?;
            fixed(tower, c.with_levels(*source_level, *target_level))
        }
        CarrierFile::Interval { extra, .. } => {
            let m = interval_map(&base, file)?;
            Ok(Arc::new(
                IntervalModel::new(tower.clone(), m, *extra).map_err(|e| CliError::Input(e.to_string()))?,
            ))
        }
    }
}

/// Number of edges, and whether the base is a cycle.
fn interval_base(base: &SimplicialComplex) -> Result<(usize, bool), CliError> {
    let edges = base.count(1);
    let vertices = base.count(0);
    if base.dims() != 2 || !(vertices == edges || vertices == edges + 1) {
        return Err(CliError::Input("interval carriers need a path or a cycle".into()));
    }
    Ok((edges, vertices == edges))
}

pub fn interval_map(base: &SimplicialComplex, file: &CarrierFile) -> Result<IntervalMap, CliError> {
    let CarrierFile::Interval {
        linear,
        step,
        vertices,
        edges,
        ..
    } = file
    else {
        return Err(CliError::Input("not an interval carrier".into()));
    };
    let (n, cyclic) = interval_base(base)?;
    match (linear, step, vertices, edges) {
        (Some((a, b)), None, None, None) => Ok(IntervalMap::linear(n, cyclic, *a, *b)),
        (None, Some(s), None, None) if !cyclic => Ok(IntervalMap::step(n, s.at, s.low, s.high)),
        (None, None, Some(v), Some(e)) => {
            IntervalMap::new(n, cyclic, v.clone(), e.clone()).map_err(|e| CliError::Input(e.to_string()))
        }
        _ => Err(CliError::Input(
            "interval carrier: give linear, step (paths only), or vertices with edges".into(),
        )),
    }
}

/// A problem bundle with its nested files resolved.
pub struct Bundle {
    pub path: PathBuf,
    pub file: BundleFile,
    pub complex: Arc<SimplicialComplex>,
    pub carriers: Vec<CarrierFile>,
    pub open_set: OpenSetFile,
    pub monotone_complete: bool,
}

impl Bundle {
    pub fn load(path: &Path, monotone_complete: bool) -> Result<Self, CliError> {
        let file: BundleFile = read(path)?;
        let dir = dir_of(path);
        let complex = complex(&file.complex, &dir)?;
        let carriers = file
            .carriers
            .iter()
            .map(|c| resolve(c, &dir))
            .collect::<Result<Vec<_>, _>>()?;
        if carriers.is_empty() {
            return Err(CliError::Input("bundle lists no carriers".into()));
        }
        let open_set = match &file.open_set {
            Some(s) => resolve(s, &dir)?,
            None => OpenSetFile {
                whole: true,
                ..OpenSetFile::default()
            },
        };
        Ok(Bundle {
            path: path.to_path_buf(),
            file,
            complex,
            carriers,
            open_set,
            monotone_complete,
        })
    }

    /// File stem, used as the instance name.
    pub fn name(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }

    pub fn rule(&self) -> VertexRule {
        self.file.rule.into()
    }

    /// Composite of `carriers` on `tower`, in order of application.
    pub fn composite(
        &self,
        tower: &Arc<SubdivisionRecord>,
        carriers: &[CarrierFile],
    ) -> Result<Arc<dyn MapModel>, CliError> {
        let mut factors = carriers
            .iter()
            .map(|c| model(tower, c, self.monotone_complete))
            .collect::<Result<Vec<_>, _>>()?;
        if factors.len() == 1 {
            return Ok(factors.remove(0));
        }
        Ok(Arc::new(CompositeModel::new(factors)?))
    }

    /// A tower deep enough for every listed composite at its target level.
    pub fn tower(&self, needs: &[(&[CarrierFile], usize)]) -> Result<Arc<SubdivisionRecord>, CliError> {
        let mut depth = needs
            .iter()
            .flat_map(|(c, k)| c.iter().map(CarrierFile::declared_level).chain([*k]))
            .fold(0, usize::max);
        loop {
            let tower = SubdivisionRecord::tower(self.complex.clone(), depth);
            let mut need = depth;
            for (c, k) in needs {
                need = need.max(self.composite(&tower, c)?.source_level_for(*k));
            }
            if need <= depth {
                return Ok(tower);
            }
            depth = need;
        }
    }

    /// Tower and composite of all carriers for target level `k`.
    pub fn model(&self, k: usize) -> Result<(Arc<SubdivisionRecord>, Arc<dyn MapModel>), CliError> {
        let tower = self.tower(&[(&self.carriers, k)])?;
        let m = self.composite(&tower, &self.carriers)?;
        Ok((tower, m))
    }

    pub fn open_set_on(&self, tower: &Arc<SubdivisionRecord>, k: usize) -> Result<OpenSet, CliError> {
        open_set(tower, &self.open_set, k)
    }

    pub fn polyhedral_open_set(
        &self,
        tower: &Arc<SubdivisionRecord>,
        k: usize,
    ) -> Result<(OpenPolyhedralSet, usize), CliError> {
        match self.open_set_on(tower, k)? {
            OpenSet::Polyhedral(u, j) => Ok((u, j)),
            OpenSet::Cells(_) => Err(CliError::Input("this command needs a polyhedral open set".into())),
        }
    }

    /// The open set lifted to level `k`.
    pub fn open_set_at(&self, tower: &Arc<SubdivisionRecord>, k: usize) -> Result<OpenPolyhedralSet, CliError> {
        let (u, j) = self.polyhedral_open_set(tower, k)?;
        at_level(tower, &u, j, k)
    }

    pub fn parts(
        &self,
        tower: &Arc<SubdivisionRecord>,
        k: usize,
    ) -> Result<(OpenPolyhedralSet, OpenPolyhedralSet), CliError> {
        let Some((a, b)) = &self.file.parts else {
            return Err(CliError::Input("additivity needs \"parts\"".into()));
        };
        let dir = dir_of(&self.path);
        let lift = |s: &Source<OpenSetFile>| match open_set(tower, &resolve(s, &dir)?, k)? {
            OpenSet::Polyhedral(u, j) => at_level(tower, &u, j, k),
            OpenSet::Cells(_) => Err(CliError::Input("parts must be polyhedral".into())),
        };
        Ok((lift(a)?, lift(b)?))
    }

    /// Tower, both ends and the prism carrier of the homotopy at target
    /// level `k`.
    #[allow(clippy::type_complexity)]
    pub fn homotopy(
        &self,
        k: usize,
    ) -> Result<(Arc<SubdivisionRecord>, AcyclicCarrier, AcyclicCarrier, AcyclicCarrier), CliError> {
        let Some(h) = &self.file.homotopy else {
            return Err(CliError::Input("homotopy invariance needs \"homotopy\"".into()));
        };
        if self.carriers.len() != 1 {
            return Err(CliError::Input("homotopy invariance takes a single carrier".into()));
        }
        let to = resolve(&h.to, &dir_of(&self.path))?;
        let from = &self.carriers[0];
        let tower = self.tower(&[(std::slice::from_ref(from), k), (std::slice::from_ref(&to), k)])?;
        let m0 = model(&tower, from, self.monotone_complete)?;
        let m1 = model(&tower, &to, self.monotone_complete)?;
        let l = m0.source_level_for(k).max(m1.source_level_for(k));
        let c0 = m0.carrier(l, k)?;
        let c1 = m1.carrier(l, k)?;
        let prism = match (&h.mixed, from, &to) {
            (Some(table), _, _) => {
                let base = tower.base_complex().clone();
                let mut listed = BTreeMap::new();
                for e in table {
                    listed.insert(simplex(&e.simplex)?, closure(&base, &e.value)?);
                }
                let mixed = AcyclicCarrier::from_partial(base.clone(), base, &listed, true)?;
                let src = tower.at_level(l)?;
                let tgt = tower.at_level(k)?;
                prism_carrier(&c0, &c1, |s| {
                    let c = src.carrier_at(s, 0)?;
                    let v = mixed
                        .value_of(&c)
                        .ok_or_else(|| CarrierError::UnknownSimplex(c.clone()))?;
                    Ok(tgt.lift(v, 0)?)
                })?
                .1
            }
            (None, CarrierFile::Interval { extra, .. }, CarrierFile::Interval { .. }) => {
                let base = tower.base_complex();
                let hull = interval_map(base, from)?
                    .hull(&interval_map(base, &to)?)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                let mix =
                    IntervalModel::new(tower.clone(), hull, *extra).map_err(|e| CliError::Input(e.to_string()))?;
                prism_carrier(&c0, &c1, |s| mix.value(l, k, s))?.1
            }
            (None, _, _) => {
                prism_carrier(&c0, &c1, |s| {
                    let x = c0.value_of(s).ok_or_else(|| CarrierError::UnknownSimplex(s.clone()))?;
                    let y = c1.value_of(s).ok_or_else(|| CarrierError::UnknownSimplex(s.clone()))?;
                    Ok(x.union(y))
                })?
                .1
            }
        };
        Ok((tower, c0, c1, prism))
    }
}

pub fn load_retraction(path: &Path) -> Result<(Arc<SimplicialComplex>, BTreeMap<usize, usize>), CliError> {
    let file: RetractionFile = read(path)?;
    let k = complex(&file.complex, &dir_of(path))?;
    Ok((k, vertex_map(&file.map)?))
}

pub fn load_cover(path: &Path) -> Result<FiniteCover, CliError> {
    let file: CoverFile = read(path)?;
    let c = complex(&file.complex, &dir_of(path))?;
    let tower = SubdivisionRecord::tower(c, file.level);
    let elements = file
        .elements
        .into_iter()
        .map(|e| CoverElement::new(e.name, e.stars))
        .collect();
    FiniteCover::new(tower, elements).map_err(|e| CliError::Input(e.to_string()))
}
