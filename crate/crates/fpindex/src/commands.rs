use std::path::{Path, PathBuf};
use std::sync::Arc;

use fpindex_core::carrier::{check_acyclic, verify_approximation, Coefficients, VertexRule};
use fpindex_core::chain::ChainComplexData;
use fpindex_core::cover::nerve;
use fpindex_core::homology::{homology, verify_uct};
use fpindex_core::index::{
    check_additivity, check_commutativity, check_homotopy, check_normalization, fixed_point_index,
    index_on_general_open_set, index_stability, index_via_domination, normalization_check, AxiomOutcome, AxiomStatus,
    DominationData, IndexError, IndexProblem,
};
use fpindex_core::{OpenPolyhedralSet, SubdivisionRecord};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::input::{self, Bundle, OpenSet};
use crate::json;
use crate::parallel;

/// A computed report, possibly with a failed check attached. The report is
/// written either way; the failure sets the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub value: Value,
    pub failure: Option<CliError>,
}

impl Report {
    fn ok(value: Value) -> Self {
        Report { value, failure: None }
    }

    fn check(value: Value, holds: bool, failure: impl FnOnce() -> CliError) -> Self {
        Report {
            value,
            failure: (!holds).then(failure),
        }
    }
}

/// Runs `f` on every input and joins the reports: a single input gives its
/// own report, several give an array. The first error in input order wins.
pub fn each<T, F>(inputs: &[T], threads: usize, f: F) -> Result<Report, CliError>
where
    T: Sync,
    F: Fn(&T) -> Result<Report, CliError> + Sync,
{
    let mut reports = parallel::map(inputs, threads, f)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    if reports.len() == 1 {
        return Ok(reports.remove(0));
    }
    let failure = reports.iter().find_map(|r| r.failure.clone());
    Ok(Report {
        value: Value::Array(reports.into_iter().map(|r| r.value).collect()),
        failure,
    })
}

fn complex_at_level(path: &Path, level: usize) -> Result<Arc<fpindex_core::SimplicialComplex>, CliError> {
    let c = input::load_complex(path)?;
    if level == 0 {
        return Ok(c);
    }
    Ok(SubdivisionRecord::tower(c, level).complex_at(level)?.clone())
}

pub fn homology_of(path: &Path, level: usize, reduced: bool) -> Result<Report, CliError> {
    let c = complex_at_level(path, level)?;
    let h = homology(&ChainComplexData::new(c.clone()), reduced);
    let mut v = json::profile(&h);
    v["complex"] = json::complex(&c);
    v["level"] = json!(level);
    v["reduced"] = json!(reduced);
    Ok(Report::ok(v))
}

pub fn uct_check(path: &Path, level: usize) -> Result<Report, CliError> {
    let c = complex_at_level(path, level)?;
    let r = verify_uct(&ChainComplexData::new(c));
    let holds = r.holds();
    let mut v = json::uct(&r);
    v["level"] = json!(level);
    Ok(Report::check(v, holds, || {
        CliError::Verification(format!("{}: universal coefficient comparison fails", path.display()))
    }))
}

fn level(bundle: &Bundle, level: Option<usize>) -> usize {
    level.unwrap_or(bundle.file.level)
}

/// Every factor must have integrally acyclic values before anything is
/// built from it.
fn require_acyclic(bundle: &Bundle, k: usize) -> Result<(), CliError> {
    match acyclic(bundle, Some(k), false)?.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

pub fn lefschetz(bundle: &Bundle, k: Option<usize>) -> Result<Report, CliError> {
    let k = level(bundle, k);
    require_acyclic(bundle, k)?;
    let (tower, model) = bundle.model(k)?;
    let whole = OpenPolyhedralSet::whole(tower.complex_at(k)?.clone());
    let p = IndexProblem::from_model_with_rule(model.as_ref(), whole, k, bundle.rule())?;
    let n = normalization_check(&p)?;
    let holds = n.holds();
    let v = json!({
        "chain_level": json::index(&n.chain_level),
        "homology_level": json::int(&n.homology_level),
        "holds": holds,
    });
    Ok(Report::check(v, holds, || {
        CliError::Verification("chain-level and homology-level Lefschetz numbers differ".into())
    }))
}

/// Options of the `index` command.
#[derive(Debug, Clone, Default)]
pub struct IndexOptions {
    pub level: Option<usize>,
    pub level_cap: Option<usize>,
    pub stability: bool,
    pub dominate: Option<PathBuf>,
}

pub fn index(bundle: &Bundle, opts: &IndexOptions) -> Result<Report, CliError> {
    let k = level(bundle, opts.level);
    require_acyclic(bundle, k)?;
    let probe = SubdivisionRecord::tower(bundle.complex.clone(), k);
    if let OpenSet::Cells(v) = bundle.open_set_on(&probe, k)? {
        let cap = opts.level_cap.unwrap_or(k).max(k);
        let (_, model) = bundle.model(cap)?;
        let g = index_on_general_open_set(model.as_ref(), &v, k, cap)?;
        let mut out = json::index(&g.result);
        out["inner_closure"] = json::simplices(&g.closure);
        return Ok(Report::ok(out));
    }
    if opts.stability {
        return stability(bundle, k);
    }
    if let Some(r) = &opts.dominate {
        return dominate(bundle, r, k);
    }
    let cap = opts.level_cap.unwrap_or(k).max(k);
    for k in k..=cap {
        match index_at(bundle, k) {
            Err(CliError::Inadmissible { .. }) if opts.level_cap.is_some() => continue,
            other => return other.map(Report::ok),
        }
    }
    Err(CliError::ResolutionExhausted(cap))
}

fn index_at(bundle: &Bundle, k: usize) -> Result<Value, CliError> {
    let (tower, model) = bundle.model(k)?;
    let u = bundle.open_set_at(&tower, k)?;
    let p = IndexProblem::from_model_with_rule(model.as_ref(), u, k, bundle.rule())?;
    Ok(json::index(&fixed_point_index(&p)?))
}

fn stability(bundle: &Bundle, k: usize) -> Result<Report, CliError> {
    let (tower, model) = bundle.model(k + 1)?;
    let (u, j) = bundle.polyhedral_open_set(&tower, k)?;
    if j > k {
        return Err(CliError::Input(format!(
            "open set is given at level {j}, above the target level {k}"
        )));
    }
    let (a, b) = index_stability(model.as_ref(), &u, j, k)?;
    let stable = a.value == b.value;
    let v = json!({
        "value": json::int(&a.value),
        "stable": stable,
        "levels": [json::index(&a), json::index(&b)],
    });
    Ok(Report::check(v, stable, || {
        CliError::Verification(format!(
            "index changes from {} at level {k} to {} at level {}",
            a.value,
            b.value,
            k + 1
        ))
    }))
}

fn dominate(bundle: &Bundle, retraction: &Path, k: usize) -> Result<Report, CliError> {
    let (big, r) = input::load_retraction(retraction)?;
    // one more level leaves room for the inclusion and the retraction
    let depth = bundle.tower(&[(&bundle.carriers, k)])?.level() + 1;
    let x_tower = SubdivisionRecord::tower(bundle.complex.clone(), depth);
    let model = bundle.composite(&x_tower, &bundle.carriers)?;
    let k_tower = SubdivisionRecord::tower(big, depth);
    let u = bundle.open_set_at(&x_tower, k)?;
    let d = DominationData::new(k_tower, x_tower, r)?;
    let res = index_via_domination(&d, model, &u, k)?;
    let agrees = res.agrees();
    let v = json!({
        "value": json::int(&res.direct.value),
        "agrees": agrees,
        "direct": json::index(&res.direct),
        "via_retraction": json::index(&res.via_retraction),
    });
    Ok(Report::check(v, agrees, || {
        CliError::Verification(format!(
            "index through the retraction is {}, directly {}",
            res.via_retraction.value, res.direct.value
        ))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomChoice {
    Additivity,
    Homotopy,
    Commutativity,
    Normalization,
}

pub fn verify(axiom: AxiomChoice, bundle: &Bundle, k: Option<usize>) -> Result<AxiomOutcome, CliError> {
    let k = level(bundle, k);
    require_acyclic(bundle, k)?;
    let name = bundle.name();
    let outcome = match axiom {
        AxiomChoice::Normalization => {
            let (_, model) = bundle.model(k)?;
            check_normalization(&name, model.as_ref(), k)
        }
        AxiomChoice::Additivity => {
            let (tower, model) = bundle.model(k)?;
            let u = bundle.open_set_at(&tower, k)?;
            let (u1, u2) = bundle.parts(&tower, k)?;
            check_additivity(&name, model.as_ref(), &u, &u1, &u2, k)
        }
        AxiomChoice::Homotopy => {
            let (tower, c0, c1, h) = bundle.homotopy(k)?;
            let u = bundle.open_set_at(&tower, k)?;
            check_homotopy(&name, &tower, &u, &Arc::new(c0), &Arc::new(c1), &Arc::new(h))
        }
        AxiomChoice::Commutativity => {
            let [a, b] = bundle.carriers.as_slice() else {
                return Err(CliError::Input("commutativity takes exactly two carriers".into()));
            };
            let (ab, ba) = ([a.clone(), b.clone()], [b.clone(), a.clone()]);
            let probe = bundle.tower(&[(std::slice::from_ref(b), k)])?;
            let l2 = input::model(&probe, b, bundle.monotone_complete)?.source_level_for(k);
            let tower = bundle.tower(&[(&ab, k), (&ba, l2)])?;
            let f1 = input::model(&tower, a, bundle.monotone_complete)?;
            let f2 = input::model(&tower, b, bundle.monotone_complete)?;
            let w = bundle.open_set_at(&tower, k)?;
            check_commutativity(&name, f1, f2, &w, k)
        }
    };
    outcome.map_err(|e: IndexError| e.into())
}

pub fn verify_all(
    axiom: AxiomChoice,
    bundles: &[Bundle],
    k: Option<usize>,
    threads: usize,
) -> Result<Report, CliError> {
    let outcomes = parallel::map(bundles, threads, |b| verify(axiom, b, k))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let count = |f: fn(&AxiomStatus) -> bool| outcomes.iter().filter(|o| f(&o.status)).count();
    let failed = count(|s| *s == AxiomStatus::Fail);
    let v = json!({
        "axiom": format!("{axiom:?}").to_lowercase(),
        "outcomes": outcomes.iter().map(json::outcome).collect::<Vec<_>>(),
        "passed": count(|s| *s == AxiomStatus::Pass),
        "failed": failed,
        "skipped": count(|s| matches!(s, AxiomStatus::Skipped(_))),
    });
    Ok(Report::check(v, failed == 0, || {
        CliError::Verification(format!("{failed} instances fail"))
    }))
}

pub fn approx(bundle: &Bundle, k: Option<usize>, rule: Option<VertexRule>) -> Result<Report, CliError> {
    let k = level(bundle, k);
    require_acyclic(bundle, k)?;
    let rule = rule.unwrap_or(bundle.rule());
    let (_, model) = bundle.model(k)?;
    let a = model.approximate(model.source_level_for(k), k, rule)?;
    let verified = verify_approximation(&a)?;
    let mut v = json::approximation(&a);
    v["rule"] = json!(format!("{rule:?}").to_lowercase());
    v["verified"] = json!(verified.holds());
    let witness = verified.witness().map(|w| w.simplex.to_string());
    Ok(Report::check(v, witness.is_none(), || {
        CliError::Verification(format!(
            "approximation fails verification at {}",
            witness.unwrap_or_default()
        ))
    }))
}

/// Checks every factor at levels `(l, k)`. With `rational`, the verdict is
/// taken over the rationals and the integer report is kept alongside.
pub fn acyclic(bundle: &Bundle, k: Option<usize>, rational: bool) -> Result<Report, CliError> {
    let k = level(bundle, k);
    let tower = bundle.tower(&[(&bundle.carriers, k)])?;
    let mut factors = Vec::new();
    let mut first_failure = None;
    for (i, c) in bundle.carriers.iter().enumerate() {
        let m = input::model(&tower, c, bundle.monotone_complete)?;
        let l = m.source_level_for(k);
        let carrier = m.carrier(l, k)?;
        let z = check_acyclic(&carrier, Coefficients::Integers);
        let mut entry = json!({ "factor": i, "source_level": l, "target_level": k, "integers": json::acyclicity(&z) });
        let verdict = if rational {
            let q = check_acyclic(&carrier, Coefficients::Rationals);
            entry["rationals"] = json::acyclicity(&q);
            q
        } else {
            z
        };
        entry["acyclic"] = json!(verdict.acyclic());
        if first_failure.is_none() {
            first_failure = verdict.failures.first().map(|f| (i, f.clone()));
        }
        factors.push(entry);
    }
    let v = json!({
        "coefficients": if rational { "rationals" } else { "integers" },
        "acyclic": first_failure.is_none(),
        "factors": factors,
    });
    Ok(Report {
        value: v,
        failure: first_failure.map(|(i, f)| CliError::Acyclicity {
            message: format!("factor {i}: value of {} has reduced homology {}", f.simplex, f.homology),
            simplex: Some(f.simplex),
        }),
    })
}

pub fn nerve_of(path: &Path) -> Result<Report, CliError> {
    let cover = input::load_cover(path)?;
    let n = nerve(&cover);
    let names: Vec<&str> = cover.elements().iter().map(|e| e.name.as_str()).collect();
    let h = homology(&ChainComplexData::new(n.complex().clone()), false);
    Ok(Report::ok(json!({
        "elements": names,
        "level": cover.level(),
        "nerve": json::complex(n.complex()),
        "homology": json::profile(&h),
    })))
}
