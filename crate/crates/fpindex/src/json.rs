//! JSON encoders. Object keys come out sorted; integers that fit in `i64`
//! are numbers and larger ones are decimal strings.

use fpindex_core::carrier::{AcyclicityReport, ChainApproximation, Coefficients};
use fpindex_core::homology::{HomologyGroup, UctReport};
use fpindex_core::index::{AdmissibilityReport, AxiomOutcome, AxiomStatus, IndexResult};
use fpindex_core::{BigInt, HomologyProfile, Simplex, SimplicialComplex, SparseIntegerMatrix};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(n) => json!(n),
        None => json!(x.to_string()),
    }
}

pub fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn simplex(s: &Simplex) -> Value {
    json!(s.vertices())
}

pub fn simplices<'a>(ss: impl IntoIterator<Item = &'a Simplex>) -> Value {
    Value::Array(ss.into_iter().map(simplex).collect())
}

pub fn group(g: &HomologyGroup) -> Value {
    json!({
        "rank": g.rank,
        "torsion": ints(&g.torsion),
        "text": g.to_string(),
    })
}

pub fn profile(p: &HomologyProfile) -> Value {
    json!({
        "betti": p.betti(),
        "groups": p.groups.iter().map(group).collect::<Vec<_>>(),
    })
}

pub fn complex(c: &SimplicialComplex) -> Value {
    json!({
        "euler_characteristic": c.euler_characteristic(),
        "f_vector": c.f_vector(),
        "maximal": simplices(&c.maximal_simplices()),
    })
}

pub fn uct(r: &UctReport) -> Value {
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "degree": c.degree,
                "cohomology": group(&c.cohomology),
                "hom_rank": c.hom_rank,
                "ext_torsion": ints(&c.ext_torsion),
                "holds": c.holds,
            })
        })
        .collect();
    json!({
        "homology": profile(&r.homology),
        "cohomology": profile(&r.cohomology),
        "checks": checks,
        "holds": r.holds(),
    })
}

pub fn admissibility(a: &AdmissibilityReport) -> Value {
    json!({
        "admissible": a.admissible,
        "checked": a.checked,
        "suspicious": simplices(&a.suspicious),
    })
}

pub fn index(r: &IndexResult) -> Value {
    json!({
        "value": int(&r.value),
        "level": r.level,
        "source_level": r.source_level,
        "traces": ints(&r.traces),
        "admissibility": admissibility(&r.admissibility),
        "canonical": r.canonical,
    })
}

pub fn matrix(m: &SparseIntegerMatrix) -> Value {
    let entries: Vec<Value> = m.entries().map(|(r, c, x)| json!([r, c, int(x)])).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

pub fn approximation(a: &ChainApproximation) -> Value {
    let (l, k) = a.levels();
    let source = a.carrier().source();
    let target = a.carrier().target();
    let degrees: Vec<Value> = a
        .map()
        .matrices()
        .iter()
        .enumerate()
        .map(|(q, m)| {
            json!({
                "degree": q,
                "source": simplices(source.simplices(q)),
                "target": simplices(target.simplices(q)),
                "matrix": matrix(m),
            })
        })
        .collect();
    json!({ "source_level": l, "target_level": k, "degrees": degrees })
}

pub fn coefficients(c: Coefficients) -> &'static str {
    match c {
        Coefficients::Integers => "integers",
        Coefficients::Rationals => "rationals",
    }
}

/// Failures are grouped by the homology of the value.
pub fn acyclicity(r: &AcyclicityReport) -> Value {
    let mut groups: Vec<(&HomologyProfile, Vec<&Simplex>)> = Vec::new();
    for f in &r.failures {
        match groups.iter_mut().find(|(h, _)| *h == &f.homology) {
            Some((_, ss)) => ss.push(&f.simplex),
            None => groups.push((&f.homology, vec![&f.simplex])),
        }
    }
    let failures: Vec<Value> = groups
        .into_iter()
        .map(|(h, ss)| json!({ "simplices": simplices(ss), "reduced_homology": profile(h) }))
        .collect();
    json!({
        "coefficients": coefficients(r.coefficients),
        "checked": r.checked,
        "acyclic": r.acyclic(),
        "failures": failures,
    })
}

pub fn outcome(o: &AxiomOutcome) -> Value {
    let (status, reason) = match &o.status {
        AxiomStatus::Pass => ("pass", Value::Null),
        AxiomStatus::Fail => ("fail", Value::Null),
        AxiomStatus::Skipped(why) => ("skipped", json!(why)),
    };
    json!({
        "instance": o.instance,
        "status": status,
        "reason": reason,
        "lhs": o.lhs.as_ref().map(int),
        "rhs": o.rhs.as_ref().map(int),
    })
}

/// Pretty-printed with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
