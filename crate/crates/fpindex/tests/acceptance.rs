//! Acceptance criteria. Each prints one PASS or FAIL line; the process exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::Arc;

use fpindex_core::carrier::{
    build_chain_approximation, carried_homotopy, check_acyclic, verify_approximation, AcyclicCarrier, Coefficients,
    MapModel, SimplicialModel, VertexRule,
};
use fpindex_core::chain::{is_chain_map, lefschetz_number, verify_chain_homotopy, ChainComplexData, GradedIntegerMap};
use fpindex_core::complex::{OpenPolyhedralSet, Subcomplex, SubdivisionRecord};
use fpindex_core::corpus::{self, SelfMapInstance};
use fpindex_core::homology::{homology, induced_map_on_homology, verify_uct, HomologyBasis};
use fpindex_core::index::{
    check_additivity, check_commutativity, check_homotopy, check_normalization, fixed_point_index, index_stability,
    normalization_check, AxiomOutcome, AxiomStatus, IndexError, IndexProblem,
};
use fpindex_core::smith::smith_normal_form;
use fpindex_core::{BigInt, SparseIntegerMatrix};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail<E: std::fmt::Debug>(what: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{what}: {e:?}")
}

fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

// ---------------------------------------------------------------------------
// 1. chain algebra

/// `(rank, torsion)` in each degree.
fn standard_homology(name: &str) -> Option<Vec<(usize, Vec<i64>)>> {
    let z = |r: usize| (r, vec![]);
    Some(match name {
        "hexagon" | "triangle-boundary" => vec![z(1), z(1)],
        "disk" => vec![z(1), z(0), z(0)],
        "sphere" => vec![z(1), z(0), z(1)],
        "torus" => vec![z(1), z(2), z(1)],
        "projective-plane" => vec![z(1), (0, vec![2]), z(0)],
        "klein-bottle" => vec![z(1), (1, vec![2]), z(0)],
        _ => return None,
    })
}

fn smith_sound(m: &SparseIntegerMatrix) -> bool {
    let s = smith_normal_form(m);
    let f = s.invariant_factors();
    s.u.mul(&s.d).mul(&s.v) == *m
        && s.u.is_unimodular()
        && s.v.is_unimodular()
        && s.u.mul(&s.u_inv) == SparseIntegerMatrix::identity(m.rows())
        && s.v_inv.mul(&s.v) == SparseIntegerMatrix::identity(m.cols())
        && s.d.is_diagonal()
        && f.iter().all(|x| *x > BigInt::zero())
        && f.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
}

fn chain_algebra() -> Outcome {
    let mut matrices = 0;
    let mut checked = Vec::new();
    for (name, c) in corpus::complexes() {
        for level in 0..2 {
            let k = SubdivisionRecord::tower(c.clone(), level)
                .complex_at(level)
                .map_err(fail(name))?
                .clone();
            let cc = ChainComplexData::new(k);
            ensure(cc.augmentation().mul(&cc.boundary_or_zero(1)).is_zero(), || {
                format!("{name}: ε∂ ≠ 0")
            })?;
            for q in 1..cc.dims() {
                let b = cc.boundary(q);
                ensure(q + 1 >= cc.dims() || b.mul(cc.boundary(q + 1)).is_zero(), || {
                    format!("{name} level {level}: ∂∂ ≠ 0 in degree {q}")
                })?;
                ensure(smith_sound(b), || format!("{name} level {level}: Smith form of ∂{q}"))?;
                matrices += 1;
            }
        }
        if let Some(expected) = standard_homology(name) {
            let h = homology(&ChainComplexData::new(c.clone()), false);
            ensure(h.groups.len() == expected.len(), || {
                format!("{name}: {} degrees", h.groups.len())
            })?;
            for (q, (rank, torsion)) in expected.iter().enumerate() {
                let g = h.group(q);
                let torsion: Vec<BigInt> = torsion.iter().map(|&t| int(t)).collect();
                ensure(g.rank == *rank && g.torsion == torsion, || {
                    format!("{name}: H_{q} = {g}")
                })?;
            }
            checked.push(name);
        }
    }
    Ok(format!(
        "{matrices} boundary matrices; homology of {}",
        checked.join(", ")
    ))
}

// ---------------------------------------------------------------------------
// 2. Hopf trace

/// `f + ∂D + D∂` with `D` drawn from the generator.
fn perturb(f: &GradedIntegerMap, rng: &mut ChaCha8Rng) -> GradedIntegerMap {
    let cc = f.source().clone();
    let d: Vec<SparseIntegerMatrix> = (0..cc.dims())
        .map(|q| {
            let (rows, cols) = (cc.rank(q + 1), cc.rank(q));
            let mut m = SparseIntegerMatrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    if rng.gen_bool(0.3) {
                        m.set(r, c, int(rng.gen_range(-2..=2)));
                    }
                }
            }
            m
        })
        .collect();
    let matrices = (0..cc.dims())
        .map(|q| {
            let mut m = f.matrix(q).clone();
            if q + 1 < cc.dims() {
                m = m.add(&cc.boundary(q + 1).mul(&d[q]));
            }
            if q > 0 {
                m = m.add(&d[q - 1].mul(cc.boundary(q)));
            }
            m
        })
        .collect();
    GradedIntegerMap::new(cc.clone(), cc, 0, matrices).expect("shapes match")
}

/// Alternating sum of diagonals, read off dense matrices.
fn dense_lefschetz(f: &GradedIntegerMap) -> BigInt {
    let mut total = BigInt::zero();
    for (q, m) in f.matrices().iter().enumerate() {
        let dense = m.to_dense();
        let tr: BigInt = (0..m.rows().min(m.cols())).map(|i| dense[i][i].clone()).sum();
        if q % 2 == 0 {
            total += tr;
        } else {
            total -= tr;
        }
    }
    total
}

fn generated_self_maps(rng: &mut ChaCha8Rng) -> Vec<(String, GradedIntegerMap)> {
    let mut out = Vec::new();
    for n in [2usize, 3] {
        let cc = ChainComplexData::shared(corpus::simplex_boundary(n));
        for i in 0..6 {
            let images: Vec<usize> = (0..=n).map(|_| rng.gen_range(0..=n)).collect();
            let f = GradedIntegerMap::simplicial(cc.clone(), cc.clone(), |v| images.get(v).copied())
                .expect("every vertex map of a simplex boundary is simplicial");
            out.push((format!("boundary-{n}-map-{i}"), perturb(&f, rng)));
        }
    }
    for name in ["hexagon", "disk", "sphere", "torus", "projective-plane", "klein-bottle"] {
        let c = corpus::complexes()
            .into_iter()
            .find(|(n, _)| *n == name)
            .expect("corpus complex")
            .1;
        let cc = ChainComplexData::shared(c);
        for i in 0..2 {
            let f = GradedIntegerMap::identity(cc.clone());
            out.push((format!("{name}-identity-{i}"), perturb(&f, rng)));
        }
    }
    out
}

fn hopf_trace() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let maps = generated_self_maps(&mut rng);
    for (name, g) in &maps {
        ensure(is_chain_map(g).map_err(fail(name))?.holds(), || {
            format!("{name}: not a chain map")
        })?;
        let chain = lefschetz_number(g).map_err(fail(name))?.value;
        let basis = HomologyBasis::new(g.source().clone());
        let induced = induced_map_on_homology(g, &basis).map_err(fail(name))?.lefschetz.value;
        ensure(chain == dense_lefschetz(g), || format!("{name}: trace bookkeeping"))?;
        ensure(chain == induced, || {
            format!("{name}: chain {chain} vs homology {induced}")
        })?;
    }
    let mut carriers = 0;
    for level in 0..2 {
        for i in corpus::whole_space_instances(level) {
            let l = i.model.source_level_for(level);
            let a = i
                .model
                .approximate(l, level, VertexRule::Least)
                .map_err(fail(&i.name))?;
            let p = IndexProblem::with_approximation(i.model.source().clone(), i.open_set.clone(), a)
                .map_err(fail(&i.name))?;
            let n = normalization_check(&p).map_err(fail(&i.name))?;
            ensure(n.holds(), || {
                format!(
                    "{} level {level}: chain {} vs homology {}",
                    i.name, n.chain_level.value, n.homology_level
                )
            })?;
            carriers += 1;
        }
    }
    ensure(maps.len() >= 20, || format!("only {} generated maps", maps.len()))?;
    Ok(format!(
        "{} generated chain maps, {carriers} carriers with U = K",
        maps.len()
    ))
}

// ---------------------------------------------------------------------------
// 3. approximations

/// The vertex map of a carrier whose every vertex value is one vertex.
fn vertex_map_of(c: &AcyclicCarrier) -> Option<BTreeMap<usize, usize>> {
    let mut map = BTreeMap::new();
    for v in c.source().vertices() {
        let value = c.value_of(&fpindex_core::Simplex::vertex(v))?;
        if value.total_count() != 1 {
            return None;
        }
        map.insert(v, value.vertices().next()?);
    }
    Some(map)
}

fn all_instances(level: usize) -> Vec<SelfMapInstance> {
    corpus::whole_space_instances(level)
        .into_iter()
        .chain(corpus::local_instances(level))
        .collect()
}

fn approximation_correctness() -> Outcome {
    let mut built = 0;
    let mut simplicial = Vec::new();
    for level in 0..2 {
        for i in all_instances(level) {
            let l = i.model.source_level_for(level);
            for rule in [VertexRule::Least, VertexRule::Greatest] {
                let a = i.model.approximate(l, level, rule).map_err(fail(&i.name))?;
                ensure(verify_approximation(&a).map_err(fail(&i.name))?.holds(), || {
                    format!("{} level {level}: not a carried augmented chain map", i.name)
                })?;
                built += 1;
                if let Some(map) = vertex_map_of(a.carrier()) {
                    let c = a.carrier();
                    let classical =
                        GradedIntegerMap::simplicial(c.source_chains().clone(), c.target_chains().clone(), |v| {
                            map.get(&v).copied()
                        })
                        .map_err(fail(&i.name))?;
                    ensure(classical.matrices() == a.map().matrices(), || {
                        format!("{} level {level}: differs from the simplicial chain map", i.name)
                    })?;
                    simplicial.push(i.name.clone());
                }
            }
        }
    }
    for h in corpus::homotopy_instances(1).map_err(fail("homotopy instances"))? {
        for c in [&h.bottom, &h.top, &h.homotopy] {
            let a = build_chain_approximation(c, VertexRule::Least).map_err(fail(&h.name))?;
            ensure(verify_approximation(&a).map_err(fail(&h.name))?.holds(), || {
                format!("{}: prism", h.name)
            })?;
            built += 1;
        }
    }
    simplicial.sort();
    simplicial.dedup();
    ensure(simplicial.len() >= 5, || {
        format!("only {} simplicial carriers", simplicial.len())
    })?;
    Ok(format!(
        "{built} approximations; equal to the simplicial chain map on {}",
        simplicial.join(", ")
    ))
}

// ---------------------------------------------------------------------------
// 4. choice independence

fn choice_independence() -> Outcome {
    let mut count = 0;
    for level in 0..2 {
        for i in all_instances(level) {
            if i.model.factors() != 1 {
                continue;
            }
            let l = i.model.source_level_for(level);
            let a = i
                .model
                .approximate(l, level, VertexRule::Least)
                .map_err(fail(&i.name))?;
            let b = i
                .model
                .approximate(l, level, VertexRule::Greatest)
                .map_err(fail(&i.name))?;
            let d = carried_homotopy(a.map(), b.map(), a.carrier()).map_err(fail(&i.name))?;
            ensure(
                verify_chain_homotopy(a.map(), b.map(), &d)
                    .map_err(fail(&i.name))?
                    .holds(),
                || format!("{} level {level}: f - g ≠ ∂D + D∂", i.name),
            )?;
            let tower = i.model.source().clone();
            let index = |x| -> Result<Option<BigInt>, String> {
                let p =
                    IndexProblem::with_approximation(tower.clone(), i.open_set.clone(), x).map_err(fail(&i.name))?;
                match fixed_point_index(&p) {
                    Ok(r) => Ok(Some(r.value)),
                    Err(IndexError::Inadmissible(_)) => Ok(None),
                    Err(e) => Err(format!("{}: {e:?}", i.name)),
                }
            };
            let (ia, ib) = (index(a)?, index(b)?);
            ensure(ia == ib, || format!("{} level {level}: {ia:?} vs {ib:?}", i.name))?;
            if ia.is_some() {
                count += 1;
            }
        }
    }
    ensure(count >= 10, || format!("only {count} carriers"))?;
    Ok(format!(
        "{count} carriers with a verified carried homotopy and equal indices"
    ))
}

// ---------------------------------------------------------------------------
// 5. axioms

fn tally(outcomes: &[AxiomOutcome]) -> Result<(usize, usize), String> {
    let mut passed = 0;
    let mut skipped = 0;
    for o in outcomes {
        match &o.status {
            AxiomStatus::Pass => passed += 1,
            AxiomStatus::Skipped(_) => skipped += 1,
            AxiomStatus::Fail => return Err(format!("{}: {:?} vs {:?}", o.instance, o.lhs, o.rhs)),
        }
    }
    Ok((passed, skipped))
}

fn axiom_suite() -> Outcome {
    let k = 1;
    let additivity: Vec<_> = corpus::additivity_instances(k)
        .iter()
        .map(|a| check_additivity(&a.name, a.model.as_ref(), &a.whole, &a.parts.0, &a.parts.1, a.level))
        .collect::<Result<_, _>>()
        .map_err(fail("additivity"))?;
    let homotopy: Vec<_> = corpus::homotopy_instances(k)
        .map_err(fail("homotopy"))?
        .iter()
        .map(|h| check_homotopy(&h.name, &h.tower, &h.open_set, &h.bottom, &h.top, &h.homotopy))
        .collect::<Result<_, _>>()
        .map_err(fail("homotopy"))?;
    let commutativity: Vec<_> = corpus::commutativity_instances(k)
        .iter()
        .map(|c| check_commutativity(&c.name, c.f1.clone(), c.f2.clone(), &c.w, c.level))
        .collect::<Result<_, _>>()
        .map_err(fail("commutativity"))?;
    let mut normalization = Vec::new();
    for level in 0..2 {
        for i in corpus::whole_space_instances(level) {
            normalization.push(check_normalization(&i.name, i.model.as_ref(), level).map_err(fail(&i.name))?);
        }
    }
    let (add, add_skipped) = tally(&additivity)?;
    let (hom, hom_skipped) = tally(&homotopy)?;
    let (comm, _) = tally(&commutativity)?;
    let (norm, norm_skipped) = tally(&normalization)?;
    ensure(add >= 3 && add_skipped == 0, || format!("additivity: {add} passed"))?;
    ensure(hom >= 3 && hom_skipped == 0, || format!("homotopy: {hom} passed"))?;
    ensure(comm >= 2, || format!("commutativity: {comm} passed"))?;
    ensure(norm_skipped == 0, || "normalization skipped an instance".into())?;
    Ok(format!(
        "additivity {add}, homotopy {hom}, commutativity {comm} (+{} outside the side condition), normalization {norm}",
        commutativity.len() - comm
    ))
}

// ---------------------------------------------------------------------------
// 6. stability

fn stability() -> Outcome {
    let mut instances: Vec<SelfMapInstance> = Vec::new();
    for level in 0..2 {
        // the corpus towers of these two stop at level 0; they are rebuilt below
        instances.extend(
            all_instances(level)
                .into_iter()
                .filter(|i| i.name != "identity-torus" && i.name != "identity-projective-plane"),
        );
    }
    for (name, c) in [
        ("identity-torus", corpus::torus()),
        ("identity-projective-plane", corpus::projective_plane()),
        ("identity-klein-bottle", corpus::klein_bottle()),
    ] {
        let tower = SubdivisionRecord::tower(c, 1);
        let model: Arc<dyn MapModel> = Arc::new(SimplicialModel::identity(tower.clone()).map_err(fail(name))?);
        instances.push(SelfMapInstance {
            name: name.into(),
            open_set: OpenPolyhedralSet::whole(tower.complex_at(0).map_err(fail(name))?.clone()),
            model,
            level: 0,
        });
    }
    let mut checked = 0;
    let mut inadmissible = Vec::new();
    for i in &instances {
        match index_stability(i.model.as_ref(), &i.open_set, i.level, i.level) {
            Ok((a, b)) => {
                ensure(a.value == b.value, || {
                    format!("{} from level {}: {} then {}", i.name, i.level, a.value, b.value)
                })?;
                checked += 1;
            }
            Err(IndexError::Inadmissible(_)) => inadmissible.push(format!("{}@{}", i.name, i.level)),
            Err(e) => return Err(format!("{} level {}: {e:?}", i.name, i.level)),
        }
    }
    Ok(format!(
        "{checked} admissible instances stable; not admissible: {}",
        inadmissible.join(", ")
    ))
}

// ---------------------------------------------------------------------------
// 7. degree sanity

/// Brute force on the `n`-cycle. Level-one positions `0..2n`: `2i` is vertex
/// `i` and `2i + 1` the midpoint of the edge `i → i + 1`. `g` sends positions
/// to base vertices; it must send neighbours to equal or adjacent vertices.
/// Returns the Lefschetz number of `g ∘ sd` and the degree of `g`.
fn cycle_oracle(n: usize, g: impl Fn(usize) -> usize) -> (i64, i64) {
    // image of the fine edge p → p + 1 as a coefficient vector on base edges
    let fine_edge = |p: usize| -> Vec<i64> {
        let (a, b) = (g(p % (2 * n)), g((p + 1) % (2 * n)));
        let mut v = vec![0; n];
        if a == b {
        } else if b == (a + 1) % n {
            v[a] += 1;
        } else if a == (b + 1) % n {
            v[b] -= 1;
        } else {
            panic!("positions {p} and {} do not go to adjacent vertices", p + 1);
        }
        v
    };
    let tr0 = (0..n).filter(|&i| g(2 * i) == i).count() as i64;
    let mut tr1 = 0;
    let mut fundamental = vec![0; n];
    for i in 0..n {
        let image: Vec<i64> = fine_edge(2 * i)
            .iter()
            .zip(fine_edge(2 * i + 1))
            .map(|(x, y)| x + y)
            .collect();
        tr1 += image[i];
        for (f, x) in fundamental.iter_mut().zip(&image) {
            *f += x;
        }
    }
    let degree = fundamental[0];
    assert!(
        fundamental.iter().all(|&x| x == degree),
        "image of the fundamental cycle is a multiple of it"
    );
    (tr0 - tr1, degree)
}

/// Frozen from `cycle_oracle(6, |p| p % 6)`.
const DOUBLING_INDEX: i64 = -1;
const DOUBLING_DEGREE: i64 = 2;

fn whole_index(name: &str, level: usize) -> Result<BigInt, String> {
    let i = corpus::whole_space_instances(level)
        .into_iter()
        .find(|i| i.name == name)
        .ok_or_else(|| format!("no instance {name}"))?;
    let p = IndexProblem::from_model(i.model.as_ref(), i.open_set.clone(), level).map_err(fail(name))?;
    Ok(fixed_point_index(&p).map_err(fail(name))?.value)
}

fn degree_sanity() -> Outcome {
    let (lambda, degree) = cycle_oracle(6, |p| p % 6);
    ensure((lambda, degree) == (DOUBLING_INDEX, DOUBLING_DEGREE), || {
        format!("oracle gives {lambda}, degree {degree}")
    })?;
    ensure(lambda == 1 - degree, || "oracle: λ ≠ 1 - deg".into())?;
    let (id, id_degree) = cycle_oracle(6, |p| p / 2);
    ensure((id, id_degree) == (0, 1), || {
        format!("oracle on the identity gives {id}")
    })?;
    let expected = [
        ("doubling-hexagon", DOUBLING_INDEX),
        ("doubling-interval", DOUBLING_INDEX),
        ("identity-circle", 0),
        ("identity-hexagon", 0),
        ("constant-path", 1),
        ("constant-edge-disk", 1),
        ("full-value-disk", 1),
    ];
    for level in 0..2 {
        for (name, v) in expected {
            let got = whole_index(name, level)?;
            ensure(got == int(v), || format!("{name} level {level}: {got}, expected {v}"))?;
        }
    }
    let cli = [
        ("doubling.json", DOUBLING_INDEX),
        ("identity-circle.json", 0),
        ("constant-disk.json", 1),
        ("constant-point.json", 1),
        ("identity-disk.json", 1),
    ];
    for (file, v) in cli {
        let out = fpindex(&["index", &data(file)]);
        ensure(out.status.code() == Some(0), || {
            format!("fpindex index {file}: {}", stderr(&out))
        })?;
        let got = json(&out)["value"].as_i64();
        ensure(got == Some(v), || {
            format!("fpindex index {file}: {got:?}, expected {v}")
        })?;
    }
    Ok(format!(
        "doubling {DOUBLING_INDEX} = 1 - {DOUBLING_DEGREE}; identity 0; constants 1; full value on D² 1"
    ))
}

// ---------------------------------------------------------------------------
// 8. universal coefficients

fn universal_coefficients() -> Outcome {
    let mut count = 0;
    for (name, c) in corpus::complexes() {
        for level in 0..2 {
            let k = SubdivisionRecord::tower(c.clone(), level)
                .complex_at(level)
                .map_err(fail(name))?
                .clone();
            ensure(verify_uct(&ChainComplexData::new(k)).holds(), || {
                format!("{name} level {level}")
            })?;
            count += 1;
        }
    }
    let r = verify_uct(&ChainComplexData::new(corpus::projective_plane()));
    ensure(r.homology.group(1).torsion == vec![int(2)], || {
        format!("H_1(RP²) = {}", r.homology.group(1))
    })?;
    ensure(r.cohomology.group(2).torsion == vec![int(2)], || {
        format!("H^2(RP²) = {}", r.cohomology.group(2))
    })?;
    ensure(
        r.checks
            .iter()
            .any(|c| c.degree == 2 && c.ext_torsion == vec![int(2)] && c.holds),
        || "Ext(H_1(RP²), Z) not matched with H^2".into(),
    )?;
    Ok(format!("{count} complexes; H_1(RP²) = Z/2 ↔ H^2(RP²) = Z/2"))
}

// ---------------------------------------------------------------------------
// 9. integers against rationals

fn integers_against_rationals() -> Outcome {
    let rp2 = corpus::projective_plane();
    let c = AcyclicCarrier::constant(rp2.clone(), rp2.clone(), Subcomplex::full(rp2)).map_err(fail("RP² carrier"))?;
    let z = check_acyclic(&c, Coefficients::Integers);
    let q = check_acyclic(&c, Coefficients::Rationals);
    ensure(!z.acyclic(), || "RP² value acyclic over Z".into())?;
    ensure(
        z.failures.iter().all(|f| f.homology.group(1).torsion == vec![int(2)]),
        || "integer failures are not Z/2 in degree 1".into(),
    )?;
    ensure(q.acyclic(), || "RP² value not acyclic over Q".into())?;

    let bundle = data("rp2-constant.json");
    let plain = fpindex(&["acyclic", &bundle]);
    ensure(plain.status.code() == Some(4), || {
        format!("fpindex acyclic: exit {:?}", plain.status.code())
    })?;
    let rational = fpindex(&["acyclic", "--oracle-rational", &bundle]);
    ensure(rational.status.code() == Some(0), || {
        format!("fpindex acyclic --oracle-rational: exit {:?}", rational.status.code())
    })?;
    let v = json(&rational);
    ensure(
        v["acyclic"] == Value::Bool(true) && v["factors"][0]["integers"]["acyclic"] == Value::Bool(false),
        || format!("report: {v}"),
    )?;
    Ok(format!(
        "{} values fail over Z with H_1 = Z/2; all pass over Q; CLI exits 4 then 0",
        z.failures.len()
    ))
}

// ---------------------------------------------------------------------------
// 10. determinism

fn data(file: &str) -> String {
    format!("tests/data/{file}")
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fpindex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpindex"))
        .args(args)
        .current_dir(manifest_dir())
        .output()
        .expect("fpindex runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or(Value::Null)
}

fn commands() -> Vec<Vec<String>> {
    let with = |head: &[&str], files: &[&str]| -> Vec<String> {
        head.iter()
            .map(|s| s.to_string())
            .chain(files.iter().map(|f| data(f)))
            .collect()
    };
    let index_set = [
        "identity-disk.json",
        "identity-circle.json",
        "doubling.json",
        "constant-disk.json",
        "constant-point.json",
        "step-all.json",
        "table-disk.json",
    ];
    vec![
        with(&["homology"], &["circle.txt", "rp2.txt", "torus.txt", "disk.txt"]),
        with(&["homology", "--reduced", "--level", "1"], &["rp2.txt", "annulus.txt"]),
        with(&["homology"], &["malformed.txt"]),
        with(&["uct-check"], &["rp2.txt", "torus.txt", "triangle-boundary.txt"]),
        with(&["nerve"], &["hexagon-cover.json"]),
        with(&["index", "--monotone-complete"], &index_set),
        with(&["index"], &["step-middle.json"]),
        with(
            &["index", "--level-cap", "2"],
            &["step-middle.json", "general-step.json"],
        ),
        with(&["index", "--level-cap", "1"], &["general-step.json"]),
        with(&["index", "--stability"], &["doubling.json", "identity-circle.json"]),
        with(
            &["index", "--dominate", "tests/data/annulus-retraction.json"],
            &["identity-inner-circle.json"],
        ),
        with(&["index"], &["rp2-constant.json"]),
        with(
            &["lefschetz"],
            &["doubling.json", "identity-disk.json", "constant-point.json"],
        ),
        with(
            &["verify", "--axiom", "add"],
            &[
                "add-step.json",
                "add-tripling.json",
                "add-quadrupling.json",
                "add-reverse-doubling.json",
            ],
        ),
        with(
            &["verify", "--axiom", "hom"],
            &[
                "hom-doubling-shift.json",
                "hom-rotation-identity.json",
                "hom-moving-constant.json",
                "hom-step-to-jump.json",
                "hom-constants-on-disk.json",
            ],
        ),
        with(
            &["verify", "--axiom", "comm"],
            &[
                "comm-doubling-rotation.json",
                "comm-rotation-doubling.json",
                "comm-step-reflection.json",
                "comm-reflection-step.json",
            ],
        ),
        with(
            &["verify", "--axiom", "norm"],
            &[
                "identity-disk.json",
                "identity-circle.json",
                "doubling.json",
                "constant-disk.json",
                "step-all.json",
            ],
        ),
        with(&["approx"], &["doubling.json"]),
        with(&["approx", "--rule", "greatest"], &["constant-disk.json"]),
        with(&["acyclic"], &["rp2-constant.json", "identity-disk.json"]),
        with(
            &["acyclic", "--oracle-rational"],
            &["rp2-constant.json", "identity-disk.json"],
        ),
    ]
}

fn determinism() -> Outcome {
    let mut runs = 0;
    let mut commands_seen = std::collections::BTreeSet::new();
    for args in commands() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        commands_seen.insert(args[0].to_string());
        let reference = fpindex(&args);
        for threads in ["1", "1", "2", "4", "16"] {
            let mut with_threads = vec!["--threads", threads];
            with_threads.extend(&args);
            let again = fpindex(&with_threads);
            ensure(
                again.stdout == reference.stdout
                    && again.stderr == reference.stderr
                    && again.status.code() == reference.status.code(),
                || format!("`fpindex {}` differs with --threads {threads}", args.join(" ")),
            )?;
            runs += 1;
        }
        let out_file = std::env::temp_dir().join(format!("fpindex-acceptance-{}.json", std::process::id()));
        let mut to_file = vec!["--out", out_file.to_str().expect("utf-8 path")];
        to_file.extend(&args);
        let written = fpindex(&to_file);
        let content = std::fs::read(&out_file).unwrap_or_default();
        let _ = std::fs::remove_file(&out_file);
        ensure(written.status.code() == reference.status.code(), || {
            format!("--out changes the exit of {}", args[0])
        })?;
        ensure(reference.stdout.is_empty() || content == reference.stdout, || {
            format!("--out differs from standard output for `fpindex {}`", args.join(" "))
        })?;
    }
    ensure(commands_seen.len() == 8, || {
        format!("only {} subcommands", commands_seen.len())
    })?;
    Ok(format!(
        "{runs} repeated runs over {} subcommands, byte identical",
        commands_seen.len()
    ))
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [Criterion; 10] = [
        ("chain algebra soundness", chain_algebra),
        ("Hopf trace and normalization", hopf_trace),
        ("approximation correctness", approximation_correctness),
        ("choice independence", choice_independence),
        ("axiom suite", axiom_suite),
        ("stability under subdivision", stability),
        ("degree sanity", degree_sanity),
        ("universal coefficients", universal_coefficients),
        ("integers against rationals", integers_against_rationals),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", n + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why}", n + 1);
                failed += 1;
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
