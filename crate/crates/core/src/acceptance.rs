//! The acceptance suite behind `selftest`. Every criterion is seeded and deterministic;
//! wall-clock time is recorded but never serialized.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{generated_subalgebra, regular_nilpotent_blocks, AlgebraElement, HodgeAlgebra};
use crate::arith::{linalg, CyclotomicNumber, Rational};
use crate::cm::{
    build_cyclotomic_cm, enumerate_orientations, validate_orientation, GaloisCMData, Orientation,
    OrientedCMField,
};
use crate::combinatorics::{is_block_system, support_graph, trivial_partition_check};
use crate::error::{Error, Result};
use crate::verifiers::{
    circulant_rank, escape_verdict, orbit_rank, ribet_dichotomy, rigidity_verdict, CirculantSpec,
    DichotomyBranch, EscapeStatus, Rigidity,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub schema_version: u32,
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

type QMatrix = Vec<Vec<Rational>>;

fn rng_for(seed: u64, id: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(id as u64))
}

fn timed(id: u32, name: &'static str, f: impl FnOnce() -> Result<(bool, Value)>) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, json!({ "error": e.to_string(), "reason": e.reason() })),
    };
    CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn q(x: i64) -> Rational {
    Rational::from_integer(x.into())
}

fn random_odd(rng: &mut ChaCha8Rng) -> i64 {
    2 * rng.gen_range(-5i64..5) + 1
}

/// Random odd-weight orientation: each positive label of a conjugate pair gets a random `p`.
pub fn random_orientation(galois: &GaloisCMData, weight: u32, rng: &mut ChaCha8Rng) -> Orientation {
    let conj = galois.conjugation();
    let mut assignment = BTreeMap::new();
    for (pos, &label) in galois.labels().iter().enumerate() {
        let bar = galois.label(conj.apply(pos));
        if label < bar {
            let p = rng.gen_range(0..=weight);
            assignment.insert(label, (p, weight - p));
            assignment.insert(bar, (weight - p, p));
        }
    }
    Orientation { weight, assignment }
}

fn random_element(alg: &Arc<HodgeAlgebra>, rng: &mut ChaCha8Rng) -> Result<AlgebraElement> {
    let big = alg.conductor();
    let roots = alg.roots();
    let count = rng.gen_range(1..=3);
    let terms: Vec<(i32, i32, CyclotomicNumber)> = (0..count)
        .map(|_| {
            let r = roots[rng.gen_range(0..roots.len())];
            let mut c = rng.gen_range(1i64..=3);
            if rng.gen_bool(0.5) {
                c = -c;
            }
            let coeff = &CyclotomicNumber::from_int(big, c)
                * &CyclotomicNumber::zeta_power(big, rng.gen_range(0..big as i64));
            (r.i, r.j, coeff)
        })
        .collect();
    AlgebraElement::from_terms(alg, terms)
}

/// Blocks of a nilpotent in a symplectic basis: `A` strictly upper triangular, `B` symmetric.
#[allow(clippy::needless_range_loop)]
pub fn random_nilpotent_blocks(n: usize, rng: &mut ChaCha8Rng) -> (QMatrix, QMatrix) {
    let mut a = vec![vec![q(0); n]; n];
    let mut b = vec![vec![q(0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            a[i][j] = q(rng.gen_range(-1..=2));
        }
        for j in i..n {
            let x = q(rng.gen_range(-1..=1));
            b[i][j] = x.clone();
            b[j][i] = x;
        }
    }
    (a, b)
}

fn standard_field(m: u64, weight: u32, classes: &[&[u64]]) -> Result<OrientedCMField> {
    validate_orientation(&build_cyclotomic_cm(m)?, &Orientation::from_classes(weight, classes))
}

fn criterion_1(seed: u64) -> Result<(bool, Value)> {
    let mut rng = rng_for(seed, 1);
    let mut detail = BTreeMap::new();
    let mut ok = true;
    for p in [3usize, 5, 7, 11, 13] {
        let (mut agree, mut full) = (0, 0);
        for _ in 0..200 {
            let spec = CirculantSpec::new((0..p).map(|_| random_odd(&mut rng)).collect())?;
            let rows: QMatrix = spec
                .matrix()
                .iter()
                .map(|r| r.iter().map(|&x| q(x)).collect())
                .collect();
            let rank = circulant_rank(&spec);
            if rank == linalg::rank(&rows) {
                agree += 1;
            }
            if rank == p {
                full += 1;
            }
        }
        ok &= agree == 200;
        detail.insert(p.to_string(), json!({ "agree": agree, "full_rank": full }));
    }
    Ok((ok, json!(detail)))
}

fn criterion_2() -> Result<(bool, Value)> {
    let g = build_cyclotomic_cm(7)?;
    let ranks = |h: &[usize]| -> Result<Vec<usize>> {
        enumerate_orientations(&g, 3, h)?
            .par_iter()
            .map(|o| Ok(orbit_rank(&validate_orientation(&g, o)?)?.rank))
            .collect()
    };
    let mixed = ranks(&[1, 2, 2, 1])?;
    let split = ranks(&[3, 0, 0, 3])?;
    let count = |v: &[usize], r: usize| v.iter().filter(|&&x| x == r).count();
    let ok = mixed.len() == 24
        && count(&mixed, 3) == 24
        && split.len() == 8
        && count(&split, 1) == 2
        && count(&split, 3) == 6;
    Ok((
        ok,
        json!({
            "h_1221": { "orientations": mixed.len(), "rank_3": count(&mixed, 3) },
            "h_3003": { "orientations": split.len(), "rank_1": count(&split, 1), "rank_3": count(&split, 3) },
        }),
    ))
}

fn criterion_3(seed: u64) -> Result<(bool, Value)> {
    let mut rng = rng_for(seed, 3);
    let mut detail = BTreeMap::new();
    for p in [3usize, 5, 7, 11] {
        let (mut rank_p, mut equal) = (0, 0);
        for _ in 0..1000 {
            let entries = if rng.gen_bool(0.1) {
                vec![random_odd(&mut rng); p]
            } else {
                (0..p).map(|_| random_odd(&mut rng)).collect()
            };
            match ribet_dichotomy(&CirculantSpec::new(entries)?)? {
                DichotomyBranch::RankP => rank_p += 1,
                DichotomyBranch::AllEqual => equal += 1,
                DichotomyBranch::NotApplicable => unreachable!(),
            }
        }
        detail.insert(p.to_string(), json!({ "rank_p": rank_p, "all_equal": equal }));
    }
    Ok((true, json!(detail)))
}

fn criterion_4(seed: u64) -> Result<(bool, Value)> {
    let mut detail = BTreeMap::new();
    let mut ok = true;
    for m in [7u64, 9, 11] {
        let mut rng = rng_for(seed ^ m, 4);
        let g = build_cyclotomic_cm(m)?;
        let (mut blocks, mut rational, mut cancelled, mut nontrivial) = (0, 0, 0, 0);
        for _ in 0..10 {
            let o = random_orientation(&g, 3, &mut rng);
            let alg = HodgeAlgebra::new(validate_orientation(&g, &o)?);
            for _ in 0..10 {
                let avg = random_element(&alg, &mut rng)?.reynolds_average()?;
                if !avg.cancelled.is_empty() {
                    cancelled += 1;
                }
                if avg.element.is_rational()? {
                    rational += 1;
                }
                let (_, p) = support_graph(&avg.element);
                if !p.is_single_block() && p.blocks().len() < g.degree() {
                    nontrivial += 1;
                }
                if is_block_system(&p, &g)?.is_block_system {
                    blocks += 1;
                }
            }
        }
        ok &= blocks == 100 && rational == 100;
        detail.insert(
            m.to_string(),
            json!({
                "samples": 100,
                "block_systems": blocks,
                "rational": rational,
                "with_cancellation": cancelled,
                "nontrivial_partitions": nontrivial,
            }),
        );
    }
    Ok((ok, json!(detail)))
}

fn criterion_5(seed: u64) -> Result<(bool, Value)> {
    let mut detail = BTreeMap::new();
    let mut ok = true;
    for m in [7u64, 9, 11] {
        let mut rng = rng_for(seed ^ m, 5);
        let g = build_cyclotomic_cm(m)?;
        let alg = HodgeAlgebra::new(validate_orientation(&g, &random_orientation(&g, 3, &mut rng))?);
        let n = alg.n();
        let (mut checked, mut long, mut max_degree) = (0, 0, 0);
        let mut samples: Vec<AlgebraElement> = Vec::new();
        for _ in 0..4 {
            let (a, b) = random_nilpotent_blocks(n, &mut rng);
            samples.push(AlgebraElement::rational_nilpotent(&alg, &a, &b)?);
        }
        let (a, b) = regular_nilpotent_blocks(n);
        samples.push(AlgebraElement::rational_nilpotent(&alg, &a, &b)?);
        // chains X_{1,2} + X_{2,3} + ... of increasing length
        for len in 1..n {
            let one = CyclotomicNumber::one(alg.conductor());
            samples.push(AlgebraElement::from_terms(
                &alg,
                (1..=len as i32).map(|k| (k, k + 1, one.clone())),
            )?);
        }
        for v in &samples {
            let r = trivial_partition_check(v)?;
            checked += 1;
            max_degree = max_degree.max(r.nilpotency_degree);
            if r.hypothesis_met && r.rational == Some(true) {
                long += 1;
                ok &= r.single_block;
            }
            ok &= r.nilpotency_degree <= r.max_component_size;
        }
        ok &= long > 0;
        detail.insert(
            m.to_string(),
            json!({ "checked": checked, "rational_long": long, "max_degree": max_degree }),
        );
    }
    Ok((ok, json!(detail)))
}

fn bracket_lemma(alg: &Arc<HodgeAlgebra>) -> Result<(usize, usize)> {
    let n = alg.n() as i32;
    let signed: Vec<i32> = (1..=n).chain((1..=n).map(|k| -k)).collect();
    let (mut total, mut good) = (0, 0);
    for &l in &signed {
        for &k in &signed {
            for &m in &signed {
                let classes = [l.abs(), k.abs(), m.abs()];
                if classes[0] == classes[1] || classes[1] == classes[2] || classes[0] == classes[2] {
                    continue;
                }
                total += 1;
                let b = AlgebraElement::root_vector(alg, l, k)?
                    .bracket(&AlgebraElement::root_vector(alg, k, m)?)?;
                let target = alg.canonical(l, m).0;
                if b.support().collect::<Vec<_>>() == vec![target] {
                    good += 1;
                }
            }
        }
    }
    Ok((total, good))
}

fn full_closure(alg: &Arc<HodgeAlgebra>) -> Result<usize> {
    let all = alg
        .roots()
        .iter()
        .map(|r| AlgebraElement::root_vector(alg, r.i, r.j))
        .collect::<Result<Vec<_>>>()?;
    Ok(generated_subalgebra(&all)?.dimension)
}

fn criterion_6() -> Result<(bool, Value)> {
    let a3 = HodgeAlgebra::new(standard_field(7, 3, &[&[1], &[2, 3], &[4, 5], &[6]])?);
    let a4 = HodgeAlgebra::new(standard_field(16, 1, &[&[1, 3, 5, 7], &[9, 11, 13, 15]])?);
    let (t3, g3) = bracket_lemma(&a3)?;
    let (t4, g4) = bracket_lemma(&a4)?;
    let (d3, d4) = (full_closure(&a3)?, full_closure(&a4)?);
    let ok = t3 == g3 && t4 == g4 && d3 == 21 && d4 == 36;
    Ok((
        ok,
        json!({
            "n3": { "triples": t3, "multiples": g3, "closure_dimension": d3 },
            "n4": { "triples": t4, "multiples": g4, "closure_dimension": d4 },
        }),
    ))
}

fn criterion_7(seed: u64) -> Result<(bool, Value)> {
    let mut rng = rng_for(seed, 7);
    let alg = HodgeAlgebra::new(standard_field(7, 3, &[&[1], &[2, 3], &[4, 5], &[6]])?);
    let mut reports = Vec::new();
    let (a, b) = regular_nilpotent_blocks(3);
    let mut candidates = vec![AlgebraElement::rational_nilpotent(&alg, &a, &b)?];
    while candidates.len() < 3 {
        let (a, b) = random_nilpotent_blocks(3, &mut rng);
        let v = AlgebraElement::rational_nilpotent(&alg, &a, &b)?;
        if v.nilpotency_degree()? >= 4 {
            candidates.push(v);
        }
    }
    let mut ok = true;
    for v in &candidates {
        let r = escape_verdict(&alg, v)?;
        ok &= r.status == EscapeStatus::Applicable && r.closure_dimension == Some(21);
        reports.push(json!({ "degree": r.nilpotency_degree, "closure_dimension": r.closure_dimension }));
    }
    Ok((ok, json!({ "nilpotents": reports })))
}

fn criterion_8() -> Result<(bool, Value)> {
    let mut detail = BTreeMap::new();
    let mut ok = true;
    for m in [7u64, 9] {
        let g = build_cyclotomic_cm(m)?;
        let orientations = enumerate_orientations(&g, 5, &[1; 6])?;
        let verdicts: Vec<Result<Rigidity>> = orientations
            .par_iter()
            .map(|o| Ok(rigidity_verdict(&validate_orientation(&g, o)?)?.verdict))
            .collect();
        let violations = verdicts
            .iter()
            .filter(|v| matches!(v, Err(Error::TheoremViolation(_))))
            .count();
        let rigid = verdicts.iter().filter(|v| matches!(v, Ok(Rigidity::Rigid))).count();
        ok &= orientations.len() == 48 && rigid == 48 && violations == 0;
        detail.insert(
            m.to_string(),
            json!({ "orientations": orientations.len(), "rigid": rigid, "violations": violations }),
        );
    }
    Ok((ok, json!(detail)))
}

/// Criteria 1 through 8, run in parallel and reported in order.
pub fn run_core(seed: u64) -> Vec<CriterionResult> {
    let tasks: Vec<(u32, &'static str)> = vec![
        (1, "circulant rank matches elimination"),
        (2, "orbit ranks at conductor 7"),
        (3, "odd circulant dichotomy"),
        (4, "averaged elements give block systems"),
        (5, "nilpotency degree and component sizes"),
        (6, "bracket lemma and full closure"),
        (7, "escape closure at a nondegenerate point"),
        (8, "rigidity sweep at weight 5"),
    ];
    tasks
        .into_par_iter()
        .map(|(id, name)| {
            timed(id, name, || match id {
                1 => criterion_1(seed),
                2 => criterion_2(),
                3 => criterion_3(seed),
                4 => criterion_4(seed),
                5 => criterion_5(seed),
                6 => criterion_6(),
                7 => criterion_7(seed),
                _ => criterion_8(),
            })
        })
        .collect()
}

/// The full suite. Criterion 9 reruns criteria 1 through 8 and compares serialized output.
pub fn selftest(seed: u64) -> SelftestReport {
    let mut criteria = run_core(seed);
    let start = Instant::now();
    let first = serde_json::to_string(&criteria).expect("serializable");
    let second = serde_json::to_string(&run_core(seed)).expect("serializable");
    criteria.push(CriterionResult {
        id: 9,
        name: "repeated runs are byte-identical",
        passed: first == second,
        detail: json!({ "bytes": first.len() }),
        elapsed: start.elapsed(),
    });
    SelftestReport {
        schema_version: SCHEMA_VERSION,
        seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}
