//! Theorem-level checks: circulant ranks, Galois-orbit ranks of the grading element,
//! nondegeneracy, escape from proper subalgebras, and rigidity of horizontal directions.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{generated_subalgebra, AlgebraElement, HodgeAlgebra};
use crate::arith::{linalg, poly_gcd, PolyQ, Rational};
use crate::cm::{
    galois_act_grading, grading_vector, Flavor, GaloisElement, OrientedCMField,
    GROUP_ENUMERATION_CAP,
};
use crate::combinatorics::{dodson_check, edge_orbits, is_block_system, support_graph, SupportGraph};
use crate::error::{usage, Error, Result};

/// Entries `A_0..A_{p-1}` of a `p × p` circulant whose rows are successive cyclic shifts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CirculantSpec {
    entries: Vec<i64>,
}

fn is_odd_prime(p: usize) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl CirculantSpec {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if !is_odd_prime(entries.len()) {
            return usage(format!(
                "circulant length {} is not an odd prime",
                entries.len()
            ));
        }
        Ok(CirculantSpec { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn p(&self) -> usize {
        self.entries.len()
    }

    /// Row `s` is the entry list shifted left by `s`.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let p = self.p();
        (0..p)
            .map(|s| (0..p).map(|t| self.entries[(t + s) % p]).collect())
            .collect()
    }
}

/// `p - deg gcd(f, x^p - 1)` with `f = Σ A_k x^k`.
pub fn circulant_rank(spec: &CirculantSpec) -> usize {
    spec.p() - circulant_gcd_degree(spec)
}

fn circulant_gcd_degree(spec: &CirculantSpec) -> usize {
    let f = PolyQ::from_ints(spec.entries());
    let g = poly_gcd(&f, &PolyQ::x_pow_minus_one(spec.p()));
    g.degree().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyBranch {
    RankP,
    AllEqual,
    NotApplicable,
}

/// For odd entries the circulant has full rank `p` or constant entries.
pub fn ribet_dichotomy(spec: &CirculantSpec) -> Result<DichotomyBranch> {
    if spec.entries().iter().any(|a| a % 2 == 0) {
        return usage("dichotomy needs odd entries");
    }
    let rank = circulant_rank(spec);
    if rank == spec.p() {
        Ok(DichotomyBranch::RankP)
    } else if spec.entries().iter().all(|&a| a == spec.entries()[0]) {
        Ok(DichotomyBranch::AllEqual)
    } else {
        Err(Error::TheoremViolation(format!(
            "odd circulant {:?} has rank {rank}, neither {} nor constant",
            spec.entries(),
            spec.p()
        )))
    }
}

fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let q: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    linalg::rank(&q)
}

/// Rank and distinct members of the Galois orbit of the grading vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRank {
    pub rank: usize,
    /// Distinct orbit vectors in pair coordinates, sorted.
    pub vectors: Vec<Vec<i64>>,
    pub group_order: usize,
}

fn orbit_of(field: &OrientedCMField, group: &[GaloisElement]) -> OrbitRank {
    let a = grading_vector(field);
    let vectors: BTreeSet<Vec<i64>> = group
        .iter()
        .map(|g| galois_act_grading(field, g, &a).values().to_vec())
        .collect();
    let vectors: Vec<Vec<i64>> = vectors.into_iter().collect();
    OrbitRank {
        rank: integer_rank(&vectors),
        vectors,
        group_order: group.len(),
    }
}

/// Rank over Q of `{g·A : g ∈ Gal}`.
pub fn orbit_rank(field: &OrientedCMField) -> Result<OrbitRank> {
    Ok(orbit_of(field, &field.galois().elements()?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NondegeneracyVerdict {
    Nondegenerate,
    DegenerateUnderSpanAssumption,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub orbit_rank: usize,
    pub circulant_rank: Option<usize>,
    pub circulant_entries: Option<Vec<i64>>,
    pub gcd_degree: Option<usize>,
    pub cartan_bound: usize,
    pub verdict: NondegeneracyVerdict,
    pub dichotomy_branch: DichotomyBranch,
    pub orbit_vectors: Vec<Vec<i64>>,
    pub group_order: usize,
    pub group_complete: bool,
}

/// An element of order `p = n` whose orbit through `w_1` meets every conjugate pair once,
/// together with the grading values along that orbit.
fn circulant_path(field: &OrientedCMField, group: &[GaloisElement]) -> Option<CirculantSpec> {
    let n = field.n();
    if !is_odd_prime(n) {
        return None;
    }
    let pairs = field.pairs();
    let start = pairs.position(1);
    let a = grading_vector(field);
    group.iter().filter(|g| g.order() == n).find_map(|g| {
        let mut pos = start;
        let mut seen = BTreeSet::new();
        let mut entries = Vec::with_capacity(n);
        for _ in 0..n {
            let k = pairs.signed(pos);
            if !seen.insert(k.abs()) {
                return None;
            }
            entries.push(a.get(k));
            pos = g.apply(pos);
        }
        CirculantSpec::new(entries).ok()
    })
}

pub fn nondegeneracy_verdict(field: &OrientedCMField) -> Result<RankReport> {
    let n = field.n();
    let (group, complete) = match field.galois().elements_capped(GROUP_ENUMERATION_CAP) {
        Ok(g) => (g, true),
        Err(partial) => (partial, false),
    };
    let orbit = orbit_of(field, &group);
    let circ = if complete { circulant_path(field, &group) } else { None };
    let circulant_rank_value = circ.as_ref().map(circulant_rank);
    let branch = match &circ {
        Some(spec) => ribet_dichotomy(spec)?,
        None => DichotomyBranch::NotApplicable,
    };
    if orbit.rank > n {
        return Err(Error::TheoremViolation(format!(
            "orbit rank {} exceeds n = {n}",
            orbit.rank
        )));
    }
    if let Some(c) = circulant_rank_value {
        if c > orbit.rank {
            return Err(Error::TheoremViolation(format!(
                "circulant rank {c} exceeds orbit rank {}",
                orbit.rank
            )));
        }
    }
    let verdict = if orbit.rank == n {
        NondegeneracyVerdict::Nondegenerate
    } else if complete {
        NondegeneracyVerdict::DegenerateUnderSpanAssumption
    } else {
        NondegeneracyVerdict::Inconclusive
    };
    Ok(RankReport {
        orbit_rank: orbit.rank,
        gcd_degree: circ.as_ref().map(circulant_gcd_degree),
        circulant_rank: circulant_rank_value,
        circulant_entries: circ.map(|c| c.entries),
        cartan_bound: n,
        verdict,
        dichotomy_branch: branch,
        orbit_vectors: orbit.vectors,
        group_order: orbit.group_order,
        group_complete: complete,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeStatus {
    Applicable,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub nilpotency_degree: usize,
    pub n: usize,
    pub status: EscapeStatus,
    pub single_block: bool,
    pub components: Vec<Vec<u64>>,
    /// Dimension of the subalgebra generated by the diagonal Cartan elements and `N`.
    pub closure_dimension: Option<usize>,
    pub full_dimension: usize,
}

/// For a rational nilpotent `N` of degree `l > n` at a nondegenerate point, the Cartan
/// elements together with `N` generate all of `sp(2n)`.
pub fn escape_verdict(alg: &Arc<HodgeAlgebra>, nilpotent: &AlgebraElement) -> Result<EscapeReport> {
    if !nilpotent.algebra().same_as(alg) {
        return usage("element belongs to a different algebra");
    }
    let rank = nondegeneracy_verdict(alg.field())?;
    if rank.verdict != NondegeneracyVerdict::Nondegenerate {
        return Err(Error::Precondition(format!(
            "base point is not certified nondegenerate (orbit rank {} < {})",
            rank.orbit_rank,
            alg.n()
        )));
    }
    if !nilpotent.is_rational()? {
        return Err(Error::NotRational);
    }
    let l = nilpotent.nilpotency_degree()?;
    let n = alg.n();
    let (_, partition) = support_graph(nilpotent);
    let single_block = partition.is_single_block();
    let full = alg.dimension();
    let mut report = EscapeReport {
        nilpotency_degree: l,
        n,
        status: EscapeStatus::NotApplicable,
        single_block,
        components: partition.blocks().to_vec(),
        closure_dimension: None,
        full_dimension: full,
    };
    if l <= n {
        return Ok(report);
    }
    if !single_block {
        return Err(Error::TheoremViolation(format!(
            "rational nilpotent of degree {l} > {n} has a nontrivial partition"
        )));
    }
    let dim = generated_subalgebra(&cartan_split_seeds(alg, nilpotent)?)?.dimension;
    if dim != full {
        return Err(Error::TheoremViolation(format!(
            "closure dimension {dim} differs from {full}"
        )));
    }
    report.status = EscapeStatus::Applicable;
    report.closure_dimension = Some(dim);
    Ok(report)
}

/// Seeds generating the same subalgebra as the diagonal Cartan elements plus `v`. Distinct
/// canonical labels carry distinct roots, so `ad` of the Cartan separates `v` into its
/// root components; each nonzero component is a multiple of a single root vector.
fn cartan_split_seeds(alg: &Arc<HodgeAlgebra>, v: &AlgebraElement) -> Result<Vec<AlgebraElement>> {
    let mut seeds = (1..=alg.n() as i32)
        .map(|k| AlgebraElement::root_vector(alg, k, k))
        .collect::<Result<Vec<_>>>()?;
    for r in v.support().filter(|r| !r.is_cartan()) {
        seeds.push(AlgebraElement::root_vector(alg, r.i, r.j)?);
    }
    Ok(seeds)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityHypotheses {
    pub weight: u32,
    pub h_top: usize,
    pub h_next: usize,
    pub four_divides_degree: bool,
    pub hold: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeOrbitReport {
    pub edges: Vec<(u64, u64)>,
    /// `|p_a - p_b|` for each edge.
    pub bidegrees: Vec<u64>,
    pub forms_block_system: bool,
    pub dodson_applies: bool,
    /// Whether averaging the root vector of the first edge lost part of the orbit;
    /// `None` for abstract fields.
    pub reynolds_cancelled: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rigidity {
    Rigid,
    NotRigid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub hypotheses: RigidityHypotheses,
    pub orbit_count: usize,
    /// Admissible orbits containing an edge of nonzero bidegree.
    pub admissible_orbits: Vec<EdgeOrbitReport>,
    pub verdict: Rigidity,
}

/// Edge-orbit form of the statement that no rational horizontal direction leaves `g^{0,0}`
/// when `h^{w,0} = h^{w-1,1} = 1`, the weight exceeds one, and `4 ∤ 2n`.
pub fn rigidity_verdict(field: &OrientedCMField) -> Result<RigidityReport> {
    let galois = field.galois();
    let w = field.weight();
    let h = field.orientation().hodge_numbers();
    let degree = galois.degree();
    let hypotheses = RigidityHypotheses {
        weight: w,
        h_top: h[0],
        h_next: h[1],
        four_divides_degree: degree.is_multiple_of(4),
        hold: w > 1 && h[0] == 1 && h[1] == 1 && !degree.is_multiple_of(4),
    };
    let p_of = |label: u64| -> i64 {
        let k = field.signed_of_label(label).expect("label in field");
        field.bidegree_of(k).0 as i64
    };
    let orbits = edge_orbits(galois);
    let alg = match galois.flavor() {
        Flavor::Cyclotomic { .. } => Some(HodgeAlgebra::new(field.clone())),
        Flavor::Abstract => None,
    };
    let mut admissible = Vec::new();
    for edges in &orbits {
        let bidegrees: Vec<u64> = edges
            .iter()
            .map(|&(a, b)| (p_of(a) - p_of(b)).unsigned_abs())
            .collect();
        if bidegrees.iter().any(|&d| d > 1) || bidegrees.iter().all(|&d| d == 0) {
            continue;
        }
        let mut graph = SupportGraph::empty(galois.labels());
        for &(a, b) in edges {
            graph.add_edge(a, b);
        }
        let partition = graph.components();
        let forms_block_system = is_block_system(&partition, galois)?.is_block_system;
        let dodson_applies = forms_block_system && dodson_check(&partition, galois)?;
        let reynolds_cancelled = match &alg {
            Some(alg) => {
                let (a, b) = edges[0];
                let (i, j) = (
                    field.signed_of_label(a).expect("label"),
                    field.signed_of_label(b).expect("label"),
                );
                let avg = AlgebraElement::root_vector(alg, i, j)?.reynolds_average()?;
                Some(!avg.cancelled.is_empty())
            }
            None => None,
        };
        admissible.push(EdgeOrbitReport {
            edges: edges.clone(),
            bidegrees,
            forms_block_system,
            dodson_applies,
            reynolds_cancelled,
        });
    }
    let verdict = if admissible.is_empty() {
        Rigidity::Rigid
    } else {
        Rigidity::NotRigid
    };
    if hypotheses.hold && verdict == Rigidity::NotRigid {
        return Err(Error::TheoremViolation(format!(
            "horizontal rational directions exist under the rigidity hypotheses: {:?}",
            admissible[0].edges
        )));
    }
    Ok(RigidityReport {
        hypotheses,
        orbit_count: orbits.len(),
        admissible_orbits: admissible,
        verdict,
    })
}
