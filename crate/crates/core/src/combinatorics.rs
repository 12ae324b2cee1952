//! Support graphs of algebra elements, their component partitions, and block-system checks
//! for the Galois action on embedding labels.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::cm::{GaloisCMData, GaloisElement, OrientedCMField};
use crate::error::{Error, Result};

/// Undirected graph on embedding labels. Edges are stored as `(min, max)`; self-loops are
/// kept but ignored for connectivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportGraph {
    pub vertices: Vec<u64>,
    pub edges: BTreeSet<(u64, u64)>,
}

/// Disjoint blocks covering a label set, each sorted, ordered by smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<u64>>,
}

/// A generator and a block whose image is not a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockWitness {
    /// Index into the field's generator list.
    pub generator: usize,
    /// Image of each label under the generator, as `(label, image)`.
    pub generator_images: Vec<(u64, u64)>,
    pub block: Vec<u64>,
    pub image: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockVerdict {
    pub is_block_system: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BlockWitness>,
}

/// Outcome of checking "degree > n forces a single block" on one nilpotent element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialPartitionReport {
    pub nilpotency_degree: usize,
    pub max_component_size: usize,
    pub n: usize,
    /// `None` when rationality cannot be decided (abstract fields).
    pub rational: Option<bool>,
    pub hypothesis_met: bool,
    pub single_block: bool,
    pub consistent: bool,
}

impl Partition {
    /// Normalizes block order; rejects empty or overlapping blocks.
    pub fn new(blocks: Vec<Vec<u64>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut blocks: Vec<Vec<u64>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Usage("partition has an empty block".into()));
            }
            for &x in b {
                if !seen.insert(x) {
                    return Err(Error::Usage(format!("label {x} appears in two blocks")));
                }
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { blocks })
    }

    pub fn singletons(labels: &[u64]) -> Self {
        Partition::new(labels.iter().map(|&l| vec![l]).collect()).expect("distinct labels")
    }

    pub fn blocks(&self) -> &[Vec<u64>] {
        &self.blocks
    }

    pub fn labels(&self) -> BTreeSet<u64> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn block_of(&self, label: u64) -> Option<&[u64]> {
        self.blocks
            .iter()
            .find(|b| b.binary_search(&label).is_ok())
            .map(Vec::as_slice)
    }

    pub fn max_block_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_single_block(&self) -> bool {
        self.blocks.len() == 1
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

impl SupportGraph {
    pub fn empty(labels: &[u64]) -> Self {
        SupportGraph {
            vertices: labels.to_vec(),
            edges: BTreeSet::new(),
        }
    }

    pub fn add_edge(&mut self, a: u64, b: u64) {
        self.edges.insert((a.min(b), a.max(b)));
    }

    pub fn components(&self) -> Partition {
        let index: BTreeMap<u64, usize> =
            self.vertices.iter().enumerate().map(|(k, &l)| (l, k)).collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        for &(a, b) in &self.edges {
            if a == b {
                continue;
            }
            let (ra, rb) = (find(&mut parent, index[&a]), find(&mut parent, index[&b]));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        for (k, &l) in self.vertices.iter().enumerate() {
            let r = find(&mut parent, k);
            groups.entry(r).or_default().push(l);
        }
        Partition::new(groups.into_values().collect()).expect("components are disjoint")
    }
}

fn add_support(graph: &mut SupportGraph, v: &AlgebraElement) {
    let field = v.algebra().field();
    for r in v.support() {
        graph.add_edge(field.label_of(r.i), field.label_of(r.j));
        graph.add_edge(field.label_of(-r.j), field.label_of(-r.i));
    }
}

/// `Γ_v` and its connected components `π_v`.
pub fn support_graph(v: &AlgebraElement) -> (SupportGraph, Partition) {
    let mut g = SupportGraph::empty(v.algebra().field().galois().labels());
    add_support(&mut g, v);
    let p = g.components();
    (g, p)
}

/// Union of the support graphs of a generating list, and its components.
pub fn merged_graph(field: &OrientedCMField, vs: &[AlgebraElement]) -> Result<(SupportGraph, Partition)> {
    let mut g = SupportGraph::empty(field.galois().labels());
    for v in vs {
        if v.algebra().field() != field {
            return Err(Error::Usage("elements belong to different fields".into()));
        }
        add_support(&mut g, v);
    }
    let p = g.components();
    Ok((g, p))
}

fn image_of(galois: &GaloisCMData, g: &GaloisElement, block: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = block
        .iter()
        .map(|&l| galois.label(g.apply(galois.position(l).expect("label in field"))))
        .collect();
    out.sort_unstable();
    out
}

/// Checks that every generator maps every block onto a block. The first failure in
/// generator-then-block order is returned as the witness. On success all blocks must have
/// one common size dividing `2n`, since the action is transitive.
pub fn is_block_system(partition: &Partition, galois: &GaloisCMData) -> Result<BlockVerdict> {
    let labels: BTreeSet<u64> = galois.labels().iter().copied().collect();
    if partition.labels() != labels {
        return Err(Error::Usage("partition does not cover exactly the field labels".into()));
    }
    let blocks: BTreeSet<&Vec<u64>> = partition.blocks().iter().collect();
    for (k, g) in galois.generators().iter().enumerate() {
        for b in partition.blocks() {
            let image = image_of(galois, g, b);
            if !blocks.contains(&image) {
                let generator_images = galois
                    .labels()
                    .iter()
                    .enumerate()
                    .map(|(pos, &l)| (l, galois.label(g.apply(pos))))
                    .collect();
                return Ok(BlockVerdict {
                    is_block_system: false,
                    witness: Some(BlockWitness {
                        generator: k,
                        generator_images,
                        block: b.clone(),
                        image,
                    }),
                });
            }
        }
    }
    let size = partition.blocks()[0].len();
    if partition.blocks().iter().any(|b| b.len() != size) || !galois.degree().is_multiple_of(size) {
        return Err(Error::TheoremViolation(format!(
            "block system with unequal block sizes or size not dividing {}",
            galois.degree()
        )));
    }
    Ok(BlockVerdict {
        is_block_system: true,
        witness: None,
    })
}

/// Degree `l ≤` largest component always; for rational `v`, `l > n` forces `π_v` to be a
/// single block. A failure of either is a theorem violation.
pub fn trivial_partition_check(v: &AlgebraElement) -> Result<TrivialPartitionReport> {
    let l = v.nilpotency_degree()?;
    let (_, p) = support_graph(v);
    let n = v.algebra().n();
    let rational = match v.is_rational() {
        Ok(r) => Some(r),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    let max = p.max_block_size();
    let hypothesis_met = l > n;
    let single_block = p.is_single_block();
    if l > max {
        return Err(Error::TheoremViolation(format!(
            "nilpotency degree {l} exceeds largest component size {max}"
        )));
    }
    if rational == Some(true) && hypothesis_met && !single_block {
        return Err(Error::TheoremViolation(format!(
            "rational nilpotent of degree {l} > {n} with {} components",
            p.blocks().len()
        )));
    }
    Ok(TrivialPartitionReport {
        nilpotency_degree: l,
        max_component_size: max,
        n,
        rational,
        hypothesis_met,
        single_block,
        consistent: true,
    })
}

/// For a block system containing a conjugation-closed block of size four that splits into a
/// 2-element block and its conjugate, `4 | 2n` must hold. Returns whether such a block occurs.
pub fn dodson_check(partition: &Partition, galois: &GaloisCMData) -> Result<bool> {
    let conj = galois.conjugation();
    let mut applies = false;
    for b in partition.blocks() {
        if b.len() != 4 || image_of(galois, conj, b) != *b {
            continue;
        }
        let a = b[0];
        let abar = galois.label(conj.apply(galois.position(a).expect("label in field")));
        if abar == b[1] || abar == b[2] || abar == b[3] {
            applies = true;
            if !galois.degree().is_multiple_of(4) {
                return Err(Error::TheoremViolation(format!(
                    "conjugation-closed block {b:?} of size 4 but 4 does not divide {}",
                    galois.degree()
                )));
            }
        }
    }
    Ok(applies)
}

/// Galois orbits of unordered label pairs `{a, b}` with `a ≠ b`, each sorted, ordered by
/// their smallest edge.
pub fn edge_orbits(galois: &GaloisCMData) -> Vec<Vec<(u64, u64)>> {
    let labels = galois.labels();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (x, &a) in labels.iter().enumerate() {
        for &b in &labels[x + 1..] {
            if seen.contains(&(a, b)) {
                continue;
            }
            let mut orbit = BTreeSet::from([(a, b)]);
            let mut stack = vec![(a, b)];
            while let Some((c, d)) = stack.pop() {
                for g in galois.generators() {
                    let img = image_of(galois, g, &[c, d]);
                    let e = (img[0], img[1]);
                    if orbit.insert(e) {
                        stack.push(e);
                    }
                }
            }
            seen.extend(orbit.iter().copied());
            out.push(orbit.into_iter().collect());
        }
    }
    out
}
